"""Weak Jacobi forms as exact two-variable expansions ``sum c(n, r) q^n zeta^r``.

Besides the :class:`JacobiSeries` container this module builds the two
generators of index one (from Jacobi theta functions), the structure map
``(f_0, ..., f_m) -> sum f_i phi_{-2,1}^i phi_{0,1}^(m-i)``, the basis
``Q_i = x^i + O(q)``, the dimension formulas, and the coefficient-level
support and elliptic checks.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from . import linalg
from .errors import BadWeight, HypothesisViolated, NotPolynomialInX, WeightMismatch
from .modular import ModularForm, dim_Mk, eisenstein
from .series import (
    DEFAULT_DEN,
    PhasedSeries,
    QSeries,
    eta_power,
    frac_str,
    tail_estimate,
    to_fraction,
)

_Q_DEN = DEFAULT_DEN


def _min_trunc(*values):
    finite = [v for v in values if v is not None]
    return min(finite) if finite else None


def _weight_str(w: Fraction):
    return w.numerator if w.denominator == 1 else frac_str(w)


# -- layered integer convolution ----------------------------------------------


def _to_layers(coeffs):
    """Split ``{(n, r): Fraction}`` into integer layers ``{n: (rmin, array)}`` and a scale."""
    den = 1
    for c in coeffs.values():
        den = math.lcm(den, c.denominator)
    by_n = {}
    for (n, r), c in coeffs.items():
        by_n.setdefault(n, {})[r] = int(c * den)
    layers = {}
    for n, row in by_n.items():
        lo, hi = min(row), max(row)
        arr = np.zeros(hi - lo + 1, dtype=object)
        arr[:] = 0
        for r, v in row.items():
            arr[r - lo] = v
        layers[n] = (lo, arr)
    return dict(sorted(layers.items())), den


def _mul_coeffs(a, b, trunc):
    la, da = _to_layers(a)
    lb, db = _to_layers(b)
    acc = {}
    b_items = list(lb.items())
    for na, (ra, xa) in la.items():
        for nb, (rb, xb) in b_items:
            n = na + nb
            if trunc is not None and n >= trunc:
                break
            prod = np.convolve(xa, xb)
            lo = ra + rb
            if n in acc:
                lo0, cur = acc[n]
                new_lo = min(lo0, lo)
                new_hi = max(lo0 + len(cur), lo + len(prod))
                merged = np.zeros(new_hi - new_lo, dtype=object)
                merged[:] = 0
                merged[lo0 - new_lo: lo0 - new_lo + len(cur)] += cur
                merged[lo - new_lo: lo - new_lo + len(prod)] += prod
                acc[n] = (new_lo, merged)
            else:
                acc[n] = (lo, prod)
    scale = Fraction(1, da * db)
    out = {}
    for n, (lo, arr) in acc.items():
        for k, v in enumerate(arr):
            if v:
                out[(n, lo + k)] = v * scale
    return out


# -- the container --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class JacobiSeries:
    """Exact coefficients ``c(n, r)`` stored as ``{(n * den, r): Fraction}``.

    ``trunc`` bounds ``n * den`` (exclusive); ``None`` means the series is an
    exact Laurent polynomial. ``eta_power`` records the power of the eta
    multiplier picked up by :func:`eta_multiply`.
    """

    weight: Fraction
    index: Fraction
    coeffs: dict = field(default_factory=dict)
    trunc: int | None = None
    den: int = DEFAULT_DEN
    eta_power: int = 0

    def __post_init__(self):
        object.__setattr__(self, "weight", to_fraction(self.weight))
        object.__setattr__(self, "index", to_fraction(self.index))
        if self.index < 0:
            raise ValueError("Jacobi index must be nonnegative")
        clean = {}
        for (n, r), c in self.coeffs.items():
            c = to_fraction(c)
            if c and (self.trunc is None or n < self.trunc):
                clean[(int(n), int(r))] = c
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    # access ------------------------------------------------------------------

    @property
    def order(self):
        return None if self.trunc is None else Fraction(self.trunc, self.den)

    def __getitem__(self, key) -> Fraction:
        n, r = key
        num = Fraction(n) * self.den
        if num.denominator != 1:
            return Fraction(0)
        if self.trunc is not None and num >= self.trunc:
            raise IndexError(f"q^{n} lies beyond the truncation order")
        return self.coeffs.get((int(num), int(r)), Fraction(0))

    def items(self):
        """Iterate ``((Fraction n, r), c)``."""
        for (n, r), c in self.coeffs.items():
            yield (Fraction(n, self.den), r), c

    def layer(self, n) -> dict:
        num = Fraction(n) * self.den
        if num.denominator != 1:
            return {}
        return {r: c for (m, r), c in self.coeffs.items() if m == num}

    def n_values(self):
        return sorted({Fraction(n, self.den) for n, _ in self.coeffs})

    def valuation_num(self):
        if self.coeffs:
            return min(n for n, _ in self.coeffs)
        return self.trunc

    def is_zero(self):
        return not self.coeffs

    def has_integral_exponents(self) -> bool:
        return all(n % self.den == 0 for n, _ in self.coeffs)

    def replace(self, **changes) -> "JacobiSeries":
        data = dict(
            weight=self.weight,
            index=self.index,
            coeffs=self.coeffs,
            trunc=self.trunc,
            den=self.den,
            eta_power=self.eta_power,
        )
        data.update(changes)
        return JacobiSeries(**data)

    def with_den(self, den: int) -> "JacobiSeries":
        if den == self.den:
            return self
        if den % self.den:
            raise ValueError(f"cannot rewrite denominator {self.den} as {den}")
        s = den // self.den
        return self.replace(
            coeffs={(n * s, r): c for (n, r), c in self.coeffs.items()},
            trunc=None if self.trunc is None else self.trunc * s,
            den=den,
        )

    def truncate(self, order) -> "JacobiSeries":
        t = math.ceil(Fraction(order) * self.den)
        if self.trunc is not None and t > self.trunc:
            raise ValueError(f"series is only known below q^{self.order}, not q^{order}")
        return self.replace(trunc=t)

    def reduced(self, base: int = DEFAULT_DEN) -> "JacobiSeries":
        """Shrink ``den`` to the smallest multiple of ``base`` that still fits."""
        if self.den % base:
            return self
        g = self.den // base
        for n, _ in self.coeffs:
            g = math.gcd(g, n)
        if self.trunc is not None:
            g = math.gcd(g, self.trunc)
        if g <= 1:
            return self
        return self.replace(
            coeffs={(n // g, r): c for (n, r), c in self.coeffs.items()},
            trunc=None if self.trunc is None else self.trunc // g,
            den=self.den // g,
        )

    # arithmetic ------------------------------------------------------------------

    def _aligned(self, other):
        den = math.lcm(self.den, other.den)
        return self.with_den(den), other.with_den(den)

    def __add__(self, other: "JacobiSeries") -> "JacobiSeries":
        a, b = self._aligned(other)
        out = dict(a.coeffs)
        for k, c in b.coeffs.items():
            out[k] = out.get(k, 0) + c
        return a.replace(coeffs=out, trunc=_min_trunc(a.trunc, b.trunc))

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "JacobiSeries":
        c = to_fraction(c)
        return self.replace(coeffs={k: v * c for k, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, JacobiSeries):
            return self._mul_raw(other, other.weight, other.index, other.eta_power)
        if isinstance(other, QSeries):
            return self.mul_q(other)
        if isinstance(other, ModularForm):
            return self.mul_q(other.expansion, weight_shift=other.weight)
        return self.scale(other)

    __rmul__ = __mul__

    def mul_q(self, qs: QSeries, weight_shift=0, eta_shift=0) -> "JacobiSeries":
        """Multiply by a zeta-free series; weight bookkeeping is the caller's."""
        other = JacobiSeries(0, 0, {(e, 0): c for e, c in qs.coeffs.items()}, qs.trunc, qs.den)
        return self._mul_raw(other, to_fraction(weight_shift), Fraction(0), eta_shift)

    def _mul_raw(self, other, weight, index, eta_shift):
        a, b = self._aligned(other)
        if (a.trunc is None and a.is_zero()) or (b.trunc is None and b.is_zero()):
            trunc = None
        else:
            va, vb = a.valuation_num(), b.valuation_num()
            trunc = _min_trunc(
                None if a.trunc is None else a.trunc + vb,
                None if b.trunc is None else b.trunc + va,
            )
        return JacobiSeries(
            a.weight + weight,
            a.index + index,
            _mul_coeffs(a.coeffs, b.coeffs, trunc),
            trunc,
            a.den,
            a.eta_power + eta_shift,
        )

    def __pow__(self, e: int) -> "JacobiSeries":
        if e < 0:
            raise ValueError("negative powers of Jacobi series are not supported")
        out = JacobiSeries(0, 0, {(0, 0): 1}, None, self.den)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def agrees_with(self, other: "JacobiSeries") -> bool:
        a, b = self._aligned(other)
        t = _min_trunc(a.trunc, b.trunc)
        keys = set(a.coeffs) | set(b.coeffs)
        return all(a.coeffs.get(k, 0) == b.coeffs.get(k, 0) for k in keys if t is None or k[0] < t)

    # specializations --------------------------------------------------------------

    def at_z0(self) -> QSeries:
        """The q-series ``phi(tau, 0)`` (all zeta powers collapsed)."""
        out = {}
        for (n, _), c in self.coeffs.items():
            out[n] = out.get(n, 0) + c
        return QSeries(out, self.trunc, self.den)

    def specialize_root_of_unity(self, R: int) -> PhasedSeries:
        """``phi(tau, 1/R)`` with exact cyclotomic coefficients."""
        table = {}
        for (n, r), c in self.coeffs.items():
            row = table.setdefault(n, {})
            row[r % R] = row.get(r % R, 0) + c
        return PhasedSeries.from_residues(table, self.trunc, self.den, R)

    # numerics -------------------------------------------------------------------------

    def evaluate(self, tau: complex, z: complex = 0.0):
        """``(value, tail_estimate)`` of ``sum c(n,r) e^{2 pi i (n tau + r z)}``."""
        tau, z = complex(tau), complex(z)
        if tau.imag <= 0:
            raise ValueError("tau must lie in the upper half plane")
        if not self.coeffs:
            return 0j, (0.0 if self.trunc is None else tail_estimate(0.0, self.order, tau))
        keys = list(self.coeffs)
        n = np.array([k[0] for k in keys], dtype=np.float64) / self.den
        r = np.array([k[1] for k in keys], dtype=np.float64)
        c = np.array([float(v) for v in self.coeffs.values()], dtype=np.float64)
        terms = c * np.exp(2j * np.pi * (n * tau + r * z))
        value = complex(terms.sum())
        if self.trunc is None:
            return value, 0.0
        last = max(k[0] for k in keys)
        mask = np.array([k[0] == last for k in keys])
        return value, tail_estimate(float(np.abs(terms[mask]).sum()), self.order, tau)

    # serialization ------------------------------------------------------------------------

    def to_json(self) -> dict:
        out = {
            "weight": _weight_str(self.weight),
            "index": frac_str(self.index),
            "den": self.den,
            "terms": [[n, r, frac_str(c)] for (n, r), c in self.coeffs.items()],
            "trunc": self.trunc,
        }
        if self.eta_power:
            out["eta_power"] = self.eta_power
        return out

    @classmethod
    def from_json(cls, data: dict) -> "JacobiSeries":
        return cls(
            to_fraction(str(data["weight"])),
            to_fraction(str(data["index"])),
            {(int(n), int(r)): Fraction(c) for n, r, c in data["terms"]},
            data.get("trunc"),
            int(data.get("den", DEFAULT_DEN)),
            int(data.get("eta_power", 0)),
        )

    def __repr__(self):
        return (
            f"JacobiSeries(weight={_weight_str(self.weight)}, index={frac_str(self.index)}, "
            f"terms={len(self.coeffs)}, order={'exact' if self.trunc is None else frac_str(self.order)})"
        )


# -- generators ------------------------------------------------------------------------


def _halve_zeta(series: JacobiSeries, weight, index) -> JacobiSeries:
    out = {}
    for (n, r2), c in series.coeffs.items():
        if r2 % 2:
            raise ArithmeticError("half-integral zeta power survived in a generator")
        out[(n, r2 // 2)] = c
    return JacobiSeries(weight, index, out, series.trunc, series.den)


def _theta(kind: str, trunc_num: int) -> JacobiSeries:
    """Jacobi theta series in (q^(1/24), zeta^(1/2)) coordinates below q^(trunc_num/24).

    ``odd`` is ``sum (-1)^n q^((2n+1)^2/8) zeta^((2n+1)/2)`` (so ``theta_1 = -i * odd``);
    ``2``, ``3``, ``4`` are the usual even theta functions.
    """
    odd = kind in ("odd", "2")
    coeffs = {}
    k = 0
    while True:
        a = 2 * k + 1 if odd else 2 * k
        e = 3 * a * a
        if e >= trunc_num:
            break
        for r2 in {a, -a}:
            # r2 = 2n+1 (odd) or 2n (even); the sign is (-1)^n
            n = (r2 - 1) // 2 if odd else r2 // 2
            if kind == "odd" or kind == "4":
                sign = -1 if n % 2 else 1
            else:
                sign = 1
            coeffs[(e, r2)] = sign
        k += 1
    return JacobiSeries(0, 0, coeffs, trunc_num, _Q_DEN)


@lru_cache(maxsize=None)
def gen_phi_m2_1(trunc: int = 30) -> JacobiSeries:
    """``phi_{-2,1} = -theta_1(tau,z)^2 / eta^6 = (zeta - 2 + 1/zeta) + O(q)``."""
    t = _Q_DEN * (trunc + 1)
    s = _theta("odd", t)
    # -theta_1^2 = s^2 because theta_1 = -i s
    phi = (s * s).mul_q(eta_power(-6, trunc + 2))
    return _halve_zeta(phi, -2, 1).truncate(trunc)


@lru_cache(maxsize=None)
def gen_phi_0_1(trunc: int = 30) -> JacobiSeries:
    """``phi_{0,1} = 4 sum_{i=2,3,4} (theta_i(tau,z)/theta_i(tau,0))^2``."""
    t = _Q_DEN * (trunc + 2)
    total = None
    for kind in ("2", "3", "4"):
        th = _theta(kind, t)
        th0 = th.at_z0()
        part = (th * th).mul_q((th0 * th0).inverse())
        total = part if total is None else total + part
    total = total.scale(4)
    for n, _ in total.coeffs:
        if n % _Q_DEN:
            raise ArithmeticError("fractional q power survived in phi_{0,1}")
    return _halve_zeta(total, 0, 1).truncate(trunc)


# -- leading polynomials ------------------------------------------------------------------


@dataclass(frozen=True)
class LeadingPolynomial:
    """The q^0 layer written in ``x = zeta + 1/zeta``; ``x_coeffs`` ascending."""

    x_coeffs: tuple

    def __post_init__(self):
        coeffs = [to_fraction(c) for c in self.x_coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "x_coeffs", tuple(coeffs))

    @classmethod
    def from_roots(cls, factors):
        """Product of linear factors ``x + a`` given as the list of ``a``."""
        poly = [Fraction(1)]
        for a in factors:
            nxt = [Fraction(0)] * (len(poly) + 1)
            for i, c in enumerate(poly):
                nxt[i] += c * a
                nxt[i + 1] += c
            poly = nxt
        return cls(tuple(poly))

    @classmethod
    def monomial(cls, i: int):
        return cls((0,) * i + (1,))

    @property
    def degree(self) -> int:
        return len(self.x_coeffs) - 1

    def zeta_coeffs(self) -> dict:
        out = {}
        for d, c in enumerate(self.x_coeffs):
            for j in range(d + 1):
                r = d - 2 * j
                out[r] = out.get(r, 0) + c * comb(d, j)
        return {r: c for r, c in out.items() if c}

    def __mul__(self, other):
        a, b = self.x_coeffs, other.x_coeffs
        out = [Fraction(0)] * (len(a) + len(b) - 1 if a and b else 0)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return LeadingPolynomial(tuple(out))

    def __str__(self):
        parts = []
        for d in range(len(self.x_coeffs) - 1, -1, -1):
            c = self.x_coeffs[d]
            if c:
                mono = "" if d == 0 else ("x" if d == 1 else f"x^{d}")
                parts.append(f"{frac_str(c)}{'*' if mono else ''}{mono}")
        return " + ".join(parts) if parts else "0"


def leading_polynomial(phi: JacobiSeries) -> LeadingPolynomial:
    if any(n % phi.den for n, _ in phi.coeffs):
        raise NotPolynomialInX("series has fractional q exponents")
    layer = phi.layer(0)
    for r, c in layer.items():
        if layer.get(-r, 0) != c:
            raise NotPolynomialInX(f"q^0 layer is not symmetric: c(0,{r}) != c(0,{-r})")
    remaining = dict(layer)
    x = {}
    while remaining:
        d = max(remaining)
        c = remaining[d]
        x[d] = c
        for j in range(d + 1):
            r = d - 2 * j
            v = remaining.get(r, 0) - c * comb(d, j)
            if v:
                remaining[r] = v
            else:
                remaining.pop(r, None)
    deg = max(x) if x else -1
    return LeadingPolynomial(tuple(x.get(i, 0) for i in range(deg + 1)))


# -- the structure map -------------------------------------------------------------------


@lru_cache(maxsize=None)
def generator_monomial(i: int, j: int, trunc: int) -> JacobiSeries:
    """``phi_{-2,1}^i phi_{0,1}^j`` to order ``trunc``."""
    if i == 0 and j == 0:
        return JacobiSeries(0, 0, {(0, 0): 1}, None, _Q_DEN)
    if i > 0:
        return generator_monomial(i - 1, j, trunc) * gen_phi_m2_1(trunc)
    return generator_monomial(0, j - 1, trunc) * gen_phi_0_1(trunc)


def _form_order(f) -> int | None:
    o = f.expansion.order
    return None if o is None else math.floor(o)


def structure_map(f, k: int, m: int, trunc: int | None = None) -> JacobiSeries:
    """``sum_i f_i phi_{-2,1}^i phi_{0,1}^(m-i)`` for ``f_i`` of weight ``k + 2i``.

    Entries of ``f`` may be ``None`` for the zero form.
    """
    f = list(f)
    if len(f) != m + 1:
        raise WeightMismatch(f"need {m + 1} modular forms for index {m}, got {len(f)}")
    for i, fi in enumerate(f):
        if fi is not None and fi.weight != k + 2 * i:
            raise WeightMismatch(f"f_{i} has weight {fi.weight}, expected {k + 2 * i}")
    if trunc is None:
        orders = [_form_order(fi) for fi in f if fi is not None]
        orders = [o for o in orders if o is not None]
        trunc = min(orders) if orders else 30
    out = JacobiSeries(k, m, {}, _Q_DEN * trunc, _Q_DEN)
    for i, fi in enumerate(f):
        if fi is None or fi.expansion.is_zero():
            continue
        term = generator_monomial(i, m - i, trunc).mul_q(fi.expansion.truncate(trunc), weight_shift=fi.weight)
        out = out + term
    return out.truncate(trunc).replace(weight=Fraction(k), index=Fraction(m))


def leading_basis_matrix(m: int) -> list[list[Fraction]]:
    """Rows: ``(x-2)^i (x+10)^(m-i)`` in the monomial basis ``1, x, ..., x^m``."""
    rows = []
    for i in range(m + 1):
        p = LeadingPolynomial.from_roots([Fraction(-2)] * i + [Fraction(10)] * (m - i))
        rows.append(list(p.x_coeffs) + [Fraction(0)] * (m + 1 - len(p.x_coeffs)))
    return rows


def eisenstein_images(k: int, m: int, trunc: int = 30) -> list[JacobiSeries]:
    """``P(E_i) = E_{k+2i} phi_{-2,1}^i phi_{0,1}^(m-i)`` for ``0 <= i <= m``."""
    out = []
    for i in range(m + 1):
        f = [None] * (m + 1)
        f[i] = eisenstein(k + 2 * i, trunc)
        out.append(structure_map(f, k, m, trunc))
    return out


def combine(series, coefficients) -> JacobiSeries:
    out = None
    for s, c in zip(series, coefficients):
        if not c:
            continue
        term = s.scale(c)
        out = term if out is None else out + term
    if out is None:
        s = series[0]
        out = s.replace(coeffs={})
    return out


@lru_cache(maxsize=None)
def q_basis(k: int, m: int, trunc: int = 30) -> tuple[JacobiSeries, ...]:
    """Weak Jacobi forms ``Q_0..Q_m`` of weight k, index m with ``Q_i = x^i + O(q)``."""
    if k < 4 or k % 2:
        raise BadWeight(f"Q-basis needs even weight >= 4, got {k}")
    if m < 1:
        raise ValueError("Q-basis needs index >= 1")
    images = eisenstein_images(k, m, trunc)
    rows = []
    for p in images:
        lp = leading_polynomial(p).x_coeffs
        rows.append(list(lp) + [Fraction(0)] * (m + 1 - len(lp)))
    inv = linalg.inverse(rows)
    return tuple(combine(images, inv[i]) for i in range(m + 1))


# -- dimensions -----------------------------------------------------------------------------


def dim_weak(k: int, m: int) -> int:
    if k % 2:
        raise BadWeight("the structure map covers even weight only")
    return sum(dim_Mk(k + 2 * i) for i in range(m + 1))


def codim_sum(m: int) -> int:
    if m < 1:
        raise ValueError("index must be positive")
    # ceil(nu^2 / 4m) in exact integer arithmetic
    return sum(-((-nu * nu) // (4 * m)) for nu in range(m + 1))


def dim_true(k: int, m: int) -> int:
    if k < 3:
        raise HypothesisViolated("the codimension formula needs weight k >= 3")
    return dim_weak(k, m) - codim_sum(m)


# -- support conditions ------------------------------------------------------------------------


class Verdict(str, enum.Enum):
    TRUE_JACOBI = "true-jacobi-to-truncation"
    WEAK_ONLY = "weak-only"
    VIOLATES_WEAK = "violates-weak-bound"


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    witness: tuple | None = None
    checked: int = 0

    def to_json(self):
        w = None if self.witness is None else [frac_str(self.witness[0]), self.witness[1]]
        return {"verdict": self.verdict.value, "witness": w, "checked": self.checked}


def _integer_index(phi: JacobiSeries) -> int:
    if phi.index.denominator != 1 or phi.index < 1:
        raise HypothesisViolated(f"need an integer index >= 1, got {frac_str(phi.index)}")
    if any(n % phi.den for n, _ in phi.coeffs):
        raise HypothesisViolated("need integral q exponents")
    return int(phi.index)


def classify(phi: JacobiSeries) -> Classification:
    """Scan every stored ``c(n, r)`` against the weak and true support bounds."""
    m = _integer_index(phi)
    weak_witness = None
    count = 0
    for (n_num, r), _ in phi.coeffs.items():
        n = n_num // phi.den
        count += 1
        if n < 0 or r * r > m * m + 4 * m * n:
            return Classification(Verdict.VIOLATES_WEAK, (Fraction(n), r), count)
        if weak_witness is None and r * r > 4 * m * n:
            weak_witness = (Fraction(n), r)
    if weak_witness is not None:
        return Classification(Verdict.WEAK_ONLY, weak_witness, count)
    return Classification(Verdict.TRUE_JACOBI, None, count)


@dataclass(frozen=True)
class ConstantTermDecision:
    decision: str  # "IsJacobi", "NotJacobi" or "InternalInconsistency"
    witness: object = None
    classification: Classification | None = None

    def to_json(self):
        return {
            "decision": self.decision,
            "witness": self.witness,
            "classification": None if self.classification is None else self.classification.to_json(),
        }


def prop2_criterion(phi: JacobiSeries) -> ConstantTermDecision:
    """Jacobi iff ``c(0, r) = 0`` for all ``r != 0`` (weight >= 4, index 1..4)."""
    if phi.weight < 4:
        raise HypothesisViolated(f"criterion needs weight >= 4, got {_weight_str(phi.weight)}")
    if phi.index.denominator != 1 or not 1 <= phi.index <= 4:
        raise HypothesisViolated(f"criterion needs index 1..4, got {frac_str(phi.index)}")
    layer = phi.layer(0)
    bad = sorted((r for r in layer if r != 0), key=lambda r: (abs(r), r))
    if bad:
        return ConstantTermDecision("NotJacobi", bad[0])
    cls = classify(phi)
    if cls.verdict is not Verdict.TRUE_JACOBI:
        return ConstantTermDecision("InternalInconsistency", cls.witness, cls)
    return ConstantTermDecision("IsJacobi", None, cls)


# -- elliptic invariance ---------------------------------------------------------------------------


@dataclass
class EllipticReport:
    u_values: list
    pairs_checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self):
        return {
            "u_values": list(self.u_values),
            "pairs_checked": self.pairs_checked,
            "violations": [[frac_str(n), r, frac_str(n2), r2] for n, r, n2, r2 in self.violations],
            "passed": self.passed,
        }


def _shift_keys(index: Fraction, den: int, u: int):
    two_mu = 2 * index * u
    if two_mu.denominator != 1:
        raise HypothesisViolated("2*m*u must be an integer for the elliptic shift")
    mu2 = index * u * u * den
    if mu2.denominator != 1:
        raise HypothesisViolated("m*u^2 is not representable at this exponent denominator")
    return int(two_mu), int(mu2)


def _compare_shift(src: JacobiSeries, dst: JacobiSeries, u: int, report: EllipticReport | None):
    """Compare ``c_src(n, r)`` with ``c_dst(n + ru + mu^2, r + 2mu)`` inside both truncations."""
    src, dst = src._aligned(dst)
    den = src.den
    two_mu, mu2 = _shift_keys(src.index, den, u)
    t = _min_trunc(src.trunc, dst.trunc)

    def fwd(n, r):
        return n + den * r * u + mu2, r + two_mu

    def back(n, r):
        r0 = r - two_mu
        return n - den * r0 * u - mu2, r0

    pairs = {(k, fwd(*k)) for k in src.coeffs}
    pairs |= {(back(*k), k) for k in dst.coeffs}
    ok = True
    checked = 0
    for a, b in sorted(pairs):
        if t is not None and (a[0] >= t or b[0] >= t):
            continue
        checked += 1
        ca = src.coeffs.get(a, 0)
        cb = dst.coeffs.get(b, 0)
        if ca != cb:
            ok = False
            if report is None:
                return False, checked
            report.violations.append((Fraction(a[0], den), a[1], Fraction(b[0], den), b[1]))
    return ok, checked


def elliptic_symmetry_check(phi: JacobiSeries, u_range=range(-2, 3)) -> EllipticReport:
    """Check ``c(n, r) = c(n + ru + mu^2, r + 2mu)`` for each ``u``."""
    if phi.index <= 0:
        raise HypothesisViolated("elliptic check needs positive index")
    report = EllipticReport(list(u_range))
    for u in report.u_values:
        _, checked = _compare_shift(phi, phi, int(u), report)
        report.pairs_checked += checked
    return report


def match_elliptic_permutation(series: list, u: int) -> list:
    """For each ``J_i`` the indices ``j`` whose table equals the u-shifted table of ``J_i``."""
    out = []
    for src in series:
        out.append([j for j, dst in enumerate(series) if _compare_shift(src, dst, u, None)[0]])
    return out


# -- eta multiplier ------------------------------------------------------------------------------


def eta_multiply(phi: JacobiSeries, e: int) -> JacobiSeries:
    """Coefficientwise product with ``eta**e``; weight grows by ``e/2``."""
    e = int(e)
    if e == 0:
        return phi
    if phi.trunc is None:
        raise ValueError("eta products of exact series need an explicit truncation")
    val = Fraction(phi.valuation_num(), phi.den)
    need = phi.order - val + Fraction(e, 24)
    factor = eta_power(e, need + 1)
    out = phi.mul_q(factor, weight_shift=Fraction(e, 2), eta_shift=e)
    target = phi.order + Fraction(e, 24)
    return out.truncate(target) if out.order > target else out
