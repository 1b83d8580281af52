"""Truncated Laurent series in fractional powers of q with exact coefficients.

A :class:`QSeries` stores ``sum c_e q^(e/den)`` for integer numerators ``e``
below a truncation bound ``trunc`` (also a numerator over ``den``). Terms at
or beyond ``trunc`` are *unknown*, not zero. ``trunc=None`` marks an exact
(finite) Laurent polynomial.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import NonInvertible, PrecisionLossWarning

DEFAULT_DEN = 24
PRECISION_WARN = 1e-3


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted as exact coefficients")
    return Fraction(value)


def frac_str(value: Fraction) -> str:
    value = to_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _min_trunc(*values):
    finite = [v for v in values if v is not None]
    return min(finite) if finite else None


def exponents_den(exponents, base=DEFAULT_DEN) -> int:
    """Smallest multiple of ``base`` clearing every denominator in ``exponents``."""
    den = base
    for e in exponents:
        den = math.lcm(den, Fraction(e).denominator)
    return den


def tail_estimate(last: float, order, tau: complex) -> float:
    """Geometric tail bound ``max(|last term|, |q^order|) / (1 - |q|)``.

    The floor ``|q^order|`` keeps the estimate honest when truncation has
    discarded every stored term.
    """
    absq = math.exp(-2 * math.pi * tau.imag)
    floor = math.exp(-2 * math.pi * tau.imag * float(order))
    return float(max(last, floor) / (1.0 - absq))


@dataclass(frozen=True, eq=False)
class QSeries:
    coeffs: dict = field(default_factory=dict)
    trunc: int | None = None
    den: int = DEFAULT_DEN

    def __post_init__(self):
        if self.den < 1:
            raise ValueError("exponent denominator must be positive")
        clean = {}
        for e, c in self.coeffs.items():
            c = to_fraction(c)
            if c == 0:
                continue
            e = int(e)
            if self.trunc is not None and e >= self.trunc:
                continue
            clean[e] = c
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))
        if self.trunc is not None:
            object.__setattr__(self, "trunc", int(self.trunc))

    # construction ---------------------------------------------------------

    @classmethod
    def from_exponents(cls, terms, trunc=None, den=None):
        """Build from ``{Fraction exponent: coefficient}``; ``trunc`` is an exponent too."""
        terms = {Fraction(e): c for e, c in dict(terms).items()}
        if den is None:
            extra = [] if trunc is None else [Fraction(trunc)]
            den = exponents_den(list(terms) + extra)
        coeffs = {}
        for e, c in terms.items():
            num = e * den
            if num.denominator != 1:
                raise ValueError(f"exponent {e} is not a multiple of 1/{den}")
            coeffs[int(num)] = coeffs.get(int(num), 0) + to_fraction(c)
        t = None
        if trunc is not None:
            t = Fraction(trunc) * den
            t = math.ceil(t)
        return cls(coeffs, t, den)

    @classmethod
    def constant(cls, c=1, trunc=None, den=DEFAULT_DEN):
        t = None if trunc is None else int(Fraction(trunc) * den)
        return cls({0: c}, t, den)

    @classmethod
    def monomial(cls, exponent, c=1, trunc=None):
        return cls.from_exponents({Fraction(exponent): c}, trunc=trunc)

    # basic accessors --------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.trunc is None

    @property
    def order(self) -> Fraction | None:
        """Truncation bound as an exponent (``None`` when exact)."""
        return None if self.trunc is None else Fraction(self.trunc, self.den)

    def valuation_num(self) -> int | None:
        """Smallest stored exponent numerator; for a zero series, ``trunc``."""
        if self.coeffs:
            return next(iter(self.coeffs))
        return self.trunc

    def valuation(self) -> Fraction | None:
        v = self.valuation_num()
        return None if v is None else Fraction(v, self.den)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, exponent) -> Fraction:
        """Coefficient of ``q^exponent`` (exponent given as a rational)."""
        num = Fraction(exponent) * self.den
        if num.denominator != 1:
            return Fraction(0)
        num = int(num)
        if self.trunc is not None and num >= self.trunc:
            raise IndexError(f"q^{exponent} lies beyond the truncation order")
        return self.coeffs.get(num, Fraction(0))

    def terms(self):
        """Iterate ``(Fraction exponent, coefficient)`` in increasing order."""
        for e, c in self.coeffs.items():
            yield Fraction(e, self.den), c

    def with_den(self, den: int) -> "QSeries":
        if den == self.den:
            return self
        if den % self.den:
            raise ValueError(f"cannot rewrite denominator {self.den} as {den}")
        s = den // self.den
        t = None if self.trunc is None else self.trunc * s
        return QSeries({e * s: c for e, c in self.coeffs.items()}, t, den)

    def reduced(self, base=DEFAULT_DEN) -> "QSeries":
        """Rewrite over the smallest multiple of ``base`` dividing ``den`` that still works."""
        g = 0
        for e in self.coeffs:
            g = math.gcd(g, e)
        if self.trunc is not None:
            g = math.gcd(g, self.trunc)
        if self.den % base:
            return self
        g = math.gcd(g, self.den // base)
        if g <= 1:
            return self
        t = None if self.trunc is None else self.trunc // g
        return QSeries({e // g: c for e, c in self.coeffs.items()}, t, self.den // g)

    def truncate(self, order) -> "QSeries":
        """Drop everything at exponent ``>= order``."""
        t = Fraction(order) * self.den
        t = math.ceil(t)
        if self.trunc is not None and t > self.trunc:
            raise ValueError("cannot extend a series beyond its truncation order")
        return QSeries(self.coeffs, t, self.den)

    # arithmetic --------------------------------------------------------------

    def _aligned(self, other):
        if not isinstance(other, QSeries):
            other = QSeries.constant(to_fraction(other), den=self.den)
        den = math.lcm(self.den, other.den)
        return self.with_den(den), other.with_den(den)

    def __add__(self, other):
        a, b = self._aligned(other)
        out = dict(a.coeffs)
        for e, c in b.coeffs.items():
            out[e] = out.get(e, 0) + c
        return QSeries(out, _min_trunc(a.trunc, b.trunc), a.den)

    __radd__ = __add__

    def __neg__(self):
        return QSeries({e: -c for e, c in self.coeffs.items()}, self.trunc, self.den)

    def __sub__(self, other):
        a, b = self._aligned(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QSeries":
        c = to_fraction(c)
        return QSeries({e: v * c for e, v in self.coeffs.items()}, self.trunc, self.den)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        a, b = self._aligned(other)
        if (a.is_exact and a.is_zero()) or (b.is_exact and b.is_zero()):
            return QSeries({}, None, a.den)
        va, vb = a.valuation_num(), b.valuation_num()
        trunc = _min_trunc(
            None if a.trunc is None else a.trunc + vb,
            None if b.trunc is None else b.trunc + va,
        )
        out = {}
        bitems = list(b.coeffs.items())
        for ea, ca in a.coeffs.items():
            for eb, cb in bitems:
                e = ea + eb
                if trunc is not None and e >= trunc:
                    break
                out[e] = out.get(e, 0) + ca * cb
        return QSeries(out, trunc, a.den)

    def __rmul__(self, other):
        return self.scale(other)

    def shift(self, exponent) -> "QSeries":
        """Multiply by ``q^exponent`` exactly."""
        num = Fraction(exponent) * self.den
        if num.denominator != 1:
            return self * QSeries.monomial(exponent)
        s = int(num)
        t = None if self.trunc is None else self.trunc + s
        return QSeries({e + s: c for e, c in self.coeffs.items()}, t, self.den)

    def inverse(self) -> "QSeries":
        if self.is_zero():
            raise NonInvertible("series vanishes to its truncation order")
        v, lead = next(iter(self.coeffs.items()))
        if self.trunc is None:
            if len(self.coeffs) == 1:
                return QSeries({-v: 1 / lead}, None, self.den)
            raise NonInvertible("inverse of an exact polynomial is an infinite series; truncate first")
        prec = self.trunc - v
        u = [(e - v, c / lead) for e, c in self.coeffs.items() if e != v]
        g = {0: Fraction(1)}
        for k in range(1, prec):
            s = 0
            for j, uj in u:
                if j > k:
                    break
                gk = g.get(k - j)
                if gk is not None:
                    s += uj * gk
            if s:
                g[k] = -s
        inv_lead = 1 / lead
        return QSeries({k - v: c * inv_lead for k, c in g.items()}, prec - v, self.den)

    def __pow__(self, e: int) -> "QSeries":
        return pow_invert(self, e)

    def __truediv__(self, other):
        if isinstance(other, QSeries):
            return self * other.inverse()
        return self.scale(1 / to_fraction(other))

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        a, b = self._aligned(other)
        return a.coeffs == b.coeffs and a.trunc == b.trunc

    def agrees_with(self, other, order=None) -> bool:
        """Coefficientwise equality below the common truncation (or ``order``)."""
        a, b = self._aligned(other)
        t = _min_trunc(a.trunc, b.trunc)
        if order is not None:
            t = _min_trunc(t, math.ceil(Fraction(order) * a.den))
        keys = set(a.coeffs) | set(b.coeffs)
        return all(a.coeffs.get(k, 0) == b.coeffs.get(k, 0) for k in keys if t is None or k < t)

    def __repr__(self):
        shown = ", ".join(f"q^{frac_str(e)}:{frac_str(c)}" for e, c in list(self.terms())[:6])
        more = " ..." if len(self.coeffs) > 6 else ""
        tail = "exact" if self.trunc is None else f"O(q^{frac_str(self.order)})"
        return f"QSeries({shown}{more}; {tail})"

    # numerics -----------------------------------------------------------------

    def evaluate(self, tau: complex, warn: bool = True):
        """Numeric value at ``tau`` with a tail estimate.

        The estimate is the magnitude of the last retained term times the
        geometric factor ``1/(1-|q|)``; exact series report 0.
        """
        tau = complex(tau)
        if tau.imag <= 0:
            raise ValueError("tau must lie in the upper half plane")
        if self.trunc is None and not self.coeffs:
            return 0j, 0.0
        ex = np.array([e / self.den for e in self.coeffs], dtype=np.float64)
        cs = np.array([float(c) for c in self.coeffs.values()], dtype=np.float64)
        terms = cs * np.exp(2j * np.pi * ex * tau)
        value = complex(terms.sum())
        if self.trunc is None:
            return value, 0.0
        err = tail_estimate(abs(terms[-1]) if len(terms) else 0.0, self.order, tau)
        if warn and err > PRECISION_WARN:
            warnings.warn(
                f"series tail estimate {err:.3g} exceeds {PRECISION_WARN}",
                PrecisionLossWarning,
                stacklevel=2,
            )
        return value, float(err)

    # serialization -------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "den": self.den,
            "terms": [[e, frac_str(c)] for e, c in self.coeffs.items()],
            "trunc": self.trunc,
        }

    @classmethod
    def from_json(cls, data: dict) -> "QSeries":
        return cls({int(e): Fraction(c) for e, c in data["terms"]}, data.get("trunc"), int(data.get("den", DEFAULT_DEN)))


def arith(a: QSeries, b: QSeries, op: str) -> QSeries:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def eval_numeric(a: QSeries, tau: complex, warn: bool = True):
    return a.evaluate(tau, warn=warn)


def pow_invert(a: QSeries, e: int) -> QSeries:
    """``a**e`` for any integer ``e`` with truncation propagated."""
    e = int(e)
    if e < 0:
        return pow_invert(a.inverse(), -e)
    if e == 0:
        return QSeries.constant(1, den=a.den)
    result = None
    base = a
    while e:
        if e & 1:
            result = base if result is None else result * base
        e >>= 1
        if e:
            base = base * base
    return result


@lru_cache(maxsize=64)
def _euler_product(n_terms: int) -> tuple:
    """Coefficients of prod_{n>=1}(1-q^n) below q^n_terms (pentagonal numbers)."""
    coeffs = [0] * n_terms
    k = 0
    while True:
        sign = -1 if k % 2 else 1
        hit = False
        for kk in ((k, -k) if k else (0,)):
            p = kk * (3 * kk - 1) // 2
            if p < n_terms:
                coeffs[p] += sign
                hit = True
        if not hit:
            break
        k += 1
    return tuple(coeffs)


def eta(trunc=30) -> QSeries:
    """Dedekind eta ``q^(1/24) prod (1-q^n)`` with terms below ``q^trunc``."""
    trunc = Fraction(trunc)
    if trunc <= Fraction(1, 24):
        raise ValueError("eta needs a truncation order above 1/24")
    t = math.ceil(trunc * DEFAULT_DEN)
    n_terms = (t - 1) // DEFAULT_DEN + 1
    coeffs = {1 + DEFAULT_DEN * n: c for n, c in enumerate(_euler_product(n_terms)) if c}
    return QSeries(coeffs, t, DEFAULT_DEN)


def eta_power(e: int, trunc) -> QSeries:
    """``eta**e`` known through exponents below ``trunc`` (for any sign of ``e``)."""
    e = int(e)
    if e == 0:
        return QSeries.constant(1)
    trunc = Fraction(trunc)
    # a**e has relative precision a.trunc - a.valuation; ask for enough of eta
    need = trunc - Fraction(e, 24) + Fraction(1, 24)
    base = eta(max(need, Fraction(2, 24)))
    out = pow_invert(base, e)
    return out.truncate(trunc) if out.order is not None and out.order > trunc else out


@dataclass(frozen=True, eq=False)
class PhasedSeries:
    """q-series whose coefficients lie in the cyclotomic field Q(exp(2 pi i / modulus)).

    Each coefficient is a tuple of rationals in the power basis
    ``1, w, ..., w^(phi(modulus)-1)`` of ``w = exp(2 pi i / modulus)``, reduced
    modulo the cyclotomic polynomial so that equality and zero tests are exact.
    """

    coeffs: dict
    trunc: int | None
    den: int
    modulus: int

    def __post_init__(self):
        deg = len(cyclotomic_poly(self.modulus)) - 1
        clean = {}
        for e, vec in self.coeffs.items():
            vec = tuple(to_fraction(x) for x in vec)
            if len(vec) != deg:
                raise ValueError("cyclotomic coefficient vector has the wrong length")
            if any(vec) and (self.trunc is None or e < self.trunc):
                clean[int(e)] = vec
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def from_residues(cls, table, trunc, den, modulus):
        """Build from ``{exponent numerator: {residue mod modulus: rational}}``."""
        out = {}
        for e, by_res in table.items():
            out[e] = reduce_cyclotomic({r % modulus: c for r, c in by_res.items()}, modulus)
        return cls(out, trunc, den, modulus)

    @property
    def order(self):
        return None if self.trunc is None else Fraction(self.trunc, self.den)

    def exponents(self):
        return [Fraction(e, self.den) for e in self.coeffs]

    def coefficient(self, exponent) -> tuple:
        num = Fraction(exponent) * self.den
        deg = len(cyclotomic_poly(self.modulus)) - 1
        if num.denominator != 1:
            return (Fraction(0),) * deg
        return self.coeffs.get(int(num), (Fraction(0),) * deg)

    def coefficient_value(self, exponent) -> complex:
        w = cmath.exp(2j * cmath.pi / self.modulus)
        return sum(float(c) * w**k for k, c in enumerate(self.coefficient(exponent)))

    def period(self) -> int:
        """Smallest ``N >= 1`` with the series invariant under ``tau -> tau + N``."""
        n = 1
        for e in self.coeffs:
            n = math.lcm(n, Fraction(e, self.den).denominator)
        return n

    def evaluate(self, tau: complex):
        tau = complex(tau)
        if tau.imag <= 0:
            raise ValueError("tau must lie in the upper half plane")
        if self.trunc is None and not self.coeffs:
            return 0j, 0.0
        w = np.exp(2j * np.pi * np.arange(len(cyclotomic_poly(self.modulus)) - 1) / self.modulus)
        ex = np.array([e / self.den for e in self.coeffs], dtype=np.float64)
        cs = np.array([complex(np.dot([float(x) for x in vec], w)) for vec in self.coeffs.values()])
        terms = cs * np.exp(2j * np.pi * ex * tau)
        value = complex(terms.sum())
        if self.trunc is None:
            return value, 0.0
        return value, tail_estimate(abs(terms[-1]) if len(terms) else 0.0, self.order, tau)

    def to_json(self) -> dict:
        return {
            "den": self.den,
            "modulus": self.modulus,
            "terms": [[e, [frac_str(x) for x in vec]] for e, vec in self.coeffs.items()],
            "trunc": self.trunc,
        }


def _poly_divmod(num, den):
    """Integer polynomial division, coefficient lists in ascending degree, monic divisor."""
    num = list(num)
    dq = len(den) - 1
    quot = [0] * max(len(num) - dq, 1)
    for k in range(len(num) - 1, dq - 1, -1):
        c = num[k]
        if c:
            quot[k - dq] = c
            for j, dj in enumerate(den):
                num[k - dq + j] -= c * dj
    return quot, num[:dq] if dq else []


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple:
    """Ascending integer coefficients of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError("cyclotomic index must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, cyclotomic_poly(d))
            assert not any(rem)
    return tuple(poly)


def reduce_cyclotomic(by_residue: dict, modulus: int) -> tuple:
    """Reduce ``sum c_r w^r`` (w a primitive modulus-th root of 1) to the power basis."""
    phi = cyclotomic_poly(modulus)
    deg = len(phi) - 1
    vec = [Fraction(0)] * max(modulus, deg + 1)
    for r, c in by_residue.items():
        vec[r % modulus] += to_fraction(c)
    for k in range(len(vec) - 1, deg - 1, -1):
        c = vec[k]
        if c:
            for j, pj in enumerate(phi):
                vec[k - deg + j] -= c * pj
    return tuple(vec[:deg])
