"""Even positive-definite lattices and the characters of their lattice VOAs.

Vectors are stored in lattice coordinates with exact rational entries; the
pairing is ``a^T G b`` for the Gram matrix ``G``. Every theta series is built
from :func:`kernels.theta_histogram`, which enumerates a coset ``L + gamma``
in integer-scaled coordinates and bins vectors by exact norm and pairing.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels, linalg
from .errors import InfiniteOrder, IntegralityViolation, InvalidLattice
from .jacobi import JacobiSeries
from .series import DEFAULT_DEN, PhasedSeries, QSeries, eta_power, frac_str, to_fraction

MAX_ORDER = 1000


# -- lattices -------------------------------------------------------------------------


def _e8_gram():
    g = [[0] * 8 for _ in range(8)]
    for i in range(8):
        g[i][i] = 2
    # Bourbaki labelling: chain 1-3-4-5-6-7-8 with node 2 attached to node 4
    for a, b in [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)]:
        g[a - 1][b - 1] = g[b - 1][a - 1] = -1
    return g


@dataclass(frozen=True)
class EvenLattice:
    gram: tuple
    name: str = ""

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise InvalidLattice("Gram matrix must be square and nonempty")
        if any(rows[i][j] != rows[j][i] for i in range(n) for j in range(n)):
            raise InvalidLattice("Gram matrix must be symmetric")
        if any(rows[i][i] % 2 for i in range(n)):
            raise InvalidLattice("lattice is not even: odd diagonal entry")
        for k in range(1, n + 1):
            if linalg.det([r[:k] for r in rows[:k]]) <= 0:
                raise InvalidLattice(f"Gram matrix is not positive definite (minor {k})")

    @classmethod
    def named(cls, name: str) -> "EvenLattice":
        key = name.replace(" ", "").upper()
        if key == "E8":
            return cls(_e8_gram(), "E8")
        if key == "A1":
            return cls(((2,),), "A1")
        if key in ("A1+E8", "A1E8"):
            return cls.named("A1").direct_sum(cls.named("E8"))
        raise InvalidLattice(f"unknown lattice {name!r}")

    @classmethod
    def from_json(cls, data) -> "EvenLattice":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(tuple(tuple(r) for r in data["gram"]), data.get("name", ""))

    @classmethod
    def load(cls, spec: str) -> "EvenLattice":
        """A named lattice or a path to a ``{"gram": ...}`` JSON file."""
        try:
            return cls.named(spec)
        except InvalidLattice:
            pass
        try:
            with open(spec) as fh:
                return cls.from_json(json.load(fh))
        except FileNotFoundError:
            raise InvalidLattice(f"unknown lattice {spec!r}") from None

    def direct_sum(self, other: "EvenLattice") -> "EvenLattice":
        n, m = self.rank, other.rank
        rows = [list(r) + [0] * m for r in self.gram] + [[0] * n + list(r) for r in other.gram]
        name = f"{self.name}+{other.name}" if self.name and other.name else ""
        return EvenLattice(tuple(map(tuple, rows)), name)

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def det(self) -> int:
        return int(linalg.det(self.gram))

    @property
    def is_unimodular(self) -> bool:
        return self.det == 1

    def gram_inverse(self):
        return _gram_inverse(self.gram)

    def pair(self, a, b) -> Fraction:
        a, b = _coords(a), _coords(b)
        n = self.rank
        return sum((a[i] * self.gram[i][j] * b[j] for i in range(n) for j in range(n) if a[i] and b[j]), Fraction(0))

    def norm(self, a) -> Fraction:
        return self.pair(a, a)

    def to_json(self):
        return {"gram": [list(r) for r in self.gram], "name": self.name}


@lru_cache(maxsize=None)
def _gram_inverse(gram):
    return tuple(tuple(r) for r in linalg.inverse(gram))


# -- vectors ----------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeVector:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(to_fraction(c) for c in self.coords))

    @classmethod
    def zero(cls, n: int):
        return cls((0,) * n)

    @classmethod
    def basis(cls, n: int, i: int):
        return cls(tuple(int(k == i) for k in range(n)))

    def __len__(self):
        return len(self.coords)

    def __add__(self, other):
        return LatticeVector(tuple(a + b for a, b in zip(self.coords, _coords(other))))

    def __sub__(self, other):
        return LatticeVector(tuple(a - b for a, b in zip(self.coords, _coords(other))))

    def __neg__(self):
        return LatticeVector(tuple(-a for a in self.coords))

    def __mul__(self, c):
        c = to_fraction(c)
        return LatticeVector(tuple(a * c for a in self.coords))

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1 / to_fraction(c))

    @property
    def denominator(self) -> int:
        d = 1
        for c in self.coords:
            d = math.lcm(d, c.denominator)
        return d

    def is_integral(self) -> bool:
        return self.denominator == 1

    def mod1(self) -> "LatticeVector":
        return LatticeVector(tuple(c - math.floor(c) for c in self.coords))

    def __str__(self):
        return ",".join(frac_str(c) for c in self.coords)


def _coords(v):
    return v.coords if isinstance(v, LatticeVector) else tuple(to_fraction(c) for c in v)


_SCALED = re.compile(r"^(?:(?P<pre>[-+]?\d+(?:/\d+)?)\*?)?(?P<name>[a-z]\w*)(?:/(?P<div>\d+))?$")


def parse_vector(text, L: EvenLattice, names: dict | None = None) -> LatticeVector:
    """Parse ``"1,0,-1/2"``, ``"e3"``, ``"root"``, ``"h/2"`` or ``"2h"``.

    ``names`` maps symbols such as ``h`` to already parsed vectors; ``root``
    is the first basis vector and ``eK`` the K-th (1-based).
    """
    if isinstance(text, LatticeVector):
        return text
    s = str(text).strip().replace(" ", "")
    s = re.sub(r"basis$", "", s)
    names = dict(names or {})
    names.setdefault("root", LatticeVector.basis(L.rank, 0))
    names.setdefault("zero", LatticeVector.zero(L.rank))
    if "," in s or re.fullmatch(r"[-+]?\d+(/\d+)?", s):
        parts = [p for p in s.split(",") if p != ""]
        if len(parts) != L.rank:
            raise ValueError(f"vector {text!r} has {len(parts)} entries, lattice rank is {L.rank}")
        return LatticeVector(tuple(Fraction(p) for p in parts))
    m = _SCALED.match(s)
    if not m:
        raise ValueError(f"cannot parse vector {text!r}")
    name = m.group("name")
    if name in names:
        vec = names[name]
    elif re.fullmatch(r"e\d+", name) and 1 <= int(name[1:]) <= L.rank:
        vec = LatticeVector.basis(L.rank, int(name[1:]) - 1)
    else:
        raise ValueError(f"unknown vector symbol {name!r}")
    if m.group("pre"):
        vec = vec * Fraction(m.group("pre"))
    if m.group("div"):
        vec = vec / int(m.group("div"))
    return vec


# -- cosets --------------------------------------------------------------------------------


@dataclass(frozen=True)
class CosetModule:
    """An irreducible module ``V_{L+gamma}`` with its conformal weight."""

    gamma: LatticeVector
    conformal_weight: Fraction
    label: int = 0

    def to_json(self):
        return {"label": self.label, "gamma": str(self.gamma), "conformal_weight": frac_str(self.conformal_weight)}


def _scaled(gamma: LatticeVector):
    """``(d, shift)`` with ``d * gamma`` integral and ``shift = d * gamma mod d``."""
    d = gamma.denominator
    shift = np.array([int(c * d) % d for c in gamma.coords], dtype=np.int64)
    return d, shift


def _gram_array(L):
    return np.array(L.gram, dtype=np.int64)


def coset_minimum(L: EvenLattice, gamma: LatticeVector):
    """Minimal norm in ``L + gamma`` and the lexicographically largest minimizer."""
    # reduce to a representative with coordinates in (-1/2, 1/2]; its norm bounds the minimum
    rep = LatticeVector(tuple(c - math.ceil(c - Fraction(1, 2)) for c in gamma.coords))
    d, shift = _scaled(gamma)
    bound = int(L.norm(rep) * d * d)
    vecs = kernels.short_vectors(_gram_array(L), shift, d, bound)
    if len(vecs) == 0:
        raise ArithmeticError("coset enumeration missed the reference vector")
    G = _gram_array(L)
    norms = np.einsum("ij,jk,ik->i", vecs, G, vecs)
    best = int(norms.min())
    cands = sorted(tuple(int(x) for x in v) for v in vecs[norms == best])
    vec = LatticeVector(tuple(Fraction(x, d) for x in cands[-1]))
    return Fraction(best, d * d), vec


@lru_cache(maxsize=None)
def discriminant_group(L: EvenLattice) -> tuple[CosetModule, ...]:
    """Representatives of ``L*/L``, zero coset first, then by conformal weight."""
    Ginv = L.gram_inverse()
    n = L.rank
    gens = [LatticeVector(tuple(Ginv[i][j] for i in range(n))).mod1() for j in range(n)]
    zero = LatticeVector.zero(n)
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = (v + g).mod1()
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    if len(seen) != abs(L.det):
        raise ArithmeticError("discriminant group closure has the wrong order")
    mods = []
    for g in seen:
        if g == zero:
            continue
        norm, rep = coset_minimum(L, g)
        mods.append((norm / 2, tuple(rep.coords), rep))
    mods.sort(key=lambda t: (t[0], t[1]))
    out = [CosetModule(zero, Fraction(0), 0)]
    out += [CosetModule(rep, w, i + 1) for i, (w, _, rep) in enumerate(mods)]
    return tuple(out)


def enumerate_vectors(L: EvenLattice, gamma, norm_bound) -> list[LatticeVector]:
    """All ``lambda`` in ``L + gamma`` with ``<lambda, lambda> <= norm_bound``."""
    norm_bound = to_fraction(norm_bound)
    if norm_bound < 0:
        raise ValueError("norm bound must be nonnegative")
    gamma = gamma if isinstance(gamma, LatticeVector) else LatticeVector(gamma)
    d, shift = _scaled(gamma)
    bound = math.floor(norm_bound * d * d)
    vecs = kernels.short_vectors(_gram_array(L), shift, d, bound)
    rows = sorted(tuple(int(x) for x in v) for v in vecs)
    return [LatticeVector(tuple(Fraction(x, d) for x in r)) for r in rows]


# -- characters ---------------------------------------------------------------------------------


def _dual_pairing_vector(L: EvenLattice, v: LatticeVector):
    """Integer ``w`` and scale ``e`` with ``<v, y/d> = (w . y) / (d e)``."""
    n = L.rank
    Gv = [sum(L.gram[i][j] * v.coords[j] for j in range(n)) for i in range(n)]
    e = 1
    for x in Gv:
        e = math.lcm(e, x.denominator)
    return np.array([int(x * e) for x in Gv], dtype=np.int64), e


def _norm_bound(order: Fraction, d: int, shift_exp: Fraction) -> int:
    """Largest scaled norm ``N`` with ``N / (2 d^2) + shift_exp < order``."""
    lim = (order - shift_exp) * 2 * d * d
    return math.ceil(lim) - 1


def _hist(L, gamma, w, order, modulus=0, shift_exp=Fraction(0)):
    d, shift = _scaled(gamma)
    bound = _norm_bound(order, d, shift_exp)
    hist, offset = kernels.theta_histogram(_gram_array(L), shift, d, bound, w, modulus)
    return hist, offset, d, bound


def check_character_hypothesis(L: EvenLattice, h: LatticeVector, modules=None):
    """Raise unless ``<h, L + gamma>`` is integral for every requested coset."""
    w, e = _dual_pairing_vector(L, h)
    if e != 1:
        raise IntegralityViolation(f"<h, L> is not integral for h = {h}")
    for mod in modules if modules is not None else discriminant_group(L):
        if L.pair(h, mod.gamma).denominator != 1:
            raise IntegralityViolation(f"<h, gamma> is not integral for gamma = {mod.gamma}")


def _lcm_den(*dens):
    out = 1
    for d in dens:
        out = math.lcm(out, d)
    return out


def _module(L, j):
    mods = discriminant_group(L)
    if j is None:
        return mods[0]
    if isinstance(j, CosetModule):
        return j
    return mods[int(j)]


def theta_jacobi(L: EvenLattice, j, h, order) -> JacobiSeries:
    """``sum_{lambda in L+gamma} q^{<lambda,lambda>/2} zeta^{<h,lambda>}`` below ``q^order``."""
    mod = _module(L, j)
    h = h if isinstance(h, LatticeVector) else LatticeVector(h)
    check_character_hypothesis(L, h, [mod])
    return _theta_jacobi(L, mod.gamma, h, Fraction(order))


@lru_cache(maxsize=None)
def _theta_jacobi(L, gamma, h, order) -> JacobiSeries:
    w, _ = _dual_pairing_vector(L, h)
    hist, offset, d, _ = _hist(L, gamma, w, order)
    den = _lcm_den(DEFAULT_DEN, 2 * d * d, order.denominator)
    scale = den // (2 * d * d)
    # d * <h, lambda> = w . y, and the hypothesis makes it divisible by d
    coeffs = {}
    for N, P in zip(*np.nonzero(hist)):
        p = int(P) - offset
        if p % d:
            raise IntegralityViolation("non-integral zeta exponent in the coset theta series")
        coeffs[(int(N) * scale, p // d)] = int(hist[N, P])
    trunc = int(order * den)
    return JacobiSeries(Fraction(L.rank, 2), L.norm(h) / 2, coeffs, trunc, den).reduced()


@lru_cache(maxsize=None)
def _character(L, gamma, h, order) -> JacobiSeries:
    c = L.rank
    theta = _theta_jacobi(L, gamma, h, order + Fraction(c, 24))
    inv = eta_power(-c, order + Fraction(c, 24) + 1)
    out = theta.mul_q(inv, weight_shift=Fraction(-c, 2), eta_shift=-c).truncate(order)
    return out.reduced()


def character(L: EvenLattice, j=None, h=None, trunc=30) -> JacobiSeries:
    """``J_{j,h} = Theta_{L+gamma_j}(tau, z; h) / eta^rank`` to absolute order ``trunc``."""
    mod = _module(L, j)
    h = LatticeVector.zero(L.rank) if h is None else h
    h = h if isinstance(h, LatticeVector) else LatticeVector(h)
    check_character_hypothesis(L, h, [mod])
    return _character(L, mod.gamma, h, Fraction(trunc))


def characters(L: EvenLattice, h=None, trunc=30) -> list[JacobiSeries]:
    """The character vector over all of ``L*/L`` (one entry per module)."""
    h = LatticeVector.zero(L.rank) if h is None else h
    check_character_hypothesis(L, h)
    return [character(L, m, h, trunc) for m in discriminant_group(L)]


@dataclass(frozen=True)
class IndexReport:
    value: Fraction
    integral: bool
    coset: int | None
    passed: bool

    def to_json(self):
        return {"value": frac_str(self.value), "integral": self.integral, "coset": self.coset, "passed": self.passed}


def index_integrality(L: EvenLattice, h) -> IndexReport:
    """``<h,h>/2`` and a coset whose conformal weight agrees with it mod 1."""
    h = h if isinstance(h, LatticeVector) else LatticeVector(h)
    value = L.norm(h) / 2
    integral = value.denominator == 1
    mods = discriminant_group(L)
    hit = next((m.label for m in mods if (value - m.conformal_weight).denominator == 1), None)
    passed = integral if L.is_unimodular else hit is not None
    return IndexReport(value, integral, hit, passed)


# -- Miyamoto's Phi ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class MiyamotoPhi:
    """``Phi_j(u, v, tau)`` as an exact theta table over ``eta^rank``.

    ``theta`` carries ``e^{-pi i <u,v>} sum_{mu in L+gamma+u} e^{2 pi i <v,mu>} q^{<mu,mu>/2}``
    with coefficients in the ``modulus``-th cyclotomic field.
    """

    theta: PhasedSeries
    eta_power: int
    order: Fraction

    def evaluate(self, tau: complex):
        tv, te = self.theta.evaluate(tau)
        ev, ee = eta_power(self.eta_power, self.order - self.eta_power * Fraction(1, 24) + 1).evaluate(tau, warn=False)
        return tv * ev, abs(tv) * ee + abs(ev) * te


def phi_miyamoto(L: EvenLattice, j, u, v, trunc=30) -> MiyamotoPhi:
    mod = _module(L, j)
    u = u if isinstance(u, LatticeVector) else LatticeVector(u)
    v = v if isinstance(v, LatticeVector) else LatticeVector(v)
    return _phi(L, mod.gamma, u, v, Fraction(trunc))


@lru_cache(maxsize=None)
def _phi(L, gamma, u, v, order) -> MiyamotoPhi:
    c = L.rank
    shifted = gamma + u
    w, e = _dual_pairing_vector(L, v)
    d, _ = _scaled(shifted)
    half_uv = L.pair(u, v) / 2
    modulus = d * e
    modulus = _lcm_den(modulus, half_uv.denominator)
    lift = modulus // (d * e)
    theta_order = order + Fraction(c, 24)
    hist, _, d, _ = _hist(L, shifted, w, theta_order, modulus=d * e)
    den = _lcm_den(DEFAULT_DEN, 2 * d * d, theta_order.denominator)
    scale = den // (2 * d * d)
    base = int(-half_uv * modulus)
    table = {}
    for N, P in zip(*np.nonzero(hist)):
        row = table.setdefault(int(N) * scale, {})
        r = (int(P) * lift + base) % modulus
        row[r] = row.get(r, 0) + int(hist[N, P])
    theta = PhasedSeries.from_residues(table, int(theta_order * den), den, modulus)
    return MiyamotoPhi(theta, -c, order)


# -- twisted sectors and traces of exp(2 pi i h(0)/R) -------------------------------------------


def finite_order(L: EvenLattice, a: LatticeVector, max_order: int = MAX_ORDER) -> int:
    """Smallest ``R >= 1`` with ``R * a`` in ``L``."""
    R = a.denominator
    if R > max_order:
        raise InfiniteOrder(f"no R <= {max_order} with R*a in L for a = {a}")
    return R


@lru_cache(maxsize=None)
def _twisted(L, a, order) -> QSeries:
    c = L.rank
    theta_order = order + Fraction(c, 24)
    zero = np.zeros(L.rank, dtype=np.int64)
    hist, _, d, _ = _hist(L, a, zero, theta_order)
    den = _lcm_den(DEFAULT_DEN, 2 * d * d, theta_order.denominator)
    scale = den // (2 * d * d)
    counts = hist[:, 0]
    coeffs = {int(N) * scale: int(counts[N]) for N in np.nonzero(counts)[0]}
    theta = QSeries(coeffs, int(theta_order * den), den)
    out = theta * eta_power(-c, theta_order + 1)
    return out.truncate(order).reduced()


def twisted_character(L: EvenLattice, a, trunc=30, max_order: int = MAX_ORDER) -> QSeries:
    """``sum_{lambda in L+a} q^{<lambda,lambda>/2} / eta^rank`` (the ``g``-twisted module)."""
    a = a if isinstance(a, LatticeVector) else LatticeVector(a)
    finite_order(L, a, max_order)
    return _twisted(L, a.mod1(), Fraction(trunc))


def trace_Z(L: EvenLattice, h, R: int, trunc=30) -> PhasedSeries:
    """``Tr_V g q^{L(0)-c/24}`` for ``g = exp(2 pi i h(0)/R)``: the character at ``zeta = e^{2 pi i/R}``."""
    h = h if isinstance(h, LatticeVector) else LatticeVector(h)
    if not h.is_integral():
        raise IntegralityViolation(f"h = {h} is not a lattice vector")
    if R < 1:
        raise ValueError("R must be a positive integer")
    return character(L, 0, h, trunc).specialize_root_of_unity(int(R))
