"""Level one holomorphic modular forms with exact q-expansions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from . import linalg
from .errors import BadWeight
from .series import DEFAULT_DEN, QSeries


@dataclass(frozen=True, eq=False)
class ModularForm:
    weight: int
    expansion: QSeries

    def __post_init__(self):
        if self.weight % 2:
            raise BadWeight(f"level one forms have even weight, got {self.weight}")
        for e, _ in self.expansion.terms():
            if e < 0 or e.denominator != 1:
                raise ValueError("modular form expansions use nonnegative integer powers of q")

    def __getitem__(self, n):
        return self.expansion[n]

    def __mul__(self, other):
        if isinstance(other, ModularForm):
            return ModularForm(self.weight + other.weight, self.expansion * other.expansion)
        return ModularForm(self.weight, self.expansion.scale(other))

    __rmul__ = __mul__

    def __add__(self, other):
        if other.weight != self.weight:
            raise BadWeight("cannot add forms of different weight")
        return ModularForm(self.weight, self.expansion + other.expansion)

    def __sub__(self, other):
        return self + other * -1

    def coefficients(self, n: int) -> list[Fraction]:
        """``[a_0, ..., a_{n-1}]``."""
        return [self.expansion[k] for k in range(n)]


def _q_series(coeffs, trunc) -> QSeries:
    return QSeries({DEFAULT_DEN * n: c for n, c in enumerate(coeffs)}, DEFAULT_DEN * trunc)


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n (with B_1 = -1/2)."""
    if n == 0:
        return Fraction(1)
    return -sum(comb(n + 1, k) * bernoulli(k) for k in range(n)) / (n + 1)


def divisor_sums(power: int, n_terms: int) -> list[int]:
    """``sigma_power(n)`` for ``0 <= n < n_terms`` with ``sigma(0) = 0``."""
    out = [0] * n_terms
    for d in range(1, n_terms):
        dp = d**power
        for m in range(d, n_terms, d):
            out[m] += dp
    return out


@lru_cache(maxsize=None)
def eisenstein(k: int, trunc: int = 30) -> ModularForm:
    """Normalized Eisenstein series ``E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n``."""
    if k % 2 or k < 4:
        raise BadWeight(f"Eisenstein series need even weight >= 4, got {k}")
    factor = Fraction(-2 * k) / bernoulli(k)
    sig = divisor_sums(k - 1, trunc)
    coeffs = [Fraction(1)] + [factor * s for s in sig[1:]]
    return ModularForm(k, _q_series(coeffs, trunc))


@lru_cache(maxsize=None)
def delta(trunc: int = 30) -> ModularForm:
    e4, e6 = eisenstein(4, trunc), eisenstein(6, trunc)
    return ModularForm(12, ((e4 * e4 * e4).expansion - (e6 * e6).expansion).scale(Fraction(1, 1728)))


def constant_form(c=1, trunc: int = 30) -> ModularForm:
    return ModularForm(0, QSeries.constant(c, trunc=trunc))


def zero_form(k: int, trunc: int = 30) -> ModularForm:
    return ModularForm(k, QSeries({}, DEFAULT_DEN * trunc))


def dim_Mk(k: int) -> int:
    if k < 0 or k % 2:
        return 0
    if k % 12 == 2:
        return k // 12
    return k // 12 + 1


def monomials(k: int) -> list[tuple[int, int]]:
    """Exponent pairs ``(a, b)`` with ``4a + 6b = k``, ``a`` descending."""
    return [(a, (k - 4 * a) // 6) for a in range(k // 4, -1, -1) if (k - 4 * a) % 6 == 0]


@lru_cache(maxsize=None)
def _e4_e6_power(a: int, b: int, trunc: int) -> ModularForm:
    out = constant_form(1, trunc)
    for _ in range(a):
        out = out * eisenstein(4, trunc)
    for _ in range(b):
        out = out * eisenstein(6, trunc)
    return out


@lru_cache(maxsize=None)
def basis_Mk(k: int, trunc: int = 30) -> tuple[ModularForm, ...]:
    """Echelonized monomial basis: the j-th form is ``q^j + O(q^dim)``."""
    if k % 2 or k < 0:
        raise BadWeight(f"need even nonnegative weight, got {k}")
    dim = dim_Mk(k)
    if dim == 0:
        return ()
    if trunc < dim:
        raise ValueError(f"truncation {trunc} too small for a basis of M_{k}")
    mons = [_e4_e6_power(a, b, trunc) for a, b in monomials(k)]
    rows = [m.coefficients(dim) for m in mons]
    if linalg.rank(rows) != dim:
        raise ArithmeticError(f"monomials of weight {k} do not span M_{k}")
    # C * rows = identity, so row i of C combines the monomials into q^i + O(q^dim)
    C = linalg.inverse(rows)
    forms = []
    for i in range(dim):
        f = zero_form(k, trunc)
        for coef, m in zip(C[i], mons):
            if coef:
                f = f + m * coef
        forms.append(f)
    return tuple(forms)
