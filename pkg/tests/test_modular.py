from fractions import Fraction

import pytest

import oracles
from jacobivoa import linalg
from jacobivoa.errors import BadWeight
from jacobivoa.modular import (
    ModularForm,
    _e4_e6_power,
    basis_Mk,
    bernoulli,
    delta,
    dim_Mk,
    eisenstein,
    monomials,
)
from jacobivoa.series import QSeries


@pytest.mark.parametrize("n, b", [(0, 1), (1, Fraction(-1, 2)), (2, Fraction(1, 6)), (4, Fraction(-1, 30)), (12, Fraction(-691, 2730))])
def test_bernoulli(n, b):
    assert bernoulli(n) == b


@pytest.mark.parametrize("k, factor, power", [(4, 240, 3), (6, -504, 5), (8, 480, 7), (10, -264, 9)])
def test_eisenstein_against_divisor_sums(k, factor, power):
    E = eisenstein(k, 20)
    assert E[0] == 1
    assert [E[n] for n in range(1, 20)] == [factor * oracles.sigma(power, n) for n in range(1, 20)]


@pytest.mark.parametrize("k", [2, 3, 5, -4])
def test_eisenstein_bad_weight(k):
    with pytest.raises(BadWeight):
        eisenstein(k)


def test_delta_leading_terms():
    d = delta(10)
    assert d.weight == 12
    assert d[0] == 0 and d[1] == 1 and d[2] == -24
    e4, e6 = eisenstein(4, 10), eisenstein(6, 10)
    assert ((e4 * e4 * e4).expansion - (e6 * e6).expansion)[0] == 0


@pytest.mark.parametrize("k, d", [(0, 1), (2, 0), (4, 1), (12, 2), (14, 1), (24, 3), (26, 2), (-2, 0), (7, 0)])
def test_dim_Mk_values(k, d):
    assert dim_Mk(k) == d


@pytest.mark.parametrize("k", range(0, 42, 2))
def test_dim_Mk_is_monomial_rank(k):
    n = max(k // 4, 1) + 1
    rows = [_e4_e6_power(a, b, n).coefficients(n) for a, b in monomials(k)]
    assert (linalg.rank(rows) if rows else 0) == dim_Mk(k)


@pytest.mark.parametrize("k", [0, 4, 12, 24, 36])
def test_basis_is_echelon_and_independent(k):
    B = basis_Mk(k, 20)
    assert len(B) == dim_Mk(k)
    d = len(B)
    for i, f in enumerate(B):
        assert f.weight == k
        assert f.coefficients(d) == [int(i == j) for j in range(d)]
    assert linalg.rank([f.coefficients(20) for f in B]) == d


def test_basis_of_weight_12_contains_delta():
    B = basis_Mk(12, 10)
    assert B[1].expansion.agrees_with(delta(10).expansion)


def test_modular_form_validation():
    with pytest.raises(BadWeight):
        ModularForm(3, QSeries.constant(1, trunc=5))
    with pytest.raises(ValueError):
        ModularForm(4, QSeries({-24: 1}, trunc=48))
