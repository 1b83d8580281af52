import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from jacobivoa import verify
from jacobivoa.errors import HypothesisViolated, PermutationMismatch, PrecisionLoss, UnstableFit
from jacobivoa.jacobi import JacobiSeries, gen_phi_0_1, gen_phi_m2_1
from jacobivoa.lattice import EvenLattice, LatticeVector, character, characters
from jacobivoa.verify import SamplePoint

F = Fraction
E8 = EvenLattice.named("E8")
A1 = EvenLattice.named("A1")
ROOT = LatticeVector.basis(8, 0)
ALPHA = LatticeVector((1,))


@pytest.fixture(scope="module")
def e8():
    return character(E8, 0, ROOT, 20)


@pytest.fixture(scope="module")
def a1():
    return characters(A1, ALPHA, 20)


def test_sample_point_validation():
    with pytest.raises(ValueError):
        SamplePoint(-1j)
    p = SamplePoint(0.3 + 1.1j, 0.2)
    assert SamplePoint.from_json(p.to_json()) == p


def test_eval_jacobi_guards(e8):
    with pytest.raises(HypothesisViolated):
        verify.eval_jacobi(e8, SamplePoint(0.5j))
    with pytest.raises(HypothesisViolated):
        verify.eval_jacobi(e8, SamplePoint(1j, 0.7j))
    with pytest.raises(PrecisionLoss):
        verify.eval_jacobi(character(E8, 0, ROOT, 1), SamplePoint(1j), tol=1e-12)


def test_eval_jacobi_matches_theta_at_z0(e8):
    # J_h(i, 0) equals the E4/eta^8 value at i
    v, err = verify.eval_jacobi(e8, SamplePoint(1j))
    from jacobivoa.modular import eisenstein
    from jacobivoa.series import eta

    e4, _ = eisenstein(4, 20).expansion.evaluate(1j)
    et, _ = eta(20).evaluate(1j)
    assert abs(v - e4 / et**8) < 1e-10
    assert err < 1e-10


@pytest.mark.parametrize("gamma", ["S", "T"])
@pytest.mark.parametrize("gen", [gen_phi_m2_1, gen_phi_0_1])
def test_generators_are_modular(gamma, gen):
    r = verify.check_modular(gen(20), gamma)
    assert r.passed and r.max_residual < 1e-9
    if gamma == "S":
        assert abs(complex(*r.fitted["chi"]) - 1) < 1e-9


def test_e8_fitted_constants(e8):
    S = verify.check_modular(e8, "S")
    T = verify.check_modular(e8, "T")
    assert S.passed and T.passed
    assert abs(complex(*S.fitted["chi"]) - 1) < 1e-9
    assert T.fitted["chi_order"] == 3
    assert T.fitted["exponent_mod_1"] == ["2/3"]
    assert abs(complex(*T.fitted["chi"]) - cmath.exp(-2j * cmath.pi / 3)) < 1e-12


def test_a1_s_matrix(a1):
    r = verify.check_modular(a1, "S")
    A = np.array([[complex(*x) for x in row] for row in r.fitted["matrix"]])
    assert np.allclose(A, np.array([[1, 1], [1, -1]]) / math.sqrt(2), atol=1e-9)
    assert r.fitted["deviation"] < 1e-9


def test_a1_t_phases(a1):
    r = verify.check_modular(a1, "T")
    assert r.fitted["exponent_mod_1"] == ["23/24", "5/24"]


def test_unstable_fit_is_reported():
    fake = JacobiSeries(F(0), F(0), {(0, 0): F(1), (24, 0): F(1)})
    with pytest.raises(UnstableFit) as exc:
        verify.check_modular(fake, "S")
    assert exc.value.report is not None and not exc.value.report.passed


def test_unknown_generator(e8):
    with pytest.raises(ValueError):
        verify.check_modular(e8, "U")


def test_non_integral_weight_rejected():
    half = JacobiSeries(F(1, 2), F(0), {(1, 0): F(1)})
    with pytest.raises(HypothesisViolated):
        verify.check_modular(half, "S")


@pytest.mark.parametrize("u, v", [(1, 0), (-1, 1), (2, 0)])
def test_elliptic_numeric(e8, u, v):
    r = verify.check_elliptic_numeric(e8, u, v)
    assert r.passed and r.fitted["permutation"] == [0]


def test_elliptic_vector(a1):
    r = verify.check_elliptic_numeric(a1, 1, 1)
    assert r.passed and r.fitted["permutation"] == [0, 1]


def test_permutation_mismatch():
    lone = JacobiSeries(F(0), F(1), {(0, 1): F(1)})
    with pytest.raises(PermutationMismatch):
        verify.check_elliptic_numeric(lone, 1, 0)


def test_report_json(e8):
    data = verify.check_modular(e8, "T").to_json()
    assert set(data) == {"equation", "verdict", "residuals", "fitted", "order", "tol", "points"}
    assert data["verdict"] == "pass"
    assert len(data["residuals"]) == len(data["points"])


@pytest.mark.parametrize("R", [1, 2, 3])
def test_theorem3(R):
    r = verify.theorem3_check(E8, ROOT, R, trunc=20)
    assert r.passed
    assert r.fitted["invariant_under_24R"]


def test_theorem3_periods():
    r = verify.theorem3_check(E8, ROOT, 2, trunc=20)
    assert r.fitted["trace_period"] == 3
    assert r.fitted["twisted_period"] == 12


def test_theorem3_needs_unimodular():
    with pytest.raises(HypothesisViolated):
        verify.theorem3_check(A1, ALPHA, 2)


@pytest.mark.parametrize("gamma", ["S", "T"])
def test_miyamoto_e8(gamma):
    r = verify.check_miyamoto_recursion(E8, ROOT / 2, ROOT / 3, gamma, trunc=20)
    assert r.passed and r.max_residual < 1e-5


def test_miyamoto_a1_with_given_matrix():
    A = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    r = verify.check_miyamoto_recursion(A1, (F(1, 3),), (F(1, 4),), "S", matrix=A, trunc=20)
    assert r.passed


def test_miyamoto_wrong_matrix_fails():
    r = verify.check_miyamoto_recursion(A1, (F(1, 3),), (F(1, 4),), "S", matrix=np.eye(2), trunc=20)
    assert not r.passed
