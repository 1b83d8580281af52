"""Acceptance gate: twelve end-to-end criteria, each printing one status line."""

import random
import time
from fractions import Fraction

import pytest

from jacobivoa import linalg, verify
from jacobivoa.jacobi import (
    LeadingPolynomial,
    Verdict,
    classify,
    codim_sum,
    combine,
    dim_true,
    dim_weak,
    elliptic_symmetry_check,
    eta_multiply,
    gen_phi_0_1,
    gen_phi_m2_1,
    leading_polynomial,
    q_basis,
    structure_map,
)
from jacobivoa.lattice import EvenLattice, LatticeVector, character, characters, index_integrality
from jacobivoa.modular import _e4_e6_power, dim_Mk, monomials
from jacobivoa.verify import SamplePoint

F = Fraction
E8 = EvenLattice.named("E8")
A1 = EvenLattice.named("A1")
ROOT = LatticeVector.basis(8, 0)
ALPHA = LatticeVector((1,))


@pytest.fixture
def status(capsys):
    def emit(n, ok, detail=""):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'pass' if ok else 'fail'}{'  ' + detail if detail else ''}")
        assert ok, detail

    return emit


def support_bound_holds(phi):
    m = phi.index
    return all(r * r <= 4 * m * F(n, phi.den) for n, r in phi.coeffs)


def test_criterion_1_generator_leading_terms(status):
    gen_phi_m2_1.cache_clear()
    gen_phi_0_1.cache_clear()
    t0 = time.perf_counter()
    a, b = gen_phi_m2_1(30), gen_phi_0_1(30)
    elapsed = time.perf_counter() - t0
    ok = a.layer(0) == {-1: 1, 0: -2, 1: 1} and b.layer(0) == {-1: 1, 0: 10, 1: 1} and elapsed < 1
    status(1, ok, f"{elapsed:.2f}s")


def test_criterion_2_structure_injectivity(status):
    t0 = time.perf_counter()
    ranks = {}
    for k, m in [(4, 1), (4, 2), (6, 2), (4, 3), (4, 4)]:
        target = sum(dim_Mk(k + 2 * i) for i in range(m + 1))
        trunc = max(target, 3)
        images = []
        for i in range(m + 1):
            for a, b in monomials(k + 2 * i):
                f = [None] * (m + 1)
                f[i] = _e4_e6_power(a, b, trunc)
                images.append(structure_map(f, k, m, trunc))
        keys = sorted({key for img in images for key in img.coeffs})
        rank = linalg.rank([[img.coeffs.get(key, 0) for key in keys] for img in images])
        ranks[(k, m)] = rank == target
    elapsed = time.perf_counter() - t0
    status(2, all(ranks.values()) and elapsed < 30, f"{elapsed:.2f}s")


def test_criterion_3_codimension(status):
    ok = [codim_sum(m) for m in (1, 2, 3, 4)] == [1, 2, 3, 4]
    ok &= codim_sum(5) == 6
    ok &= dim_true(10, 1) == dim_weak(10, 1) - 1
    status(3, ok)


def test_criterion_4_q_basis(status):
    ok = True
    for k in (4, 6):
        for m in (1, 2, 3, 4):
            for i, q in enumerate(q_basis(k, m, 6)):
                ok &= leading_polynomial(q) == LeadingPolynomial.monomial(i)
    status(4, ok)


def test_criterion_5_constant_term_criterion(status):
    k, m, order = 4, 1, 25
    Q = q_basis(k, m, order)
    rs = sorted({r for q in Q for r in q.layer(0) if r != 0})
    null = linalg.nullspace([[q.layer(0).get(r, 0) for q in Q] for r in rs], len(Q))
    rng = random.Random(20261014)
    ok = True
    for _ in range(100):
        # random rational coefficients, projected onto the constraint subspace
        weights = [F(rng.randint(-999, 999), rng.randint(1, 99)) for _ in null]
        coeffs = [sum(w * v[i] for w, v in zip(weights, null)) for i in range(len(Q))]
        phi = combine(Q, coeffs)
        ok &= all(phi.layer(0).get(r, 0) == 0 for r in rs)
        ok &= phi.order >= order and support_bound_holds(phi)
    status(5, ok, f"nullspace dim {len(null)}")


def test_criterion_6_e8_eta8(status):
    t0 = time.perf_counter()
    th = eta_multiply(character(E8, 0, ROOT, 25), 8)
    elapsed = time.perf_counter() - t0
    ok = (th.weight, th.index) == (4, 1) and th.order >= 25
    ok &= all(n % th.den == 0 for n, _ in th.coeffs) and support_bound_holds(th)
    ok &= th.layer(0) == {0: 1}
    ok &= classify(th).verdict is Verdict.TRUE_JACOBI
    status(6, ok and elapsed < 10, f"{elapsed:.2f}s")


def test_criterion_7_index_integrality(status):
    rng = random.Random(7)
    ok = True
    for _ in range(50):
        h = LatticeVector(tuple(rng.randint(-4, 4) for _ in range(8)))
        ok &= (E8.norm(h) / 2).denominator == 1
    rep = index_integrality(A1, ALPHA)
    ok &= rep.coset is not None and rep.passed
    status(7, ok, f"A1 coset {rep.coset}")


def test_criterion_8_e8_modular(status):
    J = character(E8, 0, ROOT, 30)
    S = verify.check_modular(J, "S")
    T = verify.check_modular(J, "T")
    chi_s = complex(*S.fitted["chi"])
    phase = F(T.fitted["exponent_mod_1"][0])
    ok = S.passed and T.passed and max(S.max_residual, T.max_residual) < 1e-6
    ok &= abs(chi_s - 1) < 1e-6 and (3 * phase).denominator == 1
    status(8, ok, f"S {S.max_residual:.1e}, T {T.max_residual:.1e}, chi(T) order {T.fitted['chi_order']}")


def test_criterion_9_a1_vector(status):
    r = verify.check_modular(characters(A1, ALPHA, 30), "S")
    ok = r.passed and r.stable and r.fitted["deviation"] < 1e-6 and r.max_residual < 1e-6
    status(9, ok, f"deviation {r.fitted['deviation']:.1e}")


def test_criterion_10_elliptic(status):
    forms = {"E8": character(E8, 0, ROOT, 20), "phi_m2_1": gen_phi_m2_1(20), "phi_0_1": gen_phi_0_1(20)}
    ok, worst = True, 0.0
    for phi in forms.values():
        ok &= elliptic_symmetry_check(phi, range(-2, 3)).passed
        for u, v in [(1, 0), (-1, 1), (2, 0)]:
            r = verify.check_elliptic_numeric(phi, u, v)
            ok &= r.passed and r.max_residual < 1e-6
            worst = max(worst, r.max_residual)
    status(10, ok, f"max residual {worst:.1e}")


def test_criterion_11_twisted_trace_at_s_tau(status):
    points = [SamplePoint(1j), SamplePoint(0.3 + 1.1j), SamplePoint(-0.25 + 0.95j)]
    r2 = verify.theorem3_check(E8, ROOT, 2, points)
    r1 = verify.theorem3_check(E8, ROOT, 1, points)
    ok = r2.passed and r2.max_residual < 1e-6 and r1.passed
    status(11, ok, f"R=2 {r2.max_residual:.1e}, R=1 {r1.max_residual:.1e}")


@pytest.mark.parametrize("L, pairs", [
    (E8, [(ROOT / 2, ROOT / 3), (ROOT / 4, LatticeVector.zero(8) - ROOT / 5)]),
    (A1, [((F(1, 3),), (F(1, 4),)), ((F(-1, 5),), (F(1, 2),))]),
])
def test_criterion_12_miyamoto(status, L, pairs):
    fit_points = verify.default_points(zs=(0.0,)) + verify.holdout_points(zs=(0.0,))
    A, dev = verify.fit_phi_matrix(L, "S", fit_points)
    ok, worst = dev < 1e-6, 0.0
    for u, v in pairs:
        r = verify.check_miyamoto_recursion(L, u, v, "S", matrix=A)
        ok &= r.passed and r.max_residual < 1e-5
        worst = max(worst, r.max_residual)
    status(12, ok, f"{L.name} max residual {worst:.1e}")
