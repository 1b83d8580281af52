import random
from fractions import Fraction

import numpy as np
import pytest

import oracles
from jacobivoa.errors import InfiniteOrder, IntegralityViolation, InvalidLattice
from jacobivoa.jacobi import Verdict, classify, elliptic_symmetry_check, eta_multiply, match_elliptic_permutation
from jacobivoa.lattice import (
    EvenLattice,
    LatticeVector,
    character,
    characters,
    discriminant_group,
    enumerate_vectors,
    finite_order,
    index_integrality,
    parse_vector,
    phi_miyamoto,
    theta_jacobi,
    trace_Z,
    twisted_character,
)
from jacobivoa.series import eta_power

F = Fraction
E8 = EvenLattice.named("E8")
A1 = EvenLattice.named("A1")
A1E8 = EvenLattice.named("A1+E8")
ROOT = LatticeVector.basis(8, 0)
ALPHA = LatticeVector((1,))


# -- lattices -------------------------------------------------------------------------------


def test_named_lattices():
    assert E8.rank == 8 and E8.det == 1 and E8.is_unimodular
    assert A1.det == 2
    assert A1E8.rank == 9 and A1E8.det == 2


@pytest.mark.parametrize("gram", [
    [[2, 1], [0, 2]],
    [[3]],
    [[2, 3], [3, 2]],
    [[0]],
    [],
])
def test_invalid_lattices(gram):
    with pytest.raises(InvalidLattice):
        EvenLattice(tuple(map(tuple, gram)))


def test_json_loader(tmp_path):
    p = tmp_path / "a2.json"
    p.write_text('{"gram": [[2, -1], [-1, 2]]}')
    L = EvenLattice.load(str(p))
    assert L.det == 3
    assert EvenLattice.from_json(L.to_json()) == L


def test_parse_vector():
    assert parse_vector("1,0,0,0,0,0,0,0", E8) == ROOT
    assert parse_vector("1,0,0,0,0,0,0,0basis", E8) == ROOT
    assert parse_vector("root", E8) == ROOT
    assert parse_vector("h/2", E8, {"h": ROOT}) == ROOT / 2
    assert parse_vector("2h", E8, {"h": ROOT}) == ROOT * 2
    assert parse_vector("e3", E8) == LatticeVector.basis(8, 2)
    with pytest.raises(ValueError):
        parse_vector("1,2", E8)


# -- discriminant group ---------------------------------------------------------------------------


def test_discriminant_group_unimodular():
    mods = discriminant_group(E8)
    assert len(mods) == 1 and mods[0].conformal_weight == 0


def test_discriminant_group_a1():
    mods = discriminant_group(A1)
    assert [m.gamma for m in mods] == [LatticeVector((0,)), LatticeVector((F(1, 2),))]
    assert [m.conformal_weight for m in mods] == [0, F(1, 4)]


@pytest.mark.parametrize("gram, weights", [
    (((2, -1), (-1, 2)), [0, F(1, 3), F(1, 3)]),
    (((2, -1, 0, 0), (-1, 2, -1, -1), (0, -1, 2, 0), (0, -1, 0, 2)), [0, F(1, 2), F(1, 2), F(1, 2)]),
    (((4,),), [0, F(1, 8), F(1, 8), F(1, 2)]),
])
def test_discriminant_group_conformal_weights(gram, weights):
    mods = discriminant_group(EvenLattice(gram))
    assert sorted(m.conformal_weight for m in mods) == weights
    assert mods[0].conformal_weight == 0


# -- enumeration ------------------------------------------------------------------------------------


def test_enumerate_e8_roots():
    assert len(enumerate_vectors(E8, [0] * 8, 2)) == 241


def test_enumerate_a1():
    assert enumerate_vectors(A1, [0], 2) == [LatticeVector((-1,)), LatticeVector((0,)), LatticeVector((1,))]


def test_enumerate_bound_zero():
    assert enumerate_vectors(E8, [0] * 8, 0) == [LatticeVector.zero(8)]
    assert enumerate_vectors(A1, [F(1, 2)], 0) == []


def test_enumerate_against_box():
    gamma = LatticeVector((F(1, 2), 0, F(1, 3)))
    L = EvenLattice(((2, 1, 0), (1, 4, 1), (0, 1, 6)))
    got = enumerate_vectors(L, gamma, F(20, 3))
    box = oracles.box_vectors(L.gram, (3, 0, 2), 6, int(F(20, 3) * 36))
    assert [tuple(int(c * 6) for c in v.coords) for v in got] == box


# -- characters -------------------------------------------------------------------------------------


def test_e8_character_h0():
    J = character(E8, 0, None, 5)
    assert J.index == 0 and J.weight == 0
    assert J[F(-1, 3), 0] == 1
    assert J.n_values()[0] == F(-1, 3)


def test_e8_character_root():
    J = character(E8, 0, ROOT, 10)
    assert J.index == 1
    assert J[F(-1, 3), 1] == 0 and J[F(-1, 3), -1] == 0
    assert J[F(2, 3), 2] == 1 and J[F(2, 3), -2] == 1


def test_e8_character_against_oracle():
    N = 7
    J = character(E8, 0, ROOT, F(N) - F(1, 3))
    table = {(F(n, J.den) + F(1, 3), r): c for (n, r), c in J.coeffs.items()}
    assert table == {(F(k), r): c for (k, r), c in oracles.e8_character_table(N).items()}


@pytest.mark.parametrize("j", [0, 1])
def test_a1_characters_against_oracle(j):
    J = character(A1, j, ALPHA, 12)
    expected = oracles.a1_character(j, 2, 12)
    table = {(F(n, J.den) + F(1, 24), r): c for (n, r), c in J.coeffs.items()}
    assert table == {k: v for k, v in expected.items() if k[0] - F(1, 24) < 12}


def test_character_exponent_classes():
    for L in (A1, A1E8):
        for mod in discriminant_group(L):
            J = character(L, mod, None, 6)
            classes = {e % 1 for e in J.n_values()}
            assert classes == {(mod.conformal_weight - F(L.rank, 24)) % 1}


def test_character_integrality_violation():
    with pytest.raises(IntegralityViolation):
        character(E8, 0, ROOT / 2, 5)
    # alpha/2 pairs to 1/2 with alpha/2
    with pytest.raises(IntegralityViolation):
        characters(A1, LatticeVector((F(1, 2),)), 5)


def test_theta_count_consistency():
    # eta^rank * J equals the theta series, built independently of the eta division
    J = character(A1E8, 1, None, 8)
    theta = theta_jacobi(A1E8, 1, LatticeVector.zero(9), 8 + F(9, 24))
    assert eta_multiply(J, 9).agrees_with(theta)
    assert J.agrees_with(theta.mul_q(eta_power(-9, 10)))


def test_e8_times_eta8_is_true_jacobi():
    J = character(E8, 0, ROOT, 25)
    th = eta_multiply(J, 8)
    assert th.weight == 4 and th.index == 1 and th.eta_power == 0
    assert th.layer(0) == {0: 1}
    assert classify(th).verdict is Verdict.TRUE_JACOBI
    assert th.agrees_with(theta_jacobi(E8, 0, ROOT, th.order))


@pytest.mark.parametrize("L, h", [(E8, ROOT), (A1, ALPHA), (A1E8, LatticeVector((1,) + (0,) * 8)), (A1E8, LatticeVector((1, 0, 1, 0, 0, 0, 0, 0, -1)))])
def test_characters_elliptic_symmetry(L, h):
    J = characters(L, h, 10)
    for phi in J:
        assert elliptic_symmetry_check(phi, range(-2, 3)).passed
    for u in (-2, -1, 1, 2):
        assert match_elliptic_permutation(J, u) == [[i] for i in range(len(J))]


def test_unimodular_support_bound():
    rng = random.Random(7)
    for _ in range(3):
        h = LatticeVector(tuple(rng.randint(-1, 1) for _ in range(8)))
        if h == LatticeVector.zero(8):
            continue
        th = eta_multiply(character(E8, 0, h, 8), 8)
        assert all(n % th.den == 0 for n, _ in th.coeffs)
        assert classify(th).verdict is Verdict.TRUE_JACOBI


# -- index integrality ------------------------------------------------------------------------------


def test_index_integrality_e8_random():
    rng = random.Random(2024)
    for _ in range(50):
        h = LatticeVector(tuple(rng.randint(-3, 3) for _ in range(8)))
        rep = index_integrality(E8, h)
        assert rep.integral and rep.passed


def test_index_integrality_examples():
    assert index_integrality(E8, ROOT).value == 1
    assert index_integrality(E8, 2 * ROOT).value == 4
    rep = index_integrality(A1, ALPHA)
    assert rep.value == 1 and rep.coset == 0 and rep.passed


def test_index_integrality_all_small_h():
    for t in range(-3, 4):
        assert index_integrality(A1, LatticeVector((t,))).passed
    for h in enumerate_vectors(A1E8, [0] * 9, 4):
        assert index_integrality(A1E8, h).passed


# -- Miyamoto Phi -----------------------------------------------------------------------------------


def test_phi_zero_is_character():
    for j in (0, 1):
        P = phi_miyamoto(A1, j, (0,), (0,), 10)
        J = character(A1, j, None, 10)
        for tau in (1j, 0.3 + 1.1j):
            assert abs(P.evaluate(tau)[0] - J.evaluate(tau)[0]) < 1e-12


@pytest.mark.parametrize("R", [1, 2, 3, 5])
def test_phi_at_zh_matches_character_exactly(R):
    # Phi_0(0, h/R) is J_h(tau, 1/R): compare the exact cyclotomic tables
    P = phi_miyamoto(E8, 0, [0] * 8, ROOT / R, 6)
    theta = eta_multiply(character(E8, 0, ROOT, 6), 8).specialize_root_of_unity(R)
    a = {e: P.theta.coefficient(e) for e in P.theta.exponents()}
    b = {e: theta.coefficient(e) for e in theta.exponents() if e < P.theta.order}
    assert a == b


def test_phi_shifted_lowest_exponent():
    P = phi_miyamoto(E8, 0, ROOT, [0] * 8, 5)
    assert P.theta.exponents()[0] == 0  # mu = lambda + h vanishes at lambda = -h
    assert P.theta.exponents()[0] - F(1, 3) == F(-1, 3)


# -- twisted sectors ------------------------------------------------------------------------------


def test_twisted_trivial_cases():
    base = character(E8, 0, None, 6).at_z0()
    assert twisted_character(E8, [0] * 8, 6).agrees_with(base)
    assert twisted_character(E8, ROOT, 6).agrees_with(base)


def test_twisted_e8_half_root():
    T = twisted_character(E8, ROOT / 2, 6)
    assert T.valuation() == F(1, 4) - F(1, 3)
    assert T[F(-1, 12)] == 2


def test_twisted_infinite_order():
    with pytest.raises(InfiniteOrder):
        finite_order(E8, LatticeVector((F(1, 1001),) + (0,) * 7))


def test_trace_z_r1_is_collapse():
    assert trace_Z(E8, ROOT, 1, 6).coeffs == {
        n: (c,) for n, c in character(E8, 0, ROOT, 6).at_z0().coeffs.items()
    }


def test_trace_z_r2_coefficient():
    Z = trace_Z(E8, ROOT, 2, 6)
    J = character(E8, 0, ROOT, 6)
    signed = sum(c * (-1) ** (r % 2) for r, c in J.layer(F(2, 3)).items())
    assert Z.coefficient(F(2, 3)) == (signed,)
    # 126 + 2 - 112 signed roots plus 8 from eta^-8
    assert signed == 24
    assert Z.period() == 3 and 24 % Z.period() == 0


def test_trace_z_requires_lattice_vector():
    with pytest.raises(IntegralityViolation):
        trace_Z(E8, ROOT / 2, 2, 5)
