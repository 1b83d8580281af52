"""Numeric checks of the modular, elliptic and twisted-sector transformation laws.

Every check evaluates exact expansions at sample points and returns a
:class:`TransformReport`. Residuals pass when they are below
``max(tol, 10 * summed error estimate)`` so honest truncation error never
causes a failure.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import HypothesisViolated, PermutationMismatch, PrecisionLoss, UnstableFit
from .jacobi import JacobiSeries, match_elliptic_permutation
from .lattice import (
    EvenLattice,
    LatticeVector,
    discriminant_group,
    finite_order,
    phi_miyamoto,
    trace_Z,
    twisted_character,
)

MIN_IM = 0.8
MAX_IM_Z = 0.5
DEFAULT_TOL = 1e-6
ERROR_FACTOR = 10.0

DEFAULT_TAUS = (1j, 0.3 + 1.1j, -0.25 + 0.95j)
DEFAULT_ZS = (0.0, 0.2, 0.1 + 0.05j)
# extra points for fitting and hold-out; all keep Im(tau) and Im(-1/tau) >= 0.8
EXTRA_TAUS = (0.1 + 1.0j, -0.2 + 1.05j, 0.2 + 0.9j, -0.1 + 0.85j, 0.35 + 1.0j)


@dataclass(frozen=True)
class SamplePoint:
    tau: complex
    z: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "tau", complex(self.tau))
        object.__setattr__(self, "z", complex(self.z))
        if self.tau.imag <= 0:
            raise ValueError(f"tau = {self.tau} is not in the upper half plane")

    def to_json(self):
        return {"tau": [self.tau.real, self.tau.imag], "z": [self.z.real, self.z.imag]}

    @classmethod
    def from_json(cls, data):
        def cx(v):
            if isinstance(v, (list, tuple)):
                return complex(v[0], v[1])
            return complex(v)

        return cls(cx(data["tau"]), cx(data.get("z", 0.0)))


def default_points(zs=DEFAULT_ZS):
    return [SamplePoint(t, z) for t in DEFAULT_TAUS for z in zs]


def holdout_points(zs=DEFAULT_ZS):
    return [SamplePoint(t, z) for t in EXTRA_TAUS for z in zs]


def _cx(v: complex):
    return [float(v.real), float(v.imag)]


@dataclass
class TransformReport:
    equation: str
    points: list
    residuals: list
    budgets: list
    fitted: dict = field(default_factory=dict)
    order: int | None = None
    tol: float = DEFAULT_TOL
    stable: bool = True

    @property
    def passed(self) -> bool:
        return self.stable and all(r < b for r, b in zip(self.residuals, self.budgets))

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)

    def to_json(self) -> dict:
        return {
            "equation": self.equation,
            "verdict": self.verdict,
            "residuals": [float(r) for r in self.residuals],
            "fitted": self.fitted,
            "order": self.order,
            "tol": self.tol,
            "points": [p.to_json() for p in self.points],
        }


def _budget(tol, *errs):
    return max(tol, ERROR_FACTOR * float(sum(errs)))


# -- evaluation -----------------------------------------------------------------------


def eval_jacobi(phi: JacobiSeries, p: SamplePoint, tol=None, min_im=MIN_IM, max_im_z=MAX_IM_Z):
    """``(value, error estimate)`` of ``phi`` at ``p``."""
    if p.tau.imag < min_im - 1e-12:
        raise HypothesisViolated(f"Im(tau) = {p.tau.imag:.3g} is below the minimum {min_im}")
    if abs(p.z.imag) > max_im_z + 1e-12:
        raise HypothesisViolated(f"|Im(z)| = {abs(p.z.imag):.3g} exceeds {max_im_z}")
    value, err = phi.evaluate(p.tau, p.z)
    if tol is not None and err > tol:
        raise PrecisionLoss(f"tail estimate {err:.3g} exceeds tolerance {tol:.3g}")
    return value, err


def _weight_factor(k: Fraction, c_tau_d: complex) -> complex:
    if k.denominator != 1:
        raise HypothesisViolated("numeric modular checks need integral weight")
    return c_tau_d ** int(k)


def _exact_T_phase(phi: JacobiSeries):
    """``n mod 1``, common to every stored exponent, as a Fraction; None if mixed."""
    classes = {Fraction(n, phi.den) % 1 for n, _ in phi.coeffs}
    if len(classes) != 1:
        return None
    return classes.pop()


def _order_of(frac: Fraction) -> int:
    return frac.denominator


def _lstsq(R, Lhs):
    """Solve ``R A^T = Lhs`` for ``A``."""
    sol, *_ = np.linalg.lstsq(R, Lhs, rcond=None)
    return sol.T


def _series_order(J):
    orders = [j.order for j in J if j.order is not None]
    return int(min(orders)) if orders else None


# -- modular transformations ---------------------------------------------------------------


def _lhs_S(J, p: SamplePoint):
    """``tau^{-k} e^{-2 pi i m z^2 / tau} J_i(-1/tau, z/tau)`` for every i."""
    st = -1 / p.tau
    zs = p.z / p.tau
    vals, errs = [], []
    for phi in J:
        v, e = eval_jacobi(phi, SamplePoint(st, zs))
        factor = cmath.exp(-2j * cmath.pi * float(phi.index) * p.z * p.z / p.tau) / _weight_factor(phi.weight, p.tau)
        vals.append(v * factor)
        errs.append(e * abs(factor))
    return np.array(vals), errs


def _rhs(J, p: SamplePoint):
    vals, errs = [], []
    for phi in J:
        v, e = eval_jacobi(phi, p)
        vals.append(v)
        errs.append(e)
    return np.array(vals), errs


def fit_S_matrix(J, points, tol=DEFAULT_TOL):
    """Least-squares ``a(S)`` with per-half stability; returns ``(matrix, deviation)``."""
    r = len(J)
    data = [(_lhs_S(J, p), _rhs(J, p)) for p in points]
    if len(points) < 2 * r:
        raise ValueError(f"need at least {2 * r} points to fit an {r}x{r} matrix stably")
    L = np.array([d[0][0] for d in data])
    R = np.array([d[1][0] for d in data])
    A = _lstsq(R, L)
    A1 = _lstsq(R[0::2], L[0::2])
    A2 = _lstsq(R[1::2], L[1::2])
    return A, float(np.max(np.abs(A1 - A2)))


def _verify_matrix(J, A, points, lhs_fn, rhs_fn, tol):
    residuals, budgets = [], []
    for p in points:
        lv, le = lhs_fn(J, p)
        rv, re = rhs_fn(J, p)
        pred = A @ rv
        res = float(np.max(np.abs(lv - pred)))
        residuals.append(res)
        budgets.append(_budget(tol, *le, *(np.abs(A).sum() * e for e in re)))
    return residuals, budgets


def check_modular(J, gamma: str, points=None, tol=DEFAULT_TOL, holdout=None) -> TransformReport:
    """Check ``J_i(gamma tau, z/(c tau + d)) = e(...) sum_j a_ij J_j(tau, z)`` for ``gamma`` in {S, T}."""
    J = [J] if isinstance(J, JacobiSeries) else list(J)
    points = default_points() if points is None else list(points)
    gamma = gamma.upper()
    order = _series_order(J)
    if gamma == "T":
        phases = [_exact_T_phase(phi) for phi in J]
        if any(ph is None for ph in phases):
            raise HypothesisViolated("exponents do not lie in a single class mod 1")
        mult = np.array([cmath.exp(2j * cmath.pi * float(ph)) for ph in phases])
        residuals, budgets = [], []
        for p in points:
            lv, le = _rhs(J, SamplePoint(p.tau + 1, p.z))
            rv, re = _rhs(J, p)
            residuals.append(float(np.max(np.abs(lv - mult * rv))))
            budgets.append(_budget(tol, *le, *re))
        fitted = {
            "exponent_mod_1": [str(ph) for ph in phases],
            "multipliers": [_cx(m) for m in mult],
            "orders": [_order_of(ph) for ph in phases],
        }
        if len(J) == 1:
            fitted["chi"] = _cx(mult[0])
            fitted["chi_order"] = _order_of(phases[0])
        return TransformReport("modular-T", points, residuals, budgets, fitted, order, tol)
    if gamma != "S":
        raise ValueError(f"unknown generator {gamma!r}; use S or T")
    holdout = holdout_points() if holdout is None else list(holdout)
    A, deviation = fit_S_matrix(J, points, tol)
    fitted = {"matrix": [[_cx(x) for x in row] for row in A], "deviation": deviation}
    if len(J) == 1:
        fitted["chi"] = _cx(A[0, 0])
    all_points = points + holdout
    residuals, budgets = _verify_matrix(J, A, all_points, _lhs_S, _rhs, tol)
    report = TransformReport("modular-S", all_points, residuals, budgets, fitted, order, tol, deviation < tol)
    if not report.stable:
        raise UnstableFit(f"fitted S-matrix varies by {deviation:.3g} across point subsets", report)
    return report


# -- elliptic transformations ------------------------------------------------------------


def check_elliptic_numeric(J, u: int, v: int, points=None, tol=DEFAULT_TOL) -> TransformReport:
    """Check ``e^{2 pi i m (u^2 tau + 2 u z)} J_i(tau, z + u tau + v) = J_{i'}(tau, z)``."""
    J = [J] if isinstance(J, JacobiSeries) else list(J)
    u, v = int(u), int(v)
    points = default_points() if points is None else list(points)
    exact = match_elliptic_permutation(J, u) if u else [[i] for i in range(len(J))]

    def evals(z_shift):
        out = []
        for p in points:
            row = []
            for phi in J:
                bound = MAX_IM_Z + abs(u) * p.tau.imag if z_shift else MAX_IM_Z
                q = SamplePoint(p.tau, p.z + (u * p.tau + v if z_shift else 0))
                row.append(eval_jacobi(phi, q, max_im_z=bound))
            out.append(row)
        return out

    shifted = evals(True)
    plain = evals(False)

    def residuals_for(i, j):
        res, bud = [], []
        m = float(J[i].index)
        for k, p in enumerate(points):
            # compare at the size of J(tau, z); the automorphy factor can reach e^{8 pi}
            factor = cmath.exp(2j * cmath.pi * m * (u * u * p.tau + 2 * u * p.z))
            (a, ea), (b, eb) = shifted[k][i], plain[k][j]
            res.append(abs(factor * a - b))
            bud.append(_budget(tol, ea * abs(factor), eb))
        return res, bud

    perm, residuals, budgets = [], [], []
    for i in range(len(J)):
        candidates = exact[i] + [j for j in range(len(J)) if j not in exact[i]]
        chosen = None
        for j in candidates:
            res, bud = residuals_for(i, j)
            if all(r < b for r, b in zip(res, bud)):
                chosen = (j, res, bud)
                break
        if chosen is None:
            res, bud = residuals_for(i, exact[i][0] if exact[i] else i)
            report = TransformReport(
                f"elliptic(u={u},v={v})", points, residuals + res, budgets + bud, {"permutation": perm}, _series_order(J), tol
            )
            raise PermutationMismatch(f"no module matches the shifted series {i}", report)
        perm.append(chosen[0])
        residuals += chosen[1]
        budgets += chosen[2]
    fitted = {"permutation": perm, "coefficient_permutation": exact}
    return TransformReport(f"elliptic(u={u},v={v})", points * len(J), residuals, budgets, fitted, _series_order(J), tol)


# -- twisted traces at S tau ------------------------------------------------------------------


def theorem3_check(L: EvenLattice, h, R: int, points=None, tol=DEFAULT_TOL, trunc=30) -> TransformReport:
    """Compare ``Z_V(g, S tau)`` with the twisted-sector character at ``tau``.

    ``g = exp(2 pi i h(0)/R)``. Both sides come from independent enumerations:
    the trace from the untwisted character at ``zeta = e^{2 pi i/R}``, the
    twisted side from the theta series of ``L + h/R``.
    """
    if not L.is_unimodular:
        raise HypothesisViolated("the twisted-sector comparison needs a unimodular lattice")
    h = h if isinstance(h, LatticeVector) else LatticeVector(h)
    a = h / R
    finite_order(L, a)
    Z = trace_Z(L, h, R, trunc)
    tw = twisted_character(L, a, trunc)
    points = default_points(zs=(0.0,)) if points is None else list(points)
    taus = list(dict.fromkeys(p.tau for p in points))
    residuals, budgets, used = [], [], []
    for tau in taus:
        st = -1 / tau
        if st.imag < MIN_IM - 1e-12 or tau.imag < MIN_IM - 1e-12:
            raise HypothesisViolated(f"tau = {tau} leaves the high-Im region under S")
        lv, le = Z.evaluate(st)
        rv, re = tw.evaluate(tau, warn=False)
        residuals.append(abs(lv - rv))
        budgets.append(_budget(tol, le, re))
        used.append(SamplePoint(tau))
    period = Z.period()
    fitted = {
        "trace_period": period,
        "twisted_period": _qseries_period(tw),
        "invariant_under_24R": (24 * R) % period == 0,
        "R": R,
    }
    return TransformReport(f"theorem3(R={R})", used, residuals, budgets, fitted, trunc, tol)


def _qseries_period(qs) -> int:
    """Smallest ``N`` with the series invariant under ``tau -> tau + N``."""
    n = 1
    for e, _ in qs.terms():
        n = math.lcm(n, e.denominator)
    return n


# -- Miyamoto recursion --------------------------------------------------------------------------


def _phi_values(L, u, v, tau, trunc):
    vals, errs = [], []
    for mod in discriminant_group(L):
        val, err = phi_miyamoto(L, mod, u, v, trunc).evaluate(tau)
        vals.append(val)
        errs.append(err)
    return np.array(vals), errs


def fit_phi_matrix(L, gamma: str, points, trunc=30):
    """``a(gamma)`` fitted from ``Phi_j(0, 0)`` over the distinct taus of ``points``."""
    zero = LatticeVector.zero(L.rank)
    taus = list(dict.fromkeys(p.tau for p in points))
    mapped = (lambda t: -1 / t) if gamma == "S" else (lambda t: t + 1)
    Lhs = np.array([_phi_values(L, zero, zero, mapped(t), trunc)[0] for t in taus])
    Rhs = np.array([_phi_values(L, zero, zero, t, trunc)[0] for t in taus])
    r = Lhs.shape[1]
    if len(taus) < 2 * r:
        raise ValueError(f"need at least {2 * r} distinct taus to fit a {r}x{r} matrix")
    A = _lstsq(Rhs, Lhs)
    dev = float(np.max(np.abs(_lstsq(Rhs[0::2], Lhs[0::2]) - _lstsq(Rhs[1::2], Lhs[1::2]))))
    return A, dev


def check_miyamoto_recursion(L, u, v, gamma: str, points=None, tol=1e-5, trunc=30, matrix=None) -> TransformReport:
    """Check ``Phi_i(u, v, gamma tau) = sum_j a_ij(gamma) Phi_j(a u + c v, b u + d v, tau)``."""
    gamma = gamma.upper()
    if gamma not in ("S", "T"):
        raise ValueError(f"unknown generator {gamma!r}; use S or T")
    u = u if isinstance(u, LatticeVector) else LatticeVector(u)
    v = v if isinstance(v, LatticeVector) else LatticeVector(v)
    points = default_points(zs=(0.0,)) + holdout_points(zs=(0.0,)) if points is None else list(points)
    deviation = 0.0
    if matrix is None:
        A, deviation = fit_phi_matrix(L, gamma, points, trunc)
    else:
        A = np.asarray(matrix, dtype=complex)
    if gamma == "S":
        mapped, (u2, v2) = (lambda t: -1 / t), (v, -u)
    else:
        mapped, (u2, v2) = (lambda t: t + 1), (u, u + v)
    taus = list(dict.fromkeys(p.tau for p in points))
    residuals, budgets = [], []
    for t in taus:
        lv, le = _phi_values(L, u, v, mapped(t), trunc)
        rv, re = _phi_values(L, u2, v2, t, trunc)
        residuals.append(float(np.max(np.abs(lv - A @ rv))))
        budgets.append(_budget(tol, *le, *(np.abs(A).sum() * e for e in re)))
    fitted = {
        "matrix": [[_cx(x) for x in row] for row in A],
        "deviation": deviation,
        "u": str(u),
        "v": str(v),
    }
    report = TransformReport(
        f"miyamoto-{gamma}", [SamplePoint(t) for t in taus], residuals, budgets, fitted, trunc, tol, deviation < tol
    )
    if not report.stable:
        raise UnstableFit(f"fitted matrix varies by {deviation:.3g} across point subsets", report)
    return report
