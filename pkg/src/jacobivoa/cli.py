"""Command-line entry point.

Exit status: 0 on success or a passing check, 1 on a failing check, 2 when
an input violates a precondition.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import jacobi, lattice, modular, series, verify
from .errors import PreconditionError, VerificationError

DEFAULT_ORDER = 30


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _lattice(args):
    return lattice.EvenLattice.load(args.lattice)


def _vector(text, L, names=None, default="zero"):
    return lattice.parse_vector(text if text is not None else default, L, names)


def _points(args):
    if not getattr(args, "points", None):
        return None
    with open(args.points) as fh:
        data = json.load(fh)
    return [verify.SamplePoint.from_json(p) for p in data]


# -- modular forms ---------------------------------------------------------------------


def cmd_dims(args):
    print(modular.dim_Mk(args.weight))
    return 0


def cmd_expand(args):
    form = args.form.lower()
    if form == "eta":
        s = series.eta(args.order)
    elif form == "delta":
        s = modular.delta(args.order).expansion
    elif form in ("e4", "e6"):
        s = modular.eisenstein(int(form[1:]), args.order).expansion
    else:
        raise PreconditionError(f"unknown form {args.form!r}")
    _emit(s.to_json())
    return 0


# -- Jacobi forms -------------------------------------------------------------------------


def cmd_jacobi_gens(args):
    out = {
        "phi_m2_1": jacobi.gen_phi_m2_1(args.order).to_json(),
        "phi_0_1": jacobi.gen_phi_0_1(args.order).to_json(),
    }
    _emit(out, args.json)
    return 0


def cmd_jacobi_basis(args):
    Q = jacobi.q_basis(args.weight, args.index, args.order)
    out = [
        {"i": i, "leading_polynomial": list(map(series.frac_str, jacobi.leading_polynomial(q).x_coeffs)), "series": q.to_json()}
        for i, q in enumerate(Q)
    ]
    _emit(out, args.json)
    return 0


def cmd_jacobi_dims(args):
    out = {
        "dim_weak": jacobi.dim_weak(args.weight, args.index),
        "codim_sum": jacobi.codim_sum(args.index),
        "dim_true": jacobi.dim_true(args.weight, args.index) if args.weight >= 3 else None,
    }
    _emit(out)
    return 0


def _load_series(path):
    with open(path) as fh:
        return jacobi.JacobiSeries.from_json(json.load(fh))


def cmd_jacobi_classify(args):
    phi = _load_series(args.input)
    out = {"classification": jacobi.classify(phi).to_json()}
    if phi.weight >= 4 and phi.index.denominator == 1 and 1 <= phi.index <= 4:
        out["criterion"] = jacobi.prop2_criterion(phi).to_json()
    _emit(out, args.json)
    return 0


# -- lattice VOAs ----------------------------------------------------------------------------


def cmd_voa_character(args):
    L = _lattice(args)
    h = _vector(args.h, L)
    J = lattice.character(L, args.module, h, args.order)
    if args.eta_power:
        J = jacobi.eta_multiply(J, args.eta_power)
    _emit(J.to_json(), args.json)
    return 0


def cmd_voa_twisted(args):
    L = _lattice(args)
    h = _vector(args.h, L, default="root")
    a = _vector(args.a, L, {"h": h})
    _emit(lattice.twisted_character(L, a, args.order).to_json(), args.json)
    return 0


def cmd_voa_trace(args):
    L = _lattice(args)
    h = _vector(args.h, L, default="root")
    Z = lattice.trace_Z(L, h, args.R, args.order)
    out = Z.to_json()
    out["period"] = Z.period()
    _emit(out, args.json)
    return 0


# -- verification -------------------------------------------------------------------------------


def _report(report, args):
    data = report.to_json()
    data["order"] = args.order
    if args.json:
        _emit(data, args.json)
    print(f"{report.equation}: {report.verdict} (max residual {report.max_residual:.3e}, tol {report.tol:g})")
    return 0 if report.passed else 1


def _verify_targets(args):
    if args.input:
        return [_load_series(args.input)]
    L = _lattice(args)
    h = _vector(args.h, L, default="root")
    if args.all_modules:
        return lattice.characters(L, h, args.order)
    return [lattice.character(L, 0, h, args.order)]


def cmd_verify_modular(args):
    J = _verify_targets(args)
    return _report(verify.check_modular(J, args.gamma, _points(args), args.tol), args)


def cmd_verify_elliptic(args):
    J = _verify_targets(args)
    return _report(verify.check_elliptic_numeric(J, args.u, args.v, _points(args), args.tol), args)


def cmd_verify_miyamoto(args):
    L = _lattice(args)
    h = _vector(args.h, L, default="root")
    u = _vector(args.u, L, {"h": h})
    v = _vector(args.v, L, {"h": h})
    return _report(verify.check_miyamoto_recursion(L, u, v, args.gamma, _points(args), args.tol, args.order), args)


def cmd_verify_theorem3(args):
    L = _lattice(args)
    h = _vector(args.h, L, default="root")
    return _report(verify.theorem3_check(L, h, args.R, _points(args), args.tol, args.order), args)


# -- parser -------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jacobivoa", description="Jacobi forms and lattice VOA characters.")
    sub = p.add_subparsers(dest="command", required=True)

    def order(sp):
        sp.add_argument("--order", type=int, default=DEFAULT_ORDER, help="truncation order in q (default 30)")

    def out(sp):
        sp.add_argument("--json", metavar="FILE", help="write the JSON result to FILE")

    def lat(sp, h_default=None):
        sp.add_argument("--lattice", default="E8", help="E8, A1, A1+E8 or a JSON file with a Gram matrix")
        sp.add_argument("--h", default=h_default, help='vector such as "1,0,0,0,0,0,0,0", "e2" or "root"')

    sp = sub.add_parser("dims", help="dimension of M_k")
    sp.add_argument("--weight", type=int, required=True)
    sp.set_defaults(func=cmd_dims)

    sp = sub.add_parser("expand", help="q-expansion of a modular form as JSON")
    sp.add_argument("--form", required=True, choices=["E4", "E6", "Delta", "eta"])
    order(sp)
    sp.set_defaults(func=cmd_expand)

    jp = sub.add_parser("jacobi", help="weak Jacobi forms").add_subparsers(dest="jcommand", required=True)
    sp = jp.add_parser("gens", help="the generators of weight -2 and 0")
    order(sp)
    out(sp)
    sp.set_defaults(func=cmd_jacobi_gens)
    sp = jp.add_parser("basis", help="the basis Q_i = x^i + O(q)")
    sp.add_argument("--weight", type=int, required=True)
    sp.add_argument("--index", type=int, required=True)
    order(sp)
    out(sp)
    sp.set_defaults(func=cmd_jacobi_basis)
    sp = jp.add_parser("dims", help="weak and true dimensions")
    sp.add_argument("--weight", type=int, required=True)
    sp.add_argument("--index", type=int, required=True)
    sp.set_defaults(func=cmd_jacobi_dims)
    sp = jp.add_parser("classify", help="support-bound verdict for a series file")
    sp.add_argument("--input", required=True)
    out(sp)
    sp.set_defaults(func=cmd_jacobi_classify)

    vp = sub.add_parser("voa", help="lattice VOA characters").add_subparsers(dest="vcommand", required=True)
    sp = vp.add_parser("character", help="J_{j,h} for a coset module")
    lat(sp)
    sp.add_argument("--module", type=int, default=0, help="coset index in L*/L (0 is V itself)")
    sp.add_argument("--eta-power", type=int, default=0, help="multiply by this power of eta")
    order(sp)
    out(sp)
    sp.set_defaults(func=cmd_voa_character)
    sp = vp.add_parser("twisted", help="twisted-sector character for g = exp(2 pi i a(0))")
    lat(sp)
    sp.add_argument("--a", required=True, help='shift vector, e.g. "h/2"')
    order(sp)
    out(sp)
    sp.set_defaults(func=cmd_voa_twisted)
    sp = vp.add_parser("trace", help="Tr g q^(L(0)-c/24) for g = exp(2 pi i h(0)/R)")
    lat(sp)
    sp.add_argument("--R", type=int, required=True)
    order(sp)
    out(sp)
    sp.set_defaults(func=cmd_voa_trace)

    cp = sub.add_parser("verify", help="numeric functional-equation checks").add_subparsers(dest="ccommand", required=True)

    def common(sp):
        lat(sp)
        order(sp)
        out(sp)
        sp.add_argument("--tol", type=float, default=verify.DEFAULT_TOL)
        sp.add_argument("--points", help="JSON list of {tau: [re, im], z: [re, im]}")

    sp = cp.add_parser("modular", help="S or T transformation of characters")
    common(sp)
    sp.add_argument("--gamma", choices=["S", "T"], default="S")
    sp.add_argument("--all-modules", action="store_true", help="use the full character vector over L*/L")
    sp.add_argument("--input", help="check a JacobiSeries JSON file instead of a lattice character")
    sp.set_defaults(func=cmd_verify_modular)
    sp = cp.add_parser("elliptic", help="z -> z + u tau + v")
    common(sp)
    sp.add_argument("--u", type=int, default=1)
    sp.add_argument("--v", type=int, default=0)
    sp.add_argument("--all-modules", action="store_true")
    sp.add_argument("--input")
    sp.set_defaults(func=cmd_verify_elliptic)
    sp = cp.add_parser("miyamoto", help="recursion for Phi_j(u, v, tau)")
    common(sp)
    sp.add_argument("--gamma", choices=["S", "T"], default="S")
    sp.add_argument("--u", default="h/2")
    sp.add_argument("--v", default="zero")
    sp.set_defaults(func=cmd_verify_miyamoto)
    sp = cp.add_parser("theorem3", help="twisted trace at S tau against the twisted sector")
    common(sp)
    sp.add_argument("--R", type=int, default=2)
    sp.set_defaults(func=cmd_verify_theorem3)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VerificationError as exc:
        print(f"fail: {exc}", file=sys.stderr)
        if exc.report is not None and getattr(args, "json", None):
            _emit(exc.report.to_json(), args.json)
        return 1


if __name__ == "__main__":
    sys.exit(main())
