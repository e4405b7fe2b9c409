"""Command-line front end: riesz-disk <command> [options]."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

import numpy as np

from .disk_solver import NegativeDensityWarning, disk_capacity, solve_on_disk
from .fields import (MonomialField, NoRootError, PointChargeField, TableField, ZeroField,
                     h_plus_candidates, newtonian_p, parse_field)
from .potential_oracle import Tolerances, verify, weighted_potential
from .radial_calculus import RieszParams
from .ring_fredholm import (DegenerateMassError, IllConditionedError, NystromConfig,
                            ring_solve)
from .support_solver import (HypothesisError, classify_support, critical_height,
                             critical_radius)

EXIT_OK, EXIT_INPUT, EXIT_RING, EXIT_VERIFY, EXIT_NOROOT, EXIT_ILLCOND = 0, 2, 3, 4, 5, 6


class InputError(ValueError):
    """Bad command-line input (exit 2)."""


# ---------------------------------------------------------------------------
# config


def _params(args) -> RieszParams:
    if args.s is not None and args.lam is not None:
        raise InputError("give either --lambda or --s, not both")
    try:
        if args.s is not None:
            return RieszParams.from_s(args.d, args.s)
        return RieszParams(args.d, 0.5 if args.lam is None else args.lam)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _field(spec: str):
    try:
        field = parse_field(spec)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if isinstance(field, TableField):
        try:
            field.radial()
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read field table: {exc}") from exc
    return field


def _tolerances(args) -> Tolerances:
    base = Tolerances()
    return Tolerances(
        on_support=args.tol_on if args.tol_on is not None else base.on_support,
        off_support=args.tol_off if args.tol_off is not None else base.off_support,
        mass=args.tol_mass if args.tol_mass is not None else base.mass,
        positivity=args.tol_pos if args.tol_pos is not None else base.positivity)


def _clean(x):
    """JSON-safe copy: numpy scalars to float, NaN/inf to None."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_clean(v) for v in x.tolist()]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    return x


def _emit(args, payload: dict, rows=None, header=None):
    """JSON by default; CSV when requested and a table exists."""
    if args.format == "csv" and rows is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(_clean(payload), allow_nan=False, indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _params_out(params: RieszParams, field_spec: str | None = None) -> dict:
    out = params.as_dict()
    if field_spec is not None:
        out["field"] = field_spec
    return out


# ---------------------------------------------------------------------------
# solves shared by several commands


def _solve_disk(field, params, grid_n):
    """Disk-supported solution, or InputError/HypothesisError for ring-type fields."""
    Q = field.radial(params)
    if isinstance(field, PointChargeField):
        # full-disk candidate; validity below the critical height is left to verification
        R = 1.0
    else:
        decision = classify_support(Q)
        if decision.kind not in ("disk", "full_disk"):
            raise HypothesisError(
                f"support is not a disk ({decision.kind}, {decision.rationale}); "
                f"use the `ring` command with a chosen (a, b)")
        R = critical_radius(Q, params, decision=decision)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NegativeDensityWarning)
        return solve_on_disk(Q, params, R, grid_n=grid_n), Q


def _solve_ring(field, params, a, b, grid_n, n_nodes):
    if not 0.0 <= a < b <= 1.0:
        raise InputError("ring needs 0 <= a < b <= 1")
    Q = None if isinstance(field, ZeroField) else field.radial(params)
    sol = ring_solve(Q, params, a, b, NystromConfig(n_nodes), grid_n=grid_n)
    return sol, (Q if Q is not None else field.radial(params))


def _payload(params, spec, result, report, extra_density=None):
    density = {"r": result.r, "f": result.f}
    if hasattr(result, "edge_exponent"):
        density["edge_exponent"] = result.edge_exponent
    else:
        density["edge_exponents"] = list(result.edge_exponents)
    density.update(extra_density or {})
    return {
        "params": _params_out(params, spec),
        "support": result.support.as_dict(),
        "F_Q": result.F_Q,
        "C_Q": result.C_Q,
        "density": density,
        "verification": report.as_dict() if report is not None else None,
    }


def _ring_extra(sol) -> dict:
    return {"mass": sol.mass, "residual_norm": sol.residual_norm, "valid": sol.valid,
            "G": {"r": sol.nodes, "G": sol.G_grid}}


# ---------------------------------------------------------------------------
# commands


def cmd_capacity(args) -> int:
    params = _params(args)
    if not 0.0 < args.R <= 1.0:
        raise InputError("R must lie in (0, 1]")
    cap = disk_capacity(params, args.R)
    _emit(args, {"params": _params_out(params), "R": args.R, "capacity": cap, "W_s": 1.0 / cap},
          rows=[[args.R, repr(cap), repr(1.0 / cap)]], header=["R", "capacity", "W_s"])
    return EXIT_OK


def cmd_solve(args) -> int:
    params = _params(args)
    field = _field(args.field)
    try:
        result, Q = _solve_disk(field, params, args.grid_n)
    except HypothesisError as exc:
        print(f"ring needed: {exc}", file=sys.stderr)
        return EXIT_RING
    report = None if args.no_verify else verify(result, Q, params, _tolerances(args))
    _emit(args, _payload(params, args.field, result, report),
          rows=zip(result.r.tolist(), result.f.tolist()), header=["r", "f"])
    if report is not None and not report.passed:
        print(f"verification failed: min_density={report.min_density:.3e}, "
              f"deviation={report.max_potential_deviation_on_support:.3e}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_critical_radius(args) -> int:
    params = _params(args)
    field = _field(args.field)
    Q = field.radial(params)
    try:
        R = critical_radius(Q, params)
    except HypothesisError as exc:
        print(f"ring needed: {exc}", file=sys.stderr)
        return EXIT_RING
    payload = {"params": _params_out(params, args.field), "R_star": R}
    if isinstance(field, MonomialField):
        from .fields import monomial_support_radius
        payload["R_star_closed_form"] = monomial_support_radius(field, params)
    _emit(args, payload, rows=[[repr(R)]], header=["R_star"])
    return EXIT_OK


def _newtonian_m(params: RieszParams):
    """m with d = 2m + 4 when lam = 1/2 and d is even, else None."""
    if params.lam == 0.5 and params.d % 2 == 0 and params.d >= 4:
        return (params.d - 4) // 2
    return None


def cmd_critical_height(args) -> int:
    params = _params(args)
    if not args.q > 0:
        raise InputError("point charge needs q > 0")
    field = PointChargeField(args.q, 1.0)
    payload = {"params": _params_out(params), "q": args.q}
    try:
        ch = critical_height(field, params)
    except NoRootError as exc:
        payload["h_minus"] = exc.h_minus
        payload["h_plus_candidates"] = []
        _emit(args, payload)
        print(f"no root: {exc}", file=sys.stderr)
        return EXIT_NOROOT
    payload.update(ch.as_dict())
    m = _newtonian_m(params)
    if m is not None:
        # finite-sum specialisation, reported next to the generic value
        roots = h_plus_candidates(field, params, lambda h: newtonian_p(m, args.q, h))
        hp = float(roots[-1]) if roots else None
        payload["newtonian_check"] = {
            "m": m, "h_plus": hp,
            "abs_diff": abs(hp - ch.h_plus) if hp is not None else None,
            "agrees": hp is not None and abs(hp - ch.h_plus) <= 1e-9}
    _emit(args, payload, rows=[[repr(ch.h_minus), repr(ch.h_plus), repr(ch.threshold)]],
          header=["h_minus", "h_plus", "threshold"])
    return EXIT_OK


def cmd_ring(args) -> int:
    params = _params(args)
    field = _field(args.field)
    if not 0.0 <= args.a < args.b <= 1.0:
        raise InputError("ring needs 0 <= a < b <= 1")
    try:
        sol, Q = _solve_ring(field, params, args.a, args.b, args.grid_n, args.n_nodes)
    except (IllConditionedError, DegenerateMassError) as exc:
        print(f"ill-conditioned: {exc}", file=sys.stderr)
        return EXIT_ILLCOND
    report = None if args.no_verify else verify(sol, Q, params, _tolerances(args))
    _emit(args, _payload(params, args.field, sol, report, _ring_extra(sol)),
          rows=zip(sol.r.tolist(), sol.f.tolist()), header=["r", "f"])
    print(f"residual_norm={sol.residual_norm:.3e} F_Q={sol.F_Q:.12g}", file=sys.stderr)
    if report is not None and not report.passed:
        print(f"verification failed: min_density={report.min_density:.3e}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _load(path):
    if not path:
        raise InputError("--input is required")
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        p = data["params"]
        return data, RieszParams(p["d"], p["lambda"]), p["field"], data["support"]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read prior output {path!r}: {exc}") from exc


def _resolve(params, spec, support, grid_n, n_nodes):
    """Rebuild a solution from a prior output (deterministic pipeline)."""
    field = _field(spec)
    if support.get("kind") == "ring":
        return _solve_ring(field, params, support["a"], support["b"], grid_n, n_nodes)
    Q = field.radial(params)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NegativeDensityWarning)
        return solve_on_disk(Q, params, support["R"], grid_n=grid_n), Q


def cmd_verify(args) -> int:
    if args.input:
        data, params, spec, support = _load(args.input)
        grid_n = len(data["density"]["r"])
    else:
        params, spec = _params(args), args.field
        grid_n = args.grid_n
        if args.a is not None or args.b is not None:
            support = {"kind": "ring", "a": args.a or 0.0, "b": 1.0 if args.b is None else args.b}
        else:
            try:
                result, _ = _solve_disk(_field(spec), params, grid_n)
            except HypothesisError as exc:
                print(f"ring needed: {exc}", file=sys.stderr)
                return EXIT_RING
            support = result.support.as_dict()
    try:
        result, Q = _resolve(params, spec, support, grid_n, args.n_nodes)
    except (IllConditionedError, DegenerateMassError) as exc:
        print(f"ill-conditioned: {exc}", file=sys.stderr)
        return EXIT_ILLCOND
    report = verify(result, Q, params, _tolerances(args))
    _emit(args, {"params": _params_out(params, spec), "support": support,
                 "verification": report.as_dict()})
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_plot_data(args) -> int:
    data, params, spec, support = _load(args.input)
    r = np.asarray(data["density"]["r"], dtype=float)
    if args.potential:
        result, Q = _resolve(params, spec, support, len(r), args.n_nodes)
        col = weighted_potential(result.density, Q, params, r)
        header = ["r", "weighted_potential"]
    else:
        col = np.asarray(data["density"]["f"], dtype=float)
        header = ["r", "f"]
    args.format = "csv"
    _emit(args, {}, rows=[[repr(float(x)), repr(float(y))] for x, y in zip(r, col)],
          header=header)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser, field=True):
    p.add_argument("--d", type=int, default=3, help="dimension (>= 3)")
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="lambda in (0,1); s = d - 3 + 2 lambda (default 0.5)")
    p.add_argument("--s", type=float, default=None, help="Riesz exponent instead of lambda")
    if field:
        p.add_argument("--field", default="zero",
                       help="zero | monomial:q=..,alpha=.. | point:q=..,h=.. | table:path.csv")
    p.add_argument("--grid-n", dest="grid_n", type=int, default=64)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", "-o", default=None)


def _verify_opts(p: argparse.ArgumentParser):
    p.add_argument("--no-verify", dest="no_verify", action="store_true")
    p.add_argument("--tol-on", dest="tol_on", type=float, default=None)
    p.add_argument("--tol-off", dest="tol_off", type=float, default=None)
    p.add_argument("--tol-mass", dest="tol_mass", type=float, default=None)
    p.add_argument("--tol-pos", dest="tol_pos", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riesz-disk",
        description="Weighted Riesz equilibrium measures on the unit hyperdisk.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", help="Riesz capacity of the disk of radius R")
    _common(p, field=False)
    p.add_argument("--R", type=float, default=1.0)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("solve", help="extremal density for a disk-supported field")
    _common(p)
    _verify_opts(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("critical-radius", help="support radius R* for a convex increasing field")
    _common(p)
    p.set_defaults(func=cmd_critical_radius)

    p = sub.add_parser("critical-height", help="h_-, h_+ and the full-disk height threshold")
    _common(p, field=False)
    p.add_argument("--q", type=float, default=1.0, help="point charge (> 0)")
    p.set_defaults(func=cmd_critical_height)

    p = sub.add_parser("ring", help="ring-supported solution on a chosen [a, b]")
    _common(p)
    _verify_opts(p)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--n-nodes", dest="n_nodes", type=int, default=NystromConfig().n_nodes)
    p.set_defaults(func=cmd_ring)

    p = sub.add_parser("verify", help="variational-inequality report for a solution")
    _common(p)
    _verify_opts(p)
    p.add_argument("--input", default=None, help="prior solve/ring JSON output")
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--n-nodes", dest="n_nodes", type=int, default=NystromConfig().n_nodes)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot-data", help="two-column CSV from a prior solve/ring output")
    p.add_argument("--input", default=None, help="prior solve/ring JSON output")
    p.add_argument("--potential", action="store_true", help="emit r,weighted_potential")
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--n-nodes", dest="n_nodes", type=int, default=NystromConfig().n_nodes)
    p.set_defaults(func=cmd_plot_data, format="csv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
