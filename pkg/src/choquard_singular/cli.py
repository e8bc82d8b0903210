"""Command-line entry point.

Exit codes: 0 success, 1 a check reported FAIL, 2 usage or precondition
error, 3 numerical failure. Relative ``--out`` paths are resolved against
``$CHOQUARD_OUTPUT_DIR`` when it is set.
"""

import argparse
import json
import os
import sys

import numpy as np

from .ansatz import PowerLogProfile, weighted_m_laplace_closed_form, weighted_m_laplace_fd_all
from .errors import (EmptyRangeError, NumericalError, ParameterError, PreconditionError,
                     WindowTooShort)
from .exponents import (candidate_gamma_range, classify_existence, classify_profile,
                        construct_candidate, derive_exponents, validate_params)
from .grid import RadialGrid, log_radii
from .odesolver import RadialBVP, fit_asymptotic_slope, monotone_limit, solve_bvp_shooting
from .riesz import OUTER_TOL, EnvelopeCase, riesz_convolve_radial, verify_envelope
from .verify import (SCHEMA_VERSION, Anchor, VerifyConfig, _jsonable, anchor_function,
                     comparison_equation, run_pipeline)

OUTPUT_ENV = "CHOQUARD_OUTPUT_DIR"

PRESETS = {
    "thm1-subcritical": {"N": 3, "m": "2", "p": "2", "q": "2", "alpha": "3/2", "beta": "1",
                         "gamma": 0.4},
    "thm2-case1": {"N": 5, "m": "2", "p": "7/5", "q": "7/5", "alpha": "1", "beta": "1"},
    "thm2-critical": {"N": 5, "m": "2", "p": "1", "q": "2", "alpha": "1", "beta": "3"},
    "thm2-case2": {"N": 5, "m": "2", "p": "101/100", "q": "23/10", "alpha": "1",
                   "beta": "5/2"},
}

COMMANDS = ("classify", "derive", "construct", "laplace", "convolve", "envelope", "ode",
            "verify", "report")


class UsageError(Exception):
    pass


def _add_params(sp):
    g = sp.add_argument_group("parameters")
    g.add_argument("--preset", choices=sorted(PRESETS), help="named parameter set")
    for name in ("N", "m", "p", "q", "alpha", "beta"):
        g.add_argument(f"--{name}", help=f"{name} (integer, decimal or fraction a/b)")


def _add_grid(sp):
    g = sp.add_argument_group("grid")
    g.add_argument("--r-min", type=float, default=1e-4, help="innermost radius (default 1e-4)")
    g.add_argument("--nodes", type=int, default=33, help="log-spaced nodes on [r_min, 1] (default 33)")


def _add_output(sp, formats=("json", "text")):
    g = sp.add_argument_group("output")
    g.add_argument("--out", help="output file (default: stdout)")
    g.add_argument("--format", choices=formats, default=formats[0],
                   help=f"output format (default {formats[0]})")


def build_parser():
    ap = argparse.ArgumentParser(prog="choquard-singular",
                                 description="Singular solutions of weighted quasilinear "
                                             "inequalities with a Riesz-potential nonlinearity.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("classify", help="existence verdict with condition margins")
    _add_params(sp)
    _add_output(sp, ("text", "json"))

    sp = sub.add_parser("derive", help="derived exponents and profile class")
    _add_params(sp)
    _add_output(sp)

    sp = sub.add_parser("construct", help="explicit candidate and admissible gamma range")
    _add_params(sp)
    _add_output(sp)

    sp = sub.add_parser("laplace", help="weighted m-Laplacian of a power-log profile")
    _add_params(sp)
    _add_grid(sp)
    sp.add_argument("--gamma", type=float, help="decay rate (default: candidate)")
    sp.add_argument("--tau", type=float, default=None, help="log power (default: candidate)")
    sp.add_argument("--kappa", type=float, default=1.0, help="amplitude (default 1)")
    sp.add_argument("--fd", action="store_true", help="add the finite-difference column")
    _add_output(sp, ("csv", "json"))

    sp = sub.add_parser("convolve", help="Riesz potential of u^p for a power-log profile")
    _add_params(sp)
    _add_grid(sp)
    sp.add_argument("--gamma", type=float, help="decay rate (default: candidate)")
    sp.add_argument("--tau", type=float, default=None, help="log power (default: candidate)")
    sp.add_argument("--quad-tol", type=float, default=OUTER_TOL,
                    help=f"outer quadrature tolerance (default {OUTER_TOL:g})")
    _add_output(sp, ("csv", "json"))

    sp = sub.add_parser("envelope", help="ratio of J(r) to its two-sided envelope")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--a", type=float, required=True, help="kernel exponent: |x-y|^-a")
    sp.add_argument("--b", type=float, required=True, help="weight exponent: |y|^-b")
    sp.add_argument("--theta", type=float, default=0.0, help="log power (default 0)")
    sp.add_argument("--factor", type=float, default=1e2, help="admissible max/min ratio (default 100)")
    _add_grid(sp)
    _add_output(sp)

    sp = sub.add_parser("ode", help="comparison family and asymptotic slope fit")
    _add_params(sp)
    sp.add_argument("--anchor", default="strong:1",
                    help="inner data kind:factor with kind fundamental|strong (default strong:1)")
    sp.add_argument("--theta", type=float, default=None,
                    help="weight power (default (sigma p - beta)^+)")
    sp.add_argument("--r-min", type=float, default=1e-4, help="innermost radius (default 1e-4)")
    sp.add_argument("--r-in", type=float, default=None,
                    help="solve a single two-point problem on [r_in, 1] instead of the family")
    sp.add_argument("--ode-tol", type=float, default=1e-8, help="boundary mismatch tolerance (default 1e-8)")
    sp.add_argument("--fit-tol", type=float, default=0.05, help="relative slope tolerance (default 0.05)")
    sp.add_argument("--window", type=float, nargs=2, default=(1e-3, 1e-1),
                    help="fit window (default 1e-3 1e-1)")
    _add_output(sp, ("json", "csv"))

    for name, helptext in (("verify", "certification pipeline without the dichotomy sweep"),
                           ("report", "full pipeline including the dichotomy sweep")):
        sp = sub.add_parser(name, help=helptext)
        _add_params(sp)
        _add_grid(sp)
        sp.add_argument("--gamma", type=float, default=None,
                        help="also run the pointwise check for this decay rate")
        if name == "verify":
            sp.add_argument("--dichotomy", action="store_true", help="include the dichotomy sweep")
        _add_output(sp)
    return ap


def _params(args):
    vals = dict(PRESETS[args.preset]) if args.preset else {}
    for k in ("N", "m", "p", "q", "alpha", "beta"):
        v = getattr(args, k, None)
        if v is not None:
            vals[k] = v
    missing = [k for k in ("N", "m", "p", "q", "alpha", "beta") if k not in vals]
    if missing:
        raise UsageError("missing parameters: " + ", ".join(missing))
    P = validate_params(*(vals[k] for k in ("N", "m", "p", "q", "alpha", "beta")))
    return P, vals.get("gamma")


def _profile(args, P, preset_gamma):
    gamma = args.gamma if args.gamma is not None else preset_gamma
    if gamma is None:
        u = construct_candidate(P)
        return u if args.tau is None else PowerLogProfile(1.0, u.gamma, args.tau)
    return PowerLogProfile(1.0, gamma, args.tau or 0.0)


def _dump(obj):
    return json.dumps(_jsonable({"schema": SCHEMA_VERSION, **obj}), sort_keys=True, indent=2) + "\n"


def _write(args, text):
    if args.out:
        path = args.out
        base = os.environ.get(OUTPUT_ENV)
        if base and not os.path.isabs(path):
            path = os.path.join(base, path)
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_classify(args):
    P, _ = _params(args)
    v = classify_existence(P)
    if args.format == "json":
        _write(args, _dump({"params": P.to_dict(), "existence": v.to_dict()}))
        return 0
    lines = [v.exists.value]
    for name, (lhs, rhs) in v.margins.items():
        lines.append(f"  {name}: {lhs} vs {rhs} ({'holds' if lhs < rhs else 'fails'})")
    if v.failed_conditions:
        lines.append("failed: " + "; ".join(v.failed_conditions))
    if v.reason:
        lines.append(v.reason)
    _write(args, "\n".join(lines) + "\n")
    return 0


def cmd_derive(args):
    P, _ = _params(args)
    out = {"params": P.to_dict(), "exponents": derive_exponents(P).to_dict()}
    if P.gap >= 0:
        try:
            out["profile"] = classify_profile(P).to_dict()
        except PreconditionError as e:
            out["profile"] = {"kind": None, "reason": str(e)}
    _write(args, _dump(out) if args.format == "json" else _text(out))
    return 0


def cmd_construct(args):
    P, _ = _params(args)
    lo, hi = candidate_gamma_range(P)
    u = construct_candidate(P)
    out = {"params": P.to_dict(), "gamma_range": [str(lo), str(hi)], "candidate": u.to_dict()}
    _write(args, _dump(out) if args.format == "json" else _text(out))
    return 0


def cmd_laplace(args):
    P, g0 = _params(args)
    u = _profile(args, P, g0).with_amplitude(args.kappa)
    grid = RadialGrid.sample(u, args.r_min, args.nodes)
    cf = weighted_m_laplace_closed_form(u, P, grid.radii)
    cols = [cf]
    header = ["r", "value"]
    if args.fd:
        fd = np.full(grid.radii.shape, np.nan)
        fd[1:-1] = weighted_m_laplace_fd_all(grid, P, max_log_step=1.0)
        cols.append(fd)
        header.append("fd_value")
    if args.format == "csv":
        text = RadialGrid(grid.radii, cf).to_csv(header=tuple(header), extra=cols[1:] or None)
    else:
        text = _dump({"params": P.to_dict(), "profile": u.to_dict(), "r": grid.radii,
                      **{h: c for h, c in zip(header[1:], cols)}})
    _write(args, text)
    return 0


def cmd_convolve(args):
    P, g0 = _params(args)
    u = _profile(args, P, g0)
    radii = log_radii(args.r_min, args.nodes)
    res = riesz_convolve_radial(u, P, power=float(P.p), radii=radii, outer_tol=args.quad_tol)
    if args.format == "csv":
        text = res.to_csv()
    else:
        text = _dump({"params": P.to_dict(), "profile": u.to_dict(), **res.to_dict()})
    _write(args, text)
    return 0


def cmd_envelope(args):
    case = EnvelopeCase(args.a, args.b, args.theta, args.N)
    radii = log_radii(args.r_min, args.nodes, 0.5)
    rep = verify_envelope(case, radii, args.factor)
    out = rep.to_dict()
    _write(args, _dump(out) if args.format == "json" else _text(out))
    return 0 if rep.passed else 1


def _parse_anchor(text):
    try:
        kind, factor = text.split(":")
        return Anchor(kind, float(factor))
    except ValueError:
        raise UsageError(f"bad anchor {text!r}; expected kind:factor")


def cmd_ode(args):
    P, _ = _params(args)
    eq = comparison_equation(P)
    if args.theta is not None:
        eq = type(eq)(P, args.theta, eq.C_rhs, eq.q)
    anchor = _parse_anchor(args.anchor)
    if anchor.kind not in ("fundamental", "strong"):
        raise UsageError("anchor kind must be fundamental or strong")
    f = anchor_function(anchor, eq)
    if args.r_in is not None:
        sol = solve_bvp_shooting(RadialBVP(eq, args.r_in, f(args.r_in), f(1.0)), tol=args.ode_tol)
        if args.format == "csv":
            _write(args, sol.to_csv())
        else:
            _write(args, _dump({"params": P.to_dict(), "equation": eq.to_dict(),
                                "anchor": anchor.label, "solution": sol.to_dict()}))
        return 0
    lim = monotone_limit(eq, f, f(1.0), r_min=args.r_min, bvp_tol=args.ode_tol)
    fit = fit_asymptotic_slope(lim, tuple(args.window), eq, tol=args.fit_tol)
    if args.format == "csv":
        _write(args, lim.grid.to_csv(header=("r", "w", "converged"),
                                     extra=[lim.converged.astype(float)]))
    else:
        _write(args, _dump({"params": P.to_dict(), "equation": eq.to_dict(),
                            "anchor": anchor.label, "fit": fit.to_dict(),
                            "limit": lim.to_dict()}))
    return 0 if fit.classification.value in ("FUNDAMENTAL", "STRONG", "BOUNDED") else 1


def _run_verify(args, dichotomy):
    P, g0 = _params(args)
    cfg = VerifyConfig(r_min=args.r_min, n_nodes=args.nodes)
    gamma = args.gamma if args.gamma is not None else g0
    rep = run_pipeline(P, cfg, dichotomy=dichotomy, inputs={"preset": args.preset}, gamma=gamma)
    _write(args, rep.to_json() + "\n" if args.format == "json" else rep.summary() + "\n")
    if args.out and args.format == "json":
        sys.stderr.write(rep.summary() + "\n")
    return 0 if rep.passed else 1


def cmd_verify(args):
    return _run_verify(args, args.dichotomy)


def cmd_report(args):
    return _run_verify(args, True)


def _text(d, indent=0):
    lines = []
    for k, v in d.items():
        if isinstance(v, dict):
            lines.append(" " * indent + f"{k}:")
            lines.append(_text(v, indent + 2).rstrip("\n"))
        else:
            lines.append(" " * indent + f"{k}: {v}")
    return "\n".join(lines) + "\n"


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return HANDLERS[args.command](args)
    except (UsageError, ParameterError, PreconditionError, EmptyRangeError, WindowTooShort,
            ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    except NumericalError as e:
        sys.stderr.write(f"numerical failure: {type(e).__name__}: {e}\n")
        return 3


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
