"""Command line front end.

Exit codes: 0 success (certify: every expected flag reproduced; envelope:
bounded), 1 certify ran but an expected flag was not reproduced, 2 invalid
input or catalog validation failure, 3 solver or quadrature failure
(certify: solver failure rate above 1%), 4 envelope violated.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .catalog import SCHEMA_VERSION, list_spaces, load_space
from .errors import (InvalidInput, NumericalInstability, QuadratureFailure, SchemaError,
                     SolverFailure, SpheroError, ToleranceViolation, ValidationError)

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_SOLVER, EXIT_VIOLATED = 0, 1, 2, 3, 4
MAX_FAILURE_RATE = 0.01


def _header(command, **extra):
    return {"schema_version": SCHEMA_VERSION, "tool_version": __version__, "command": command, **extra}


def dumps(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# --- list ---------------------------------------------------------------------

def cmd_list(args):
    rows = []
    for name in list_spaces():
        sp = load_space(name)
        rows.append({"name": name, "n": sp.n, "dim_g": sp.g.dim, "dim_h": sp.h.dim,
                     "dim_a": len(sp.a_basis), "solver": sp.kah_solver,
                     "experimental": sp.experimental})
    _emit(dumps(_header("list", spaces=rows)), args.out)
    return EXIT_OK


# --- certify ------------------------------------------------------------------

def _sandwich_section(space, open_labels, seed, k_count):
    """(C1, C2) for each spherical rep on the first open chamber."""
    from .weights import SphericalRep, verify_sandwich

    opens = [c for c in space.rs.chambers if c.label in open_labels]
    out = []
    for i in range(len(space.spherical_rep_data)):
        U = SphericalRep.from_space(space, i)
        for ch in opens[:1]:
            entry = {"rep": U.name, "chamber": ch.label}
            try:
                c1, c2 = verify_sandwich(U, ch, k_count=k_count, seed=seed)
                entry.update(C1=c1, C2=c2, ratio=c2 / c1, status="ok")
            except ToleranceViolation as exc:
                entry.update(status="tolerance_violation", message=str(exc))
            out.append(entry)
    return out


def _exponent_section(space):
    from .exponents import ExponentData, lambda_V, sl2_root_system

    out = {}
    for name, preset in sorted(space.exponent_presets.items()):
        rs = sl2_root_system() if preset.get("model") == "sl2" else space.rs
        env = lambda_V(ExponentData.from_json(rs, preset))
        out[name] = {"model": preset.get("model", space.name), **env.to_json(),
                     "provenance": preset.get("provenance")}
    return out


def _compare_flags(space, derived):
    checks = {}
    ok = True
    for flag, spec in sorted(space.expected.items()):
        want = spec["value"]
        entry = {"expected": want, "provenance": spec["provenance"]}
        if not isinstance(want, bool) or flag not in derived:
            entry["status"] = "not_checked"
        else:
            entry["derived"] = derived[flag]
            entry["status"] = "reproduced" if derived[flag] == want else "mismatch"
            ok &= derived[flag] == want
        checks[flag] = entry
    return ok, checks


def cmd_certify(args):
    from .decomp import TAU_DEC, coverage_check
    from .sphericity import certify

    if args.samples <= 0:
        raise InvalidInput("--samples must be positive")
    space = load_space(args.space)
    tol = TAU_DEC if args.tol is None else args.tol
    cert = certify(space.name, space.rs, space.h, space.cd)
    cov = coverage_check(space, args.samples, args.seed, tol, threads=args.threads)
    sections = {
        "sphericity": cert.to_json(),
        "coverage": {**cov.to_json(), "failure_rate": cov.failure_rate},
        "weights": _sandwich_section(space, cert.open_chambers, args.seed, args.k_samples),
        "exponents": _exponent_section(space),
    }
    polar = cov.failure_rate <= MAX_FAILURE_RATE
    derived = {
        "spherical": cert.is_spherical,
        "pure": cert.is_pure,
        "polar_constructive": polar,
        "strongly_spherical_evidence": polar and cov.coverage == 1.0,
    }
    ok, checks = _compare_flags(space, derived)
    report = _header("certify", space=space.name, seed=args.seed, samples=args.samples, tol=tol,
                     sections=sections, verdicts=checks)
    _emit(dumps(report), args.out)
    if not polar:
        print(f"solver failure rate {cov.failure_rate:.3%} above 1%", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK if ok else EXIT_MISMATCH


# --- decompose ----------------------------------------------------------------

def _read_element(text):
    p = Path(text)
    data = json.loads(p.read_text() if p.exists() else text)
    if isinstance(data, dict):
        data = data["element"]
    return np.array(data, dtype=float)


def cmd_decompose(args):
    from .decomp import SAMPLING, SOLVER, kah_decompose, rng, sample_element

    space = load_space(args.space)
    if args.element is not None and args.sample is not None:
        raise InvalidInput("give either --element or --sample")
    if args.element is not None:
        g = _read_element(args.element)
    elif args.sample is not None:
        g = sample_element(space, rng(args.seed, SAMPLING, args.sample))
    else:
        g = np.eye(space.n)
    kw = {} if args.tol is None else {"tol": args.tol}
    w = kah_decompose(space, g, rng(args.seed, SOLVER, args.sample or 0), **kw)
    report = _header("decompose", space=space.name, seed=args.seed, element=g.tolist(), witness=w.to_json())
    _emit(dumps(report), args.out)
    print(f"residual {w.residual:.3e}  chamber {w.chamber}", file=sys.stderr)
    return EXIT_OK


# --- envelope -----------------------------------------------------------------

def cmd_envelope(args):
    from .envelope import SphericalFunctionModel, envelope_check
    from .exponents import Envelope, lambda_V, sl2_principal_series

    lam = complex(args.lam.replace(" ", ""))
    default = lambda_V(sl2_principal_series(lam))
    Lam = float(default.Lambda[0]) if args.Lambda is None else args.Lambda
    d = default.d if args.d is None else args.d
    env = Envelope([Lam], d)
    rep = envelope_check(SphericalFunctionModel(lam, args.m, args.mp), env, t_max=args.tmax, n=args.grid)
    report = _header("envelope", model="sl2_principal_series", seed=args.seed, envelope=rep.to_json())
    _emit(dumps(report), args.out)
    csv_path = args.csv or (Path(args.out).with_suffix(".csv") if args.out else None)
    if csv_path:
        Path(csv_path).write_text(rep.to_csv())
    print(f"verdict {rep.verdict}  sup ratio {rep.sup_ratio:.6g}  tail slope {rep.tail_slope:.6g}",
          file=sys.stderr)
    return EXIT_OK if rep.bounded else EXIT_VIOLATED


# --- exponents ----------------------------------------------------------------

def _floats(text):
    return [float(v) for v in text.split(",")] if text else None


def cmd_exponents(args):
    from .exponents import halving_count, improve_exponent

    sections = {}
    if args.space:
        sections["presets"] = _exponent_section(load_space(args.space))
    if args.delta is not None:
        delta, lam = _floats(args.delta), _floats(args.Lambda)
        if lam is None:
            raise InvalidInput("--delta needs --Lambda")
        dF = _floats(args.dF) or [1.0] * len(delta)
        if any(int(v) != v for v in dF):
            raise InvalidInput("--dF must be integers")
        res = improve_exponent(delta, lam, args.d, [int(v) for v in dF])
        sections["improvement"] = {
            **res.to_json(),
            "halvings": [res.halvings(j) for j in range(len(delta))],
            "halving_formula": [halving_count(a, b) for a, b in zip(delta, lam)],
        }
    if not sections:
        raise InvalidInput("exponents needs --space or --delta/--Lambda")
    _emit(dumps(_header("exponents", space=args.space, sections=sections)), args.out)
    return EXIT_OK


# --- argument parsing -----------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None, help="override the decomposition tolerance")
    common.add_argument("--threads", type=int, default=1)

    p = argparse.ArgumentParser(prog="spherodeck",
                                description="Certify sphericity, decompose elements and test decay envelopes.",
                                epilog="exit codes: 0 ok, 1 flag mismatch, 2 invalid input, 3 solver failure, 4 envelope violated")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("list", parents=[common], help="list catalog entries")
    s.set_defaults(func=cmd_list)

    s = sub.add_parser("certify", parents=[common], help="certify a catalog space")
    s.add_argument("--space", required=True)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--k-samples", type=int, default=8, help="K samples per grid point in the sandwich")
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("decompose", parents=[common], help="KAH decomposition of one element")
    s.add_argument("--space", required=True)
    s.add_argument("--element", help="JSON matrix, inline or a file path")
    s.add_argument("--sample", type=int, help="decompose the seeded sample with this index")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("envelope", parents=[common], help="SL(2,R) envelope experiment")
    s.add_argument("--space", help="accepted for uniformity; the model is always SL(2,R)")
    s.add_argument("--lambda", dest="lam", default="0", help="principal series parameter, e.g. 0.5 or 0.3+0.7j")
    s.add_argument("--Lambda", type=float, help="Lambda(H); default Lambda_V")
    s.add_argument("--d", type=int, help="log power; default d_V")
    s.add_argument("--tmax", type=float, default=25.0)
    s.add_argument("--grid", type=int, default=64)
    s.add_argument("--m", type=int, default=0)
    s.add_argument("--mp", type=int, default=0)
    s.add_argument("--csv", help="CSV path (default: next to --out)")
    s.set_defaults(func=cmd_envelope)

    s = sub.add_parser("exponents", parents=[common], help="Lambda_V of presets and improvement traces")
    s.add_argument("--space")
    s.add_argument("--delta", help="comma separated simple-root coefficients")
    s.add_argument("--Lambda", help="comma separated simple-root coefficients")
    s.add_argument("--d", type=int, default=0)
    s.add_argument("--dF", help="comma separated face multiplicities")
    s.set_defaults(func=cmd_exponents)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except (SchemaError, ValidationError, InvalidInput) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SolverFailure, QuadratureFailure, NumericalInstability) as exc:
        print(f"error: {exc}", file=sys.stderr)
        diag = getattr(exc, "diagnostics", None)
        if diag:
            print(json.dumps(diag, sort_keys=True), file=sys.stderr)
        return EXIT_SOLVER
    except SpheroError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
