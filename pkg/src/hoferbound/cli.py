"""Command-line entry point: ``hoferbound <subcommand> scenario.json ...``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .certificate import asymptotic_slope, describe_error, emit_report, plot_profile, run_certificate, slope_table_csv
from .errors import AssumptionViolated, HoferBoundError
from .generators import enumerate_generators
from .geometry import check_assumption
from .profile import make_bump, make_profile
from .scenario import load_scenario

EXIT_OK = 0
EXIT_VERDICT = 2
EXIT_ERROR = 3

WORKERS_ENV = "HOFERBOUND_WORKERS"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _fail(exc: HoferBoundError) -> int:
    sys.stderr.write(json.dumps(describe_error(exc), sort_keys=True) + "\n")
    return EXIT_ERROR


def _profile(s):
    return make_profile(make_bump(s.R, s.delta), s.a - s.b)


def cmd_verify(args) -> int:
    try:
        s = load_scenario(args.scenario)
        cap = args.length_cap if args.length_cap is not None else max(_profile(s).max_slope, 1e-12)
        rep = check_assumption(s.manifold, s.submanifold, s.endpoint, s.homotopy_class, s.k, cap, strict=False)
    except HoferBoundError as exc:
        return _fail(exc)
    _emit(json.dumps(rep.to_json(), sort_keys=True, indent=2) + "\n", args.out)
    return EXIT_OK if rep.holds else EXIT_VERDICT


def cmd_enumerate(args) -> int:
    try:
        s = load_scenario(args.scenario)
        gs = enumerate_generators(s.manifold, s.submanifold, s.endpoint, s.homotopy_class, _profile(s))
    except HoferBoundError as exc:
        return _fail(exc)
    _emit(json.dumps(gs.to_json(), sort_keys=True, indent=2) + "\n", args.out)
    return EXIT_OK


def _certify_one(path: str, brute_force: bool, fmt: str):
    """Worker body; returns (exit code, text, error json)."""
    try:
        r = run_certificate(load_scenario(path), brute_force=brute_force)
    except AssumptionViolated as exc:
        return EXIT_VERDICT, "", json.dumps(describe_error(exc), sort_keys=True)
    except HoferBoundError as exc:
        return EXIT_ERROR, "", json.dumps(describe_error(exc), sort_keys=True)
    return (EXIT_OK if r.all_pass else EXIT_VERDICT), emit_report(r, fmt), ""


def cmd_certify(args) -> int:
    paths = args.scenarios
    workers = int(os.environ.get(WORKERS_ENV, "1") or 1)
    jobs = [(p, args.brute_force, args.format) for p in paths]
    if workers > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_certify_one, *zip(*jobs)))
    else:
        results = [_certify_one(*j) for j in jobs]
    texts = []
    for code, text, err in results:
        if err:
            sys.stderr.write(err + "\n")
        texts.append(text)
    _emit("".join(texts), args.out)
    return max(code for code, _, _ in results)


def cmd_slope(args) -> int:
    try:
        s = load_scenario(args.scenario)
        rows = asymptotic_slope(s, s.a - s.b, args.m_max)
    except AssumptionViolated as exc:
        _fail(exc)
        return EXIT_VERDICT
    except HoferBoundError as exc:
        return _fail(exc)
    _emit(slope_table_csv(rows), args.out)
    return EXIT_OK if all(r["ok"] for r in rows) else EXIT_VERDICT


def cmd_plot(args) -> int:
    if args.resolution < 2:
        sys.stderr.write("resolution must be at least 2\n")
        return EXIT_ERROR
    try:
        s = load_scenario(args.scenario)
    except HoferBoundError as exc:
        return _fail(exc)
    _emit(plot_profile(s, resolution=args.resolution), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hoferbound", description="Certified Hofer-distance bounds from boundary depth.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-assumption", help="check the index assumption for a scenario")
    p.add_argument("scenario")
    p.add_argument("--length-cap", type=float, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("enumerate", help="list Floer generators as JSON")
    p.add_argument("scenario")
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("certify", help="run the full certificate")
    p.add_argument("scenarios", nargs="+")
    p.add_argument("--brute-force", action="store_true")
    p.add_argument("--format", choices=("json", "csv", "markdown"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("slope", help="asymptotic slope table as CSV")
    p.add_argument("scenario")
    p.add_argument("--m-max", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_slope)

    p = sub.add_parser("plot", help="profile samples as CSV")
    p.add_argument("scenario")
    p.add_argument("--resolution", type=int, default=1000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
