"""Command-line entry point: ``survopt repro | validate | solve``.

Exit codes: 0 success, 1 computation or validation failure, 2 usage or
schema error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from . import eoq, horizon, repro, stratified, validate
from .errors import SurvoptError
from .repro import Table, to_csv
from .scenario import SchemaError, build_model, load_scenario
from .stats import SIGN_CONSISTENT, STRICT_PRINT

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

MODELS = {
    "fuzzy-eoq": ("all", "crisp", "fuzzy"),
    "horizon": ("optimize", "exhaustive"),
    "attribute": ("auto", "single-phase", "two-phase"),
}


class UsageError(Exception):
    pass


def resolve_seed(seed: int | None) -> int:
    """Explicit --seed, else SURVOPT_SEED, else 0."""
    if seed is not None:
        return seed
    raw = os.environ.get("SURVOPT_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"SURVOPT_SEED must be an integer, got {raw!r}") from None


def _add_convention(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--strict-print", dest="convention", action="store_const", const=STRICT_PRINT,
                   help="use the coefficients exactly as written (default)")
    g.add_argument("--sign-consistent", dest="convention", action="store_const", const=SIGN_CONSISTENT,
                   help="use the sign-consistent coefficient variant")
    p.set_defaults(convention=STRICT_PRINT)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="survopt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("repro", help="recompute a table and diff it against its reference")
    p.add_argument("table_id", choices=repro.TABLE_IDS)
    p.add_argument("--out", default="repro-out", help="output directory (default: repro-out)")
    _add_convention(p)

    p = sub.add_parser("validate", help="run property and oracle suites")
    p.add_argument("suite", choices=validate.SUITES + ("all",))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="write the JSON verdict to this file")
    p.add_argument("--json", action="store_true", help="print the JSON verdict instead of the summary")

    p = sub.add_parser("solve", help="solve a scenario file")
    p.add_argument("scenario")
    p.add_argument("--model", default=None, help="model variant; depends on the scenario kind")
    p.add_argument("--ga", action="store_true", help="horizon scenarios: use the genetic algorithm")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--ct-star", type=float, default=None,
                   help="fuzzy-eoq scenarios: per-unit transport cost for the no-release model")
    p.add_argument("--out", default=None, help="write the solution table as CSV")
    _add_convention(p)
    return parser


# -------------------------------------------------------------------- repro


def cmd_repro(args: argparse.Namespace) -> int:
    res = repro.run_repro(args.table_id, args.out, args.convention)
    counts = {v: sum(d.verdict == v for d in res.diff) for v in ("PASS", "DOC", "FAIL")}
    for d in res.diff:
        if d.verdict != "PASS":
            r = d.ref
            print(f"{d.verdict:<4} {r.row}:{r.column} computed {d.computed:.6g} reference {r.reference:.6g}"
                  f" ({100 * d.rel_error:.2f}%)")
    print(f"{args.table_id}: {counts['PASS']} PASS, {counts['DOC']} DOC, {counts['FAIL']} FAIL")
    for name, path in res.paths.items():
        print(f"  {name}: {path}")
    return EXIT_FAIL if counts["FAIL"] else EXIT_OK


# ----------------------------------------------------------------- validate


def cmd_validate(args: argparse.Namespace) -> int:
    seed = resolve_seed(args.seed)
    checks = validate.run_suite(args.suite, seed)
    v = validate.verdict(args.suite, seed, checks)
    text = validate.verdict_json(v)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w", newline="\n", encoding="utf-8") as f:
            f.write(text)
    print(text if args.json else validate.summary(checks), end="" if args.json else "\n")
    return EXIT_OK if v["passed"] else EXIT_FAIL


# -------------------------------------------------------------------- solve


def _check_model(kind: str, model: str | None) -> str | None:
    if model is None:
        return MODELS[kind][0] if kind in MODELS else None
    allowed = MODELS.get(kind, ())
    if model not in allowed:
        raise UsageError(f"--model {model!r} not valid for {kind} scenarios; choose from {allowed or 'none'}")
    return model


def solve_scenario(sc, args: argparse.Namespace) -> Table:
    model = _check_model(sc.kind, args.model)
    if args.ga and sc.kind != "horizon":
        raise UsageError("--ga applies to horizon scenarios only")
    if args.ct_star is not None and sc.kind != "fuzzy-eoq":
        raise UsageError("--ct-star applies to fuzzy-eoq scenarios only")
    obj = build_model(sc)
    conv = args.convention
    label = sc.label or sc.kind

    if sc.kind == "stratified":
        rows = [(e.value, m, p) for e, m, p in stratified.pre_table(obj, conv)]
        return Table(repro.STRAT_HEADER, rows, ("estimator",))
    if sc.kind == "srs":
        return Table(repro.SRS_HEADER, repro.srs_rows(obj, label, conv), ("estimator", "population"))
    if sc.kind == "attribute":
        two = model == "two-phase" or (model == "auto" and obj.n_prime is not None)
        if two and obj.n_prime is None:
            raise SchemaError("$.payload.n_prime", "required for the two-phase model")
        rows = repro.two_phase_rows(obj, label, conv) if two else repro.single_phase_rows(obj, label)
        return Table(repro.MEMBER_HEADER, rows, ("member_id",))
    if sc.kind == "fuzzy-eoq":
        return Table(repro.EOQ_HEADER, _eoq_rows(obj, model, args.ct_star, conv), ("model",))
    if sc.kind == "horizon":
        if args.ga:
            pol = horizon.ga_optimize(obj, horizon.GaConfig(seed=resolve_seed(args.seed))).policy
        elif model == "exhaustive":
            m, k, _ = horizon.exhaustive_search(obj)
            pol = horizon.policy_at(m, k, obj)
        else:
            pol = horizon.optimize(obj)
        row = tuple(horizon.policy_as_row(pol).values())
        return Table(repro.HORIZON_HEADER, [row], ("m",))
    raise UsageError(f"unsupported scenario kind {sc.kind!r}")


def _eoq_rows(sc, model: str, ct_star: float | None, conv: str) -> list[tuple]:
    crisp, fuzzy = sc.crisp, sc.fuzzy
    if ct_star is not None:
        crisp, fuzzy = replace(crisp, Ct_star=ct_star), replace(fuzzy, Ct_star=ct_star)
    variants = []
    if model in ("all", "crisp"):
        variants.append(("crisp", crisp, lambda: eoq.solve_crisp(crisp)))
    if model in ("all", "fuzzy"):
        variants.append(("fuzzy", fuzzy, lambda: eoq.solve_fuzzy(fuzzy, conv)))
    rows = []
    for name, p, release in variants:
        s = release()
        rows.append((f"{name}-release", s.Q, s.K, s.cost, s.converged))
        if p.Ct_star is None:
            print(f"note: {name}-no-release skipped; give ct_star in the scenario or --ct-star", file=sys.stderr)
            continue
        s = eoq.solve_no_release(p, conv)
        rows.append((f"{name}-no-release", s.Q, s.K, s.cost, s.converged))
    return rows


def _print_table(t: Table) -> None:
    cells = [[repro.fmt(v) for v in r] for r in t.rows]
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(t.header)]
    print("  ".join(h.ljust(w) for h, w in zip(t.header, widths)).rstrip())
    for r in cells:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())


def cmd_solve(args: argparse.Namespace) -> int:
    sc = load_scenario(args.scenario)
    table = solve_scenario(sc, args)
    _print_table(table)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w", newline="\n", encoding="utf-8") as f:
            f.write(to_csv(table.header, table.rows))
    return EXIT_OK


COMMANDS = {"repro": cmd_repro, "validate": cmd_validate, "solve": cmd_solve}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SurvoptError, ArithmeticError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
