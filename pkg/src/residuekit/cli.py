"""Command-line front end.

Exit codes: 0 success, 1 an identity failed, 2 usage or parse error,
3 domain error (quotient not finite over the base, mismatched denominators).
Reports are deterministic; wall time is only printed with ``--timing``.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time

from . import __version__
from .exactnum import Field, FieldError
from .fubini import tower_instance_from_json, verify_fubini, verify_fubini_series
from .localcoh import (DenominatorMismatch, RelationMismatch, common_normal_form, frac_equal,
                       is_zero, parse_fraction)
from .polyring import GroebnerBudgetExceeded, NotFiniteOverBase, ParseError, PolyTower
from .residue import (InstanceError, base_change_residue, instance_from_json, residue,
                      specialized_tower, trace_tau)
from .suites import SUITES, SuiteConfig, run_case, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--field", default=None, help="Q or Fp:<p> (overrides the instance file)")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--degree-bound", type=int, default=6)
    p.add_argument("--monic-bound", type=int, default=32)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--timing", action="store_true", help="append wall time (breaks byte-identical output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="residuekit", description="Exact residues and generalized fractions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("residue", help="residue of an instance file")
    p.add_argument("file")
    _common(p)

    p = sub.add_parser("trace", help="tau(b * form (x) 1/t) for an instance file")
    p.add_argument("file")
    p.add_argument("--b", default="1", help="element b of B (default 1)")
    _common(p)

    p = sub.add_parser("fraction", help="compare generalized fractions")
    p.add_argument("first")
    p.add_argument("second", nargs="?")
    p.add_argument("--vars", default=None, help="comma-separated variables (default: inferred)")
    _common(p)

    p = sub.add_parser("fubini", help="check the iterated residue identity for a tower instance")
    p.add_argument("file")
    p.add_argument("--series", action="store_true", help="also run the truncated power-series variant")
    _common(p)

    p = sub.add_parser("basechange", help="compare sigma(res) with res(sigma)")
    p.add_argument("file")
    p.add_argument("--map", action="append", default=[], metavar="VAR=EXPR",
                   help="image of a base variable (overrides the file's base_change)")
    _common(p)

    p = sub.add_parser("verify", help="run a seeded verification suite")
    p.add_argument("suite", nargs="?")
    p.add_argument("--replay", default=None, help="re-run the failures recorded in a report file")
    _common(p)
    return parser


def _config(args) -> SuiteConfig:
    field = Field.parse(args.field) if args.field else Field(0)
    return SuiteConfig(field=field, degree_bound=args.degree_bound, monic_bound=args.monic_bound)


def _load_json(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(data, dict):
        raise UsageError(f"{path}: expected a JSON object")
    return data


def _with_field(data: dict, args) -> dict:
    if args.field:
        data = dict(data)
        data["field"] = args.field
    return data


def _emit(report: dict, args, out) -> None:
    if args.format == "json":
        out.write(json.dumps(report, indent=2, sort_keys=False) + "\n")
        return
    for key, value in report.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=False)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        out.write(f"{key}: {value}\n")


# ---------------------------------------------------------------------------
# verbs

def cmd_residue(args) -> tuple[dict, int]:
    inst = instance_from_json(_with_field(_load_json(args.file), args))
    value = residue(inst, args.monic_bound)
    return {"verb": "residue", "input": args.file, "tower": inst.tower.describe(),
            "result": str(value)}, EXIT_OK


def cmd_trace(args) -> tuple[dict, int]:
    inst = instance_from_json(_with_field(_load_json(args.file), args))
    if any(a != 1 for a in inst.exps):
        raise UsageError("trace instances take exponent 1 on every denominator")
    b = inst.tower(args.b)
    value = trace_tau(list(inst.gens), inst.form, b, inst.base, args.monic_bound)
    return {"verb": "trace", "input": args.file, "b": str(b), "result": str(value)}, EXIT_OK


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _fraction_tower(args) -> PolyTower:
    field = Field.parse(args.field) if args.field else Field(0)
    if args.vars:
        names = [v.strip() for v in args.vars.split(",") if v.strip()]
    else:
        text = args.first + " " + (args.second or "")
        names = sorted(set(_IDENT.findall(text)))
    if not names:
        names = ["x"]
    return PolyTower([[], names], field)


def cmd_fraction(args) -> tuple[dict, int]:
    tower = _fraction_tower(args)
    x = parse_fraction(args.first, tower)
    report = {"verb": "fraction", "first": str(x)}
    if args.second is None:
        report["zero"] = is_zero(x)
        return report, EXIT_OK
    y = parse_fraction(args.second, tower)
    report["second"] = str(y)
    report["equal"] = frac_equal(x, y)
    nx, ny = common_normal_form(x, y)
    report["level"] = list(nx.exps)
    report["normal_forms"] = [str(nx), str(ny)]
    return report, EXIT_OK


def cmd_fubini(args) -> tuple[dict, int]:
    inst = tower_instance_from_json(_with_field(_load_json(args.file), args))
    rep = verify_fubini(inst, args.monic_bound)
    report = {"verb": "fubini", "input": args.file, **rep.as_dict()}
    ok = rep.equal
    if args.series:
        srep = verify_fubini_series(inst, None, args.monic_bound)
        report["series"] = srep.as_dict()
        ok = ok and srep.equal
    return report, EXIT_OK if ok else EXIT_FAIL


def cmd_basechange(args) -> tuple[dict, int]:
    inst = instance_from_json(_with_field(_load_json(args.file), args))
    images = dict(inst.base_change or {})
    for item in args.map:
        if "=" not in item:
            raise UsageError(f"--map expects VAR=EXPR, got {item!r}")
        k, v = item.split("=", 1)
        images[k.strip()] = v.strip()
    if not images:
        raise UsageError("no base change given (file 'base_change' or --map)")
    left, right = base_change_residue(inst, images, args.monic_bound)
    return {"verb": "basechange", "input": args.file, "map": images,
            "target": specialized_tower(inst.tower, images).describe(),
            "sigma_res": str(left), "res_sigma": str(right), "equal": left == right}, \
        EXIT_OK if left == right else EXIT_FAIL


def _replay_record(suite, seed, res, config) -> dict:
    return {"suite": suite, "seed": seed, "index": res.index, "field": config.field.name,
            "degree_bound": config.degree_bound, "monic_bound": config.monic_bound,
            "instance": res.instance, "result": res.result}


def cmd_verify(args) -> tuple[dict, int]:
    config = _config(args)
    if args.replay:
        data = _load_json(args.replay)
        records = data.get("failures", [data])
        results = []
        for rec in records:
            try:
                suite, seed, index = rec["suite"], int(rec["seed"]), int(rec["index"])
            except (KeyError, TypeError, ValueError):
                raise UsageError("replay file needs suite, seed and index") from None
            if suite not in SUITES:
                raise UsageError(f"unknown suite {suite!r}")
            cfg = SuiteConfig(Field.parse(rec.get("field", "Q")), int(rec.get("degree_bound", 6)),
                              int(rec.get("monic_bound", 32)))
            res = run_case(suite, seed, index, cfg)
            results.append(_replay_record(suite, seed, res, cfg) | {"passed": res.passed})
        failed = [r for r in results if not r["passed"]]
        return {"verb": "verify", "replay": args.replay, "replayed": len(results),
                "failed": len(failed), "failures": failed}, EXIT_FAIL if failed else EXIT_OK
    if args.suite is None:
        raise UsageError("verify needs a suite name or --replay")
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; known: {', '.join(SUITES)}")
    if args.count < 0:
        raise UsageError("--count must be non-negative")
    results = sorted(run_suite(args.suite, args.seed, args.count, config), key=lambda r: r.index)
    failures = [_replay_record(args.suite, args.seed, r, config) for r in results if not r.passed]
    report = {"verb": "verify", "suite": args.suite, "seed": args.seed, "count": args.count,
              "field": config.field.name, "degree_bound": config.degree_bound,
              "monic_bound": config.monic_bound,
              "passed": sum(r.passed for r in results), "failed": len(failures)}
    if args.format == "json":
        report["cases"] = [{"index": r.index, "passed": r.passed, "result": r.result} for r in results]
    report["failures"] = failures
    return report, EXIT_FAIL if failures else EXIT_OK


VERBS = {"residue": cmd_residue, "trace": cmd_trace, "fraction": cmd_fraction,
         "fubini": cmd_fubini, "basechange": cmd_basechange, "verify": cmd_verify}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        report, code = VERBS[args.verb](args)
    except (UsageError, ParseError, InstanceError, FieldError, json.JSONDecodeError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except NotFiniteOverBase as exc:
        err.write(f"domain error: {exc}\n")
        return EXIT_DOMAIN
    except (DenominatorMismatch, RelationMismatch, GroebnerBudgetExceeded) as exc:
        err.write(f"domain error: {exc}\n")
        return EXIT_DOMAIN
    except ValueError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    if args.timing:
        report["wall_time_s"] = round(time.perf_counter() - start, 3)
    _emit(report, args, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
