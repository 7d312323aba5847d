"""Command-line front end.

Exit codes: 0 success (or ``entail`` answered yes), 1 invalid input or a
failing self-test, 2 chase stopped at its step limit (undecided), 3
``entail`` answered no.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .chase import STRATEGIES, StrategyConfig, run_chase, trace_to_jsonl
from .errors import ConfigError, ContractViolation, NotStratifiable, ParseError, TDatalogError, \
    Undecided, ValidationError
from .lang.analysis import check_weak_acyclicity, compute_stratification, is_stratifiable
from .lang.parser import parse_atom, parse_dataset, parse_program
from .lang.printer import format_atom, format_degree, format_rule
from .model import FuzzyDataset
from .reason import EntailmentQuery, entails, run_stratified

EXIT_OK, EXIT_INVALID, EXIT_UNDECIDED, EXIT_NO = 0, 1, 2, 3

SAMPLE_PREFIX = "sample:"


def _read(path: str) -> str:
    if path.startswith(SAMPLE_PREFIX):
        from .samples import sample_text
        return sample_text(path[len(SAMPLE_PREFIX):])
    return Path(path).read_text(encoding="utf-8")


def _load_program(path):
    return parse_program(_read(path), source=path)


def _load_data(paths, program) -> FuzzyDataset:
    data = FuzzyDataset()
    for p in paths or ():
        data = data.union(parse_dataset(_read(p), source=p, arities=program.arities))
    return data


def _config(args) -> StrategyConfig:
    return StrategyConfig.named(args.strategy, K=args.K, max_steps=args.max_steps,
                                unbounded=args.unbounded)


def _emit(args, payload: dict, table: str) -> None:
    if args.format == "structured":
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        print(table, end="" if table.endswith("\n") or not table else "\n")


# -- subcommands ------------------------------------------------------------

def cmd_check(args) -> int:
    program = _load_program(args.program)
    wa = check_weak_acyclicity(program)
    ok, strat = is_stratifiable(program)
    if ok:
        strat_text = f"stratifiable ({strat.n} {'stratum' if strat.n == 1 else 'strata'})"
    else:
        strat_text = "not stratifiable"
    summary = f"{program.fragment}; {'weakly acyclic' if wa else 'not weakly acyclic'}; {strat_text}"
    lines = [summary]
    if not wa:
        lines.append("cycle: " + ", ".join(map(str, wa.cycle)))
    if ok and strat.n > 1:
        for i, rules in enumerate(strat.strata, start=1):
            lines.append(f"stratum {i}:")
            lines.extend(f"  {format_rule(r)}" for r in rules)
    if not ok:
        # unary operators exclude existentials, so this raises the witness
        try:
            compute_stratification(program)
        except NotStratifiable as exc:
            lines.append(str(exc))
    payload = {
        "fragment": program.fragment,
        "rules": len(program),
        "weakly_acyclic": bool(wa),
        "cycle": [str(e) for e in wa.cycle],
        "stratifiable": ok,
        "strata": [[format_rule(r) for r in s] for s in strat.strata] if ok else None,
        "summary": summary,
    }
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _atoms_payload(interp) -> list:
    return [{"atom": format_atom(a), "degree": d} for a, d in interp.sorted_items()]


def cmd_run(args) -> int:
    program = _load_program(args.program)
    data = _load_data(args.data, program)
    if program.uses_unary_ops:
        if args.K != 1.0:
            raise ConfigError("programs with unary operators run at K = 1 only")
        run = run_stratified(program, data, max_steps=args.max_steps)
        interp = run.interpretation
        trace_steps = [s for r in run.results for s in r.trace]
        status = "completed"
        strategy = "stratified r-greedy"
        if args.trace:
            Path(args.trace).write_text(
                "".join(trace_to_jsonl(r) for r in run.results), encoding="utf-8")
    else:
        result = run_chase(program, data, _config(args))
        interp, trace_steps, status = result.interpretation, result.trace, result.status
        strategy = result.config.name
        if args.trace:
            Path(args.trace).write_text(trace_to_jsonl(result), encoding="utf-8")
    payload = {"status": status, "strategy": strategy, "K": args.K,
               "steps": len(trace_steps), "atoms": _atoms_payload(interp)}
    _emit(args, payload, interp.dump(6))
    if status != "completed":
        print(f"step limit reached after {len(trace_steps)} steps; active triggers remain",
              file=sys.stderr)
        return EXIT_UNDECIDED
    return EXIT_OK


def cmd_entail(args) -> int:
    program = _load_program(args.program)
    data = _load_data(args.data, program)
    goal = parse_atom(args.goal)
    query = EntailmentQuery(goal, args.c, args.K)
    try:
        res = entails(program, data, query, _config(args))
    except Undecided as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        if args.format == "structured":
            print(json.dumps({"goal": format_atom(goal), "answer": "undecided"}))
        else:
            print("undecided")
        return EXIT_UNDECIDED
    word = "yes" if res.answer else "no"
    payload = {"goal": format_atom(goal), "c": args.c, "K": args.K,
               "answer": word, "degree": res.degree}
    _emit(args, payload, f"{word} {format_degree(res.degree)}")
    return EXIT_OK if res.answer else EXIT_NO


def cmd_selftest(args) -> int:
    from .oracle.differential import run_suite

    log = (lambda m: print(m, file=sys.stderr)) if args.verbose else None
    report = run_suite(args.seed, args.caps, negative_control=args.negative_control, log=log)
    if args.format == "structured":
        print(report.to_json())
    else:
        print(report.to_table())
    return EXIT_OK if report.ok else EXIT_INVALID


# -- argument parsing -------------------------------------------------------

def _degree_arg(text: str) -> float:
    try:
        d = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= d <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is outside [0, 1]")
    return d


def _steps_arg(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("max steps must be non-negative")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tdatalog",
        description="Fuzzy Datalog with existential rules: check, chase and query.",
        epilog=f"Paths of the form '{SAMPLE_PREFIX}fig1.tdl' read bundled sample files.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, chase=True):
        p.add_argument("--format", choices=("table", "structured"), default="table")
        if chase:
            p.add_argument("program", help="program file (.tdl)")
            p.add_argument("--data", action="append", default=[],
                           help="dataset file (.tdf); repeatable, files are unioned")
            p.add_argument("--strategy", choices=STRATEGIES, default="r-greedy")
            p.add_argument("--K", type=_degree_arg, default=1.0)
            p.add_argument("--max-steps", type=_steps_arg, default=None)
            p.add_argument("--unbounded", action="store_true",
                           help="no step limit (may not terminate)")

    p = sub.add_parser("check", help="classify a program")
    p.add_argument("program")
    common(p, chase=False)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="chase a dataset and print the result")
    common(p)
    p.add_argument("--trace", help="write the trace (one JSON object per step)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("entail", help="decide whether a ground goal reaches degree c")
    common(p)
    p.add_argument("--goal", required=True)
    p.add_argument("--c", type=_degree_arg, default=1.0)
    p.set_defaults(func=cmd_entail)

    p = sub.add_parser("selftest", help="randomized differential suite")
    common(p, chase=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--caps", choices=("tiny", "small", "full"), default="small")
    p.add_argument("--negative-control", action="store_true",
                   help="add an instance with a broken t-norm; the run must fail")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ParseError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INVALID
    except (ConfigError, ContractViolation, ValidationError, NotStratifiable, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Undecided as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except TDatalogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
