"""Command-line entry point.

Exact rationals print as ``p/q`` in lowest terms and floats with 12
significant digits, so repeated runs give byte-identical output.  Exit
status is 0 on success, 1 on invalid input (or a failed ``verify``), and 2
on an internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from . import analysis as an
from .montecarlo import SimulationConfig, run_trials, sample_permutations
from .shuffle import Permutation, rising_sequence_count
from .strategy import OptimalStrategy, play_with_feedback
from .verify import SUITES

SCHEMA_VERSION = 1
ASYMPTOTICS_LIMIT = 10000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _num(x):
    """JSON-ready number: exact values as ``"p/q"`` strings, floats rounded to 12 digits."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(f"{float(x):.12g}")


def envelope(command: str, parameters: dict, mode: str, results) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "parameters": parameters,
        "mode": mode,
        "results": results,
        "version": __version__,
    }
    return json.dumps(doc, sort_keys=True)


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _g_row(n: int, mode: str):
    if mode == "rational" and n > an.RATIONAL_LADDER_LIMIT:
        raise UsageError(f"rational mode requires n <= {an.RATIONAL_LADDER_LIMIT}; use --mode float")
    g = an.exact_G_ladder(n, mode)
    target = float(an.asymptotic_target(n))
    return n, g, target, float(g) - target


def cmd_exact_g(args) -> str:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    n, g, target, err = _g_row(args.n, args.mode)
    if args.json:
        results = {"n": n, "G": _num(g), "target": _num(target), "error": _num(err)}
        return envelope("exact-g", {"n": n, "mode": args.mode}, args.mode, results) + "\n"
    if args.csv:
        return _csv(["n", "G", "target", "error"], [(n, g, target, err)])
    return f"G({n}) = {fmt(g)}\ntarget = {fmt(target)}\nerror = {fmt(err)}\n"


def cmd_asymptotics(args) -> str:
    if not 1 <= args.max_n <= ASYMPTOTICS_LIMIT:
        raise UsageError(f"--max-n must be in 1..{ASYMPTOTICS_LIMIT}")
    rows = [(n, g, t, e) for n, g, _, t, e in an.asymptotics_rows(args.max_n)]
    if args.json:
        results = [
            {"n": n, "G": _num(g), "target": _num(t), "error": _num(e)} for n, g, t, e in rows
        ]
        return envelope("asymptotics", {"max_n": args.max_n}, "float", results) + "\n"
    return _csv(["n", "G", "target", "error"], rows)


def cmd_play(args) -> str:
    if args.perm is not None:
        try:
            perm = Permutation.parse(args.perm)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if args.n is not None and args.n != perm.n:
            raise UsageError(f"--n {args.n} does not match a permutation of {perm.n} cards")
    else:
        if args.n is None or args.n < 1:
            raise UsageError("--n is required with --seed and must be positive")
        deck = sample_permutations(args.n, args.seed, np.array([0], dtype=np.uint64))[0]
        perm = Permutation(tuple(int(c) for c in deck))
    if rising_sequence_count(perm) > 2:
        raise UsageError(
            f"{perm} has {rising_sequence_count(perm)} rising sequences; one riffle shuffle gives at most 2"
        )
    t = play_with_feedback(OptimalStrategy(args.tie_break), perm)
    if args.json:
        params = {"n": perm.n, "perm": args.perm, "seed": args.seed, "tie_break": args.tie_break}
        return envelope("play", params, "exact", t.as_dict()) + "\n"
    lines = [f"deck: {perm}", "step,guess,revealed,correct"]
    lines += [f"{i},{s.guess},{s.revealed},{int(s.correct)}" for i, s in enumerate(t.steps, 1)]
    lines.append(f"reward: {t.reward}")
    return "\n".join(lines) + "\n"


def cmd_simulate(args) -> str:
    try:
        config = SimulationConfig(args.n, args.trials, args.seed, args.sampler, args.strategy)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = run_trials(config, workers=args.workers)
    if args.csv:
        return report.histogram_csv()
    d = report.to_dict(timing=args.timing)
    d["mean_reward"] = _num(d["mean_reward"])
    d["standard_error"] = _num(d["standard_error"])
    return envelope("simulate", d.pop("config"), "float", d) + "\n"


def cmd_table_f(args) -> str:
    if args.max < 0:
        raise UsageError("--max must be nonnegative")
    table = an.interleave_table(args.max)
    rows = [(a, s - a, table(a, s - a)) for s in range(args.max + 1) for a in range(s + 1)]
    if args.json:
        results = [{"a": a, "b": b, "f": _num(v)} for a, b, v in rows]
        return envelope("table-f", {"max": args.max}, "rational", results) + "\n"
    return _csv(["a", "b", "f"], rows)


def cmd_verify(args):
    checks = SUITES[args.suite](args.max_n)
    if args.json:
        results = [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks]
        out = envelope("verify", {"suite": args.suite, "max_n": args.max_n}, "mixed", results) + "\n"
    else:
        out = "".join(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  {c.detail}\n" for c in checks)
    return out, all(c.passed for c in checks)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="riffleguess", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def output_flags(q, csv_ok=True):
        g = q.add_mutually_exclusive_group()
        g.add_argument("--json", action="store_true", help="emit a JSON envelope")
        if csv_ok:
            g.add_argument("--csv", action="store_true", help="emit CSV")

    q = sub.add_parser("exact-g", help="optimal expected reward G(n) and its asymptotic target")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--mode", choices=["rational", "float"], default="rational")
    output_flags(q)
    q.set_defaults(func=cmd_exact_g)

    q = sub.add_parser("asymptotics", help="CSV of n, G, target, error for n = 1..max-n")
    q.add_argument("--max-n", type=int, required=True)
    output_flags(q)
    q.set_defaults(func=cmd_asymptotics)

    q = sub.add_parser("play", help="play the optimal strategy against one deck")
    q.add_argument("--n", type=int)
    src = q.add_mutually_exclusive_group(required=True)
    src.add_argument("--perm", help='deck top to bottom, e.g. "2,3,1"')
    src.add_argument("--seed", type=int, help="sample the deck from this seed")
    q.add_argument("--tie-break", choices=["low", "high"], default="low")
    output_flags(q, csv_ok=False)
    q.set_defaults(func=cmd_play)

    q = sub.add_parser("simulate", help="Monte Carlo estimate of the expected reward")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--trials", type=int, required=True)
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--sampler", choices=["binary_word", "two_step"], default="binary_word")
    q.add_argument("--strategy", choices=["optimal", "optimal_high", "greedy_bayes"], default="optimal")
    q.add_argument("--workers", type=int, default=1)
    q.add_argument("--timing", action="store_true", help="include elapsed time (breaks byte-identity)")
    g = q.add_mutually_exclusive_group()
    g.add_argument("--json", action="store_true", help="JSON envelope (the default)")
    g.add_argument("--csv", action="store_true", help="reward histogram as CSV")
    q.set_defaults(func=cmd_simulate)

    q = sub.add_parser("table-f", help="interleaving reward table f(a, b) for a + b <= max")
    q.add_argument("--max", type=int, required=True)
    output_flags(q)
    q.set_defaults(func=cmd_table_f)

    q = sub.add_parser("verify", help="replay closed forms against enumeration oracles")
    q.add_argument("--suite", choices=sorted(SUITES), default="paper")
    q.add_argument("--max-n", type=int, default=12)
    output_flags(q, csv_ok=False)
    q.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        out = args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"riffleguess: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"riffleguess: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    ok = True
    if isinstance(out, tuple):
        out, ok = out
    sys.stdout.write(out)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
