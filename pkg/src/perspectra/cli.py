"""Command-line front end.

Exit codes: 0 success, 1 malformed input, 2 rejected precondition (or a
verification sweep with anomalies), 3 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass

from . import __version__
from .errors import CapExceeded, PreconditionError
from .literals import (LiteralError, parse_group, parse_module, parse_ring, parse_rows,
                       parse_subgroup, rows_literal)

log = logging.getLogger("perspectra")


@dataclass
class RunRecord:
    command: list
    inputs: dict
    verdict: dict
    elapsed_ms: float
    version: str
    seed: int

    def dumps(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, ensure_ascii=False)


class _Output:
    """Prints verdicts and appends run records to ``--out``."""

    def __init__(self, args, argv):
        self.args = args
        self.argv = argv
        self.start = time.perf_counter()
        self.stream = open(args.out, "a", encoding="utf-8") if getattr(args, "out", None) else None

    def record(self, inputs: dict, verdict: dict, elapsed_ms: float | None = None):
        if self.stream is None:
            return
        if elapsed_ms is None:
            elapsed_ms = (time.perf_counter() - self.start) * 1e3
        rec = RunRecord(list(self.argv), inputs, verdict, round(elapsed_ms, 3),
                        __version__, self.args.seed)
        self.stream.write(rec.dumps() + "\n")
        self.stream.flush()

    def emit(self, verdict: dict, text: str):
        if self.args.json:
            print(json.dumps(verdict, sort_keys=True, ensure_ascii=False))
        else:
            print(text)

    def close(self):
        if self.stream is not None:
            self.stream.close()


# -- commands --------------------------------------------------------------------------

def cmd_group_complement(args, out: _Output) -> int:
    from .pgroups import finite_common_complement
    GL = parse_group(args.group)
    A = parse_subgroup(GL, args.A)
    C = parse_subgroup(GL, args.C)
    U, trace = finite_common_complement(GL.group, A, C, fallback=not args.no_fallback,
                                        with_trace=True)
    verdict = {"group": GL.literal(), "A": GL.subgroup_literal(A), "C": GL.subgroup_literal(C),
               "U": GL.subgroup_literal(U), "fallback_used": trace.fallback_used}
    if args.trace:
        steps = []
        for step in trace.steps:
            step = dict(step)
            if "lifted" in step:
                step["lifted"] = [GL.element_literal(g) for g in step["lifted"]]
            if "generators" in step:
                step["generators"] = [GL.element_literal(g) for g in step["generators"]]
            steps.append(step)
        verdict["trace"] = steps
    out.record({"group": args.group, "A": args.A, "C": args.C}, verdict)
    text = f"U = {verdict['U']}"
    if args.trace:
        text += "\n" + "\n".join(json.dumps(s, ensure_ascii=False) for s in verdict["trace"])
    out.emit(verdict, text)
    return 0


def cmd_verify(args, out: _Output) -> int:
    from . import caps
    from .sweep import sweep
    caps.require("sweep", args.max_order, "verification sweep")
    totals = {"groups": 0, "pairs": 0, "failures": 0, "fallbacks": 0,
              "bruteforce_checked": 0, "counterexamples": 0}
    anomalies = []
    for g in sweep(args.max_order, fallback=not args.no_fallback,
                   bruteforce_pairs=args.bruteforce_pairs, workers=args.workers):
        totals["groups"] += 1
        totals["pairs"] += g.pairs
        totals["failures"] += g.failures
        totals["fallbacks"] += g.fallbacks
        if g.bruteforce != "skipped":
            totals["bruteforce_checked"] += 1
        if g.bruteforce == "counterexample":
            totals["counterexamples"] += 1
        if g.failures or g.bruteforce == "counterexample":
            anomalies.append(g.group)
        out.record({"group": g.group}, g.to_json(), g.elapsed_ms)
        if args.trace:
            print(json.dumps(g.to_json(), ensure_ascii=False), file=sys.stderr)
    summary = {"max_order": args.max_order, **totals, "anomalies": anomalies,
               "all_perspective": not anomalies}
    text = (f"{totals['groups']} groups, {totals['pairs']} summand pairs; "
            f"failures {totals['failures']}, fallbacks {totals['fallbacks']}, "
            f"brute-force checked {totals['bruteforce_checked']} groups; "
            + ("all perspective" if not anomalies else "anomalies: " + ", ".join(anomalies)))
    out.emit(summary, text)
    return 0 if not anomalies else 2


def _parse_primes(text: str | None) -> list[int]:
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise LiteralError(text, 0, "expected comma-separated primes") from None


def _parse_bounds(text: str | None) -> dict:
    if not text:
        return {}
    parts = text.split(",")
    if len(parts) != 3:
        raise LiteralError(text, 0, "expected --bounds m,w,e")
    try:
        m, w, e = (int(x) for x in parts)
    except ValueError:
        raise LiteralError(text, 0, "bounds must be integers") from None
    return {"param_bound": m, "witness_bound": w, "exponent_bound": e}


def cmd_rank1(args, out: _Output) -> int:
    from .rank1 import RationalGroupType, example_11_refute, gplusg_decide
    try:
        G = RationalGroupType.parse(args.type)
    except ValueError as exc:
        raise LiteralError(args.type, 0, str(exc)) from None
    not_div = _parse_primes(args.not_div)
    for p in not_div:
        if G.divisible_by(p):
            raise PreconditionError(f"type {G.literal()} is divisible by {p}")
    bounds = _parse_bounds(args.bounds)
    if not G.cofinite and G.primes == frozenset({11}):
        verdict = example_11_refute(G, bounds.get("exponent_bound", 12))
    else:
        verdict = gplusg_decide(G, bounds)
    result = verdict.to_json()
    out.record({"type": args.type, "not_div": not_div, "bounds": bounds}, result)
    out.emit(result, f"{verdict.status}: {json.dumps(verdict.certificate, sort_keys=True)}")
    return 0


def cmd_ring(args, out: _Output) -> int:
    from . import caps
    from .rings import check_condition4, end_ring_cardinality
    lit = parse_ring(args.ring)
    if lit.kind == "End":
        G = parse_group(lit.args[0]).group
        if end_ring_cardinality(G) > caps.caps()["ring"]:
            from .endcheck import check_condition4_end
            res = check_condition4_end(G)
            verdict = {"ring": lit.literal(), "perspective": res.holds, "engine": "end",
                       "condition4": res.to_json()}
            out.record({"ring": args.ring}, verdict)
            out.emit(verdict, f"perspective={str(res.holds).lower()}")
            return 0
    R = lit.build()
    res = check_condition4(R)
    verdict = {"ring": lit.literal(), "size": R.size, "perspective": res.holds,
               "engine": "table", "condition4": res.to_json()}
    out.record({"ring": args.ring}, verdict)
    out.emit(verdict, f"perspective={str(res.holds).lower()}")
    return 0


def cmd_vecspace(args, out: _Output) -> int:
    from .torsionfree import RationalSubspace, q_common_complement
    try:
        dim = int(args.dim)
    except ValueError:
        raise LiteralError(args.dim, 0, "dimension must be an integer") from None
    if dim < 0:
        raise LiteralError(args.dim, 0, "dimension must be >= 0")
    A = RationalSubspace.span(dim, parse_rows(args.A, dim))
    C = RationalSubspace.span(dim, parse_rows(args.C, dim))
    H = q_common_complement(dim, A, C)
    verdict = {"dim": dim, "U": rows_literal(H.rows())}
    out.record({"dim": dim, "A": args.A, "C": args.C}, verdict)
    out.emit(verdict, f"U = {verdict['U']}")
    return 0


def cmd_localized(args, out: _Output) -> int:
    mod = parse_module(args.module)
    if mod.kind == "Q":
        args.dim = str(mod.rank)
        return cmd_vecspace(args, out)
    if mod.kind == "Qp":
        from .torsionfree import LocalizedModule, LadderReport, localized_common_complement
        M = LocalizedModule(mod.p, mod.rank)
        report = LadderReport()
        U = localized_common_complement(M, parse_rows(args.A, mod.rank),
                                        parse_rows(args.C, mod.rank), report)
        verdict = {"module": mod.literal(), "U": rows_literal(U)}
        if args.trace:
            verdict["cases"] = dict(sorted(report.cases.items()))
    else:
        from .torsionfree import padic_common_complement
        A = parse_rows(args.A, mod.rank, rational=False)
        C = parse_rows(args.C, mod.rank, rational=False)
        U = padic_common_complement(mod.p, mod.N, mod.rank, A, C)
        verdict = {"module": mod.literal(),
                   "U": rows_literal([list(g.coords) for g in U.generators()])}
    out.record({"module": args.module, "A": args.A, "C": args.C}, verdict)
    out.emit(verdict, f"U = {verdict['U']}")
    return 0


# -- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed recorded with each run")
    common.add_argument("--json", action="store_true", help="print the verdict as JSON")
    common.add_argument("--out", metavar="FILE", help="append JSON-lines run records to FILE")
    common.add_argument("--trace", action="store_true", help="include the construction trace")
    common.add_argument("--no-fallback", action="store_true",
                        help="never fall back to brute force")

    parser = argparse.ArgumentParser(prog="perspectra", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="area", required=True)

    group = sub.add_parser("group", help="finite abelian groups").add_subparsers(
        dest="action", required=True)
    p = group.add_parser("complement", parents=[common],
                         help="common complement of two isomorphic summands")
    p.add_argument("group")
    p.add_argument("A")
    p.add_argument("C")
    p.set_defaults(func=cmd_group_complement)

    p = sub.add_parser("verify", parents=[common],
                       help="check every group of order <= N exhaustively")
    p.add_argument("--max-order", type=int, required=True, dest="max_order")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--bruteforce-pairs", type=int, default=50_000, dest="bruteforce_pairs",
                   help="also run the exhaustive oracle on groups with at most this many pairs")
    p.set_defaults(func=cmd_verify)

    rank1 = sub.add_parser("rank1", help="G (+) G for rank-1 torsion-free G").add_subparsers(
        dest="action", required=True)
    p = rank1.add_parser("check", parents=[common])
    p.add_argument("type")
    p.add_argument("--not-div", dest="not_div", metavar="P,Q,...")
    p.add_argument("--bounds", metavar="m,w,e")
    p.set_defaults(func=cmd_rank1)

    ring = sub.add_parser("ring", help="finite rings").add_subparsers(dest="action", required=True)
    p = ring.add_parser("check", parents=[common])
    p.add_argument("ring")
    p.set_defaults(func=cmd_ring)

    vec = sub.add_parser("vecspace", help="rational vector spaces").add_subparsers(
        dest="action", required=True)
    p = vec.add_parser("complement", parents=[common])
    p.add_argument("dim")
    p.add_argument("A")
    p.add_argument("C")
    p.set_defaults(func=cmd_vecspace)

    loc = sub.add_parser("localized", help="localized and p-adic free modules").add_subparsers(
        dest="action", required=True)
    p = loc.add_parser("complement", parents=[common])
    p.add_argument("module")
    p.add_argument("A")
    p.add_argument("C")
    p.set_defaults(func=cmd_localized)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; the contract reserves 2 for preconditions
        return 1 if exc.code else 0
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    out = _Output(args, argv)
    try:
        return args.func(args, out)
    except LiteralError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"error: verification failed: {exc}", file=sys.stderr)
        return 2
    finally:
        out.close()


if __name__ == "__main__":
    sys.exit(main())
