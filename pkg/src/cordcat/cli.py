"""Command-line front end.

Exit codes: 0 success, 1 a property violation was found (``analyze``,
``axioms``), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .dsl import SourceFile, parse, print_interaction, print_process
from .errors import CordError, DSLSyntaxError
from .interaction import DEFAULT_STRATEGY, STRATEGIES, Interaction, int_compose
from .loops import LOOP, UNIFORM, check_axioms_fin, check_monad_laws, hom_census, uniformity_counterexample
from .process import CordProcess, alpha_canonical, compose, trace
from .protocols import analyze, report

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def load_source(name: str) -> SourceFile:
    """Read a ``.cord`` file; bare names fall back to the shipped corpus."""
    path = Path(name)
    if path.exists():
        text = path.read_text(encoding="utf-8")
    else:
        shipped = resources.files("cordcat") / "data" / path.name
        if not shipped.is_file():
            raise UsageError(f"no such file: {name}")
        text = shipped.read_text(encoding="utf-8")
    return parse(text)


def _process(sf: SourceFile, name: str) -> CordProcess:
    if name in sf.processes:
        return sf.processes[name]
    if name in sf.interactions:
        return sf.interactions[name].body
    raise UsageError(f"no process named {name!r}")


def _interaction(sf: SourceFile, name: str) -> Interaction:
    if name not in sf.interactions:
        raise UsageError(f"no interaction named {name!r}")
    return sf.interactions[name]


def _process_json(p: CordProcess) -> dict:
    c = alpha_canonical(p)
    return {
        "inputs": [[v.name, v.sort] for v in c.inputs],
        "events": [{"label": e.label, "agent": str(e.agent), "action": str(e.action)}
                   for e in c.space.events],
        "order": [list(pair) for pair in sorted(c.space.order)],
        "outputs": [str(t) for t in c.outputs],
        "free": sorted(v.name for v in c.free_vars() - c.freed),
        "freed": sorted(v.name for v in c.freed),
        "text": print_process(c, canonical=False),
    }


def _emit(args, text: str, data: dict) -> None:
    if args.json:
        print(json.dumps(data, indent=2, ensure_ascii=False))
    else:
        print(text)


# -- subcommands ---------------------------------------------------------------------

def cmd_compose(args) -> int:
    sf = load_source(args.file)
    r = compose(_process(sf, args.p), _process(sf, args.q))
    _emit(args, print_process(r), {"command": "compose", "result": _process_json(r)})
    return EXIT_OK


def cmd_trace(args) -> int:
    sf = load_source(args.file)
    r = trace(_process(sf, args.p), args.ell)
    _emit(args, print_process(r), {"command": "trace", "result": _process_json(r)})
    return EXIT_OK


def cmd_int_compose(args) -> int:
    sf = load_source(args.file)
    r = int_compose(_interaction(sf, args.p), _interaction(sf, args.q), args.strategy)
    data = {
        "command": "int-compose",
        "strategy": args.strategy,
        "dom": {"plus": list(r.dom.plus), "minus": list(r.dom.minus)},
        "cod": {"plus": list(r.cod.plus), "minus": list(r.cod.minus)},
        "result": _process_json(r.body),
    }
    _emit(args, print_interaction(r), data)
    return EXIT_OK


def cmd_analyze(args) -> int:
    sf = load_source(args.file)
    if args.protocol not in sf.protocols:
        raise UsageError(f"no protocol named {args.protocol!r}")
    if args.goal not in sf.goals:
        raise UsageError(f"no goal named {args.goal!r}")
    proto = sf.protocol(args.protocol)
    goal = sf.goal(args.goal, proto.process)
    text, ok = report(proto, goal)
    if args.json:
        data = {
            "command": "analyze",
            "protocol": args.protocol,
            "goal": args.goal,
            "ok": ok,
            "verdicts": [{"section": sec, "claim": v.claim, "passed": v.passed, "witness": v.witness}
                         for sec, v in analyze(proto, goal)],
        }
        print(json.dumps(data, indent=2, ensure_ascii=False))
    else:
        print(text)
    return EXIT_OK if ok else EXIT_VIOLATION


def _sizes(text: str) -> tuple:
    try:
        a, b, u = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("sizes are three integers a,b,u") from None
    if min(a, b, u) < 0:
        raise argparse.ArgumentTypeError("sizes are non-negative")
    return a, b, u


def cmd_axioms(args) -> int:
    a, b, u = args.sizes
    results = check_axioms_fin(a, b, u) + check_monad_laws(a, b, u)
    witness = uniformity_counterexample(a, b, u)
    ok = all(r.ok for r in results)
    lines = [r.line() for r in results]
    if witness:
        f, g, h = witness
        lines.append(f"uniformity witness in {LOOP}: f = {f}; g = {g}; h = {' '.join(map(str, h.table)) or '-'}")
    data = {
        "command": "axioms",
        "sizes": [a, b, u],
        "ok": ok,
        "results": [{"name": r.name, "variant": r.variant, "instances": r.instances,
                     "passed": r.passed, "expected": r.expected, "counterexample": r.counterexample}
                    for r in results],
        "uniformity_witness": None if not witness else
        {"f": str(witness[0]), "g": str(witness[1]), "h": list(witness[2].table)},
    }
    _emit(args, "\n".join(lines), data)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_census(args) -> int:
    variant = UNIFORM if args.uniform else LOOP
    c = hom_census(args.a, args.b, args.u_max, variant)
    data = {
        "command": "census",
        "a": c.a, "b": c.b, "u_max": c.u_max, "variant": c.variant,
        "classes": c.class_count,
        "formula_orbits": c.formula_count,
        "formula_tables": c.formula_tables,
        "canonical_consistent": c.canonical_consistent,
        "discrepancy": c.discrepancy,
        "representatives": [str(r) for r in c.representatives],
    }
    _emit(args, "\n".join(c.lines()), data)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="structured output")
    ap = argparse.ArgumentParser(prog="cordcat", description=__doc__.splitlines()[0], parents=[common])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compose", parents=[common], help="sequential composition of two processes")
    p.add_argument("file")
    p.add_argument("p")
    p.add_argument("q")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("trace", parents=[common], help="feed the last L outputs back")
    p.add_argument("file")
    p.add_argument("p")
    p.add_argument("ell", metavar="L", type=int)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("int-compose", parents=[common], help="compose two interactions")
    p.add_argument("file")
    p.add_argument("p")
    p.add_argument("q")
    p.add_argument("--strategy", choices=STRATEGIES, default=DEFAULT_STRATEGY)
    p.set_defaults(func=cmd_int_compose)

    p = sub.add_parser("analyze", parents=[common], help="check a security goal on a protocol run")
    p.add_argument("file")
    p.add_argument("protocol")
    p.add_argument("goal")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("axioms", parents=[common], help="check trace and monad laws on small loop models")
    p.add_argument("--sizes", type=_sizes, default=(2, 2, 2), metavar="a,b,u")
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("census", parents=[common], help="equivalence classes of small loop morphisms")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("u_max", type=int)
    p.add_argument("--uniform", action="store_true", help="use the uniform variant")
    p.set_defaults(func=cmd_census)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.json = getattr(args, "json", False)
    try:
        return args.func(args)
    except DSLSyntaxError as exc:
        print(f"{args.file}:{exc}", file=sys.stderr)
    except (UsageError, CordError, TypeError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"cordcat: error: {msg}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
