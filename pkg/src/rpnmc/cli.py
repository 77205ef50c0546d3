"""Command-line interface: ``rpnmc check|simulate|emit|stats``.

Exit status: 0 when a property holds (or a command succeeds), 1 when a
counterexample was found, 2 for usage, file or parse errors and 3 when a
state-space limit was hit. Besides file paths, nets may be given as
``builtin:n1`` (any fixture shipped in the package) or ``circle:N`` for a
generated ring of N places; rules may be given as ``builtin:r1``.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import catalog
from .ltl import FormulaError, FormulaSyntaxError, model_check, parse
from .maude import render_counterexample, write_files
from .net import PetriNet
from .pnml import PnmlError, load_net, load_rule
from .rules import DEFAULT_STEP_SIZE, Configuration, Rule
from .statespace import StateSpaceExceeded, explore, successors

EXIT_HOLDS = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_USAGE = 2
EXIT_LIMIT = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _resolve(source: str, suffix: str) -> Path:
    if source.startswith("builtin:"):
        name = source.split(":", 1)[1]
        path = catalog.fixture_path(name if name.endswith(".pnml") else name + suffix)
        if not path.exists():
            raise UsageError(f"no built-in fixture named {name!r}")
        return path
    return Path(source)


def _load_net(source: str) -> PetriNet:
    if source.startswith("circle:"):
        try:
            n = int(source.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad circle size in {source!r}") from None
        if n < 1:
            raise UsageError("circle size must be positive")
        return catalog.circle_net(n)
    path = _resolve(source, ".pnml")
    if not path.is_file():
        raise UsageError(f"net file not found: {path}")
    return load_net(path)


def _load_rule(source: str) -> Rule:
    path = _resolve(source, ".rule.pnml")
    if not path.is_file():
        raise UsageError(f"rule file not found: {path}")
    return load_rule(path)


def _configuration(args) -> Configuration:
    net = _load_net(args.net)
    rules = [_load_rule(r) for r in args.rules]
    names = [r.name for r in rules]
    if len(set(names)) != len(names):
        raise UsageError("rule names must be unique")
    return Configuration.initial(net, rules, step_size=args.step_size)


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rpnmc", description="Model checking for reconfigurable Petri nets.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, limits=True):
        sp.add_argument("net", help="net PNML file, builtin:NAME or circle:N")
        sp.add_argument("rules", nargs="*", help="rule PNML files or builtin:NAME")
        sp.add_argument("--step-size", type=_positive, default=DEFAULT_STEP_SIZE,
                        help="identifiers added to a pool when it runs empty (default %(default)s)")
        sp.add_argument("--strict-capacity", action="store_true",
                        help="check capacities against marking plus post-set before consumption")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        if limits:
            sp.add_argument("--max-states", type=_positive, default=1_000_000)
            sp.add_argument("--max-depth", type=_non_negative, default=None)
            sp.add_argument("--semantic-state-identity", action="store_true",
                            help="identify configurations up to renaming of ids")
            sp.add_argument("--workers", type=_positive, default=1)

    c = sub.add_parser("check", help="model check an LTL formula")
    common(c)
    c.add_argument("--ltl", required=True, help='formula, e.g. "[]<> enabled"')
    c.add_argument("--maude", action="store_true", help="print the counterexample in Maude result syntax")

    s = sub.add_parser("simulate", help="random walk over the state graph")
    common(s, limits=False)
    s.add_argument("--steps", type=_non_negative, default=20)
    s.add_argument("--seed", type=int, default=0)

    e = sub.add_parser("emit", help="write the Maude modules")
    common(e, limits=False)
    e.add_argument("--out-dir", required=True)
    e.add_argument("--ltl", default=None, help="formula to record in prop.maude")

    st = sub.add_parser("stats", help="explore and report state-space statistics")
    common(st)
    return p


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        sys.stdout.write(text)


def _steps_json(steps) -> list[dict]:
    return [{"marking": cfg.net.describe(), "transitions": [t.id for t in cfg.net.transitions],
             "action": label.to_json()} for cfg, label in steps]


def cmd_check(args) -> int:
    config = _configuration(args)
    formula = parse(args.ltl)
    v = model_check(config, formula, max_states=args.max_states, max_depth=args.max_depth,
                    semantic=args.semantic_state_identity, strict_capacity=args.strict_capacity,
                    workers=args.workers)
    payload = {
        "command": "check", "formula": str(formula), "holds": v.holds, "states": v.states,
        "edges": v.edges, "deadlocks": v.deadlocks, "elapsed": round(v.elapsed, 6),
        "counterexample": None,
    }
    lines = [f"formula: {formula}", f"result: {'holds' if v.holds else 'counterexample'}",
             f"states: {v.states}  edges: {v.edges}  deadlocks: {v.deadlocks}  time: {v.elapsed:.3f}s"]
    if not v.holds:
        payload["counterexample"] = {"prefix": _steps_json(v.prefix), "cycle": _steps_json(v.cycle),
                                     "deadlock": v.deadlock_tail}
        if args.maude:
            lines.append(render_counterexample(v).rstrip("\n"))
        else:
            lines.append("prefix:")
            lines += [f"  {cfg.net.describe()}  --{label}-->" for cfg, label in v.prefix] or ["  (empty)"]
            lines.append("cycle:" + (" (deadlock)" if v.deadlock_tail else ""))
            lines += [f"  {cfg.net.describe()}  --{label}-->" for cfg, label in v.cycle]
    _emit(args, payload, "\n".join(lines) + "\n")
    return EXIT_HOLDS if v.holds else EXIT_COUNTEREXAMPLE


def cmd_simulate(args) -> int:
    config = _configuration(args)
    rng = random.Random(args.seed)
    trace = [{"step": 0, "action": None, "marking": config.net.describe()}]
    lines = [f"0: {config.net.describe()}"]
    deadlock = False
    for i in range(1, args.steps + 1):
        succ = successors(config, args.strict_capacity)
        if not succ:
            deadlock = True
            lines.append(f"deadlock after {i - 1} steps")
            break
        label, config = succ[rng.randrange(len(succ))]
        trace.append({"step": i, "action": label.to_json(), "marking": config.net.describe()})
        lines.append(f"{i}: {label} -> {config.net.describe()}")
    payload = {"command": "simulate", "seed": args.seed, "trace": trace, "deadlock": deadlock}
    _emit(args, payload, "\n".join(lines) + "\n")
    return EXIT_HOLDS


def cmd_emit(args) -> int:
    config = _configuration(args)
    formula = parse(args.ltl) if args.ltl else None
    try:
        written = write_files(config, args.out_dir, formula)
    except OSError as exc:
        raise UsageError(f"cannot write to {args.out_dir}: {exc.strerror or exc}") from None
    payload = {"command": "emit", "files": [str(p) for p in written]}
    _emit(args, payload, "".join(f"wrote {p}\n" for p in written))
    return EXIT_HOLDS


def cmd_stats(args) -> int:
    config = _configuration(args)
    g = explore(config, max_states=args.max_states, max_depth=args.max_depth,
                semantic=args.semantic_state_identity, strict_capacity=args.strict_capacity,
                workers=args.workers)
    payload = {"command": "stats", "states": g.num_states, "edges": g.num_edges,
               "deadlocks": len(g.deadlocks), "truncated": g.truncated, "elapsed": round(g.elapsed, 6)}
    text = (f"states: {g.num_states}\nedges: {g.num_edges}\ndeadlocks: {len(g.deadlocks)}\n"
            f"truncated: {str(g.truncated).lower()}\ntime: {g.elapsed:.3f}s\n")
    _emit(args, payload, text)
    return EXIT_LIMIT if g.truncated else EXIT_HOLDS


COMMANDS = {"check": cmd_check, "simulate": cmd_simulate, "emit": cmd_emit, "stats": cmd_stats}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"rpnmc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PnmlError, FormulaSyntaxError, FormulaError, OSError, ValueError) as exc:
        print(f"rpnmc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StateSpaceExceeded as exc:
        print(f"rpnmc: {exc}", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
