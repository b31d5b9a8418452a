"""Command-line front end: ``copgambler <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .evaluator import RandomizedStrategy, Walk, expected_capture_meta, parse_walk
from .experiments import EXPERIMENTS, ExperimentError, emit, run_experiment
from .gamble import (
    Gamble,
    GambleError,
    MetaGamble,
    format_fraction,
    interval_meta,
    parse_gamble,
    random_sitter_meta,
    uniform_gamble,
    uniform_on_subset,
)
from .graph import Graph, GraphError, parse_graph, root_tree, spanning_tree
from .sim import simulate
from .solver import DEFAULT_TOL, solve_value, start_position_analysis, value_sandwich
from .strategies import (
    StarSweep,
    cycle_circling_strategy,
    dfs_patrol_strategy,
    known_gamble_walk,
    suffix_times,
    tree_pursuit_walk,
)

STRATEGY_NAMES = ("tree", "spanning-tree", "cycle-circle", "star-sweep:1", "star-sweep:2", "dfs-patrol", "stay:<v>")
META_NAMES = ("uniform", "uniform-leaves", "sitter-leaves", "sitter-all", "interval[:k]")


class CliError(Exception):
    pass


def _num(x) -> str | float | None:
    if isinstance(x, Fraction):
        return format_fraction(x)
    if isinstance(x, float):
        return "inf" if x == float("inf") else x
    return x


def _load_graph(path: str) -> Graph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def _load_gamble(path: str, n: int) -> Gamble:
    return parse_gamble(Path(path).read_text(encoding="utf-8"), n)


def resolve_meta(spec: str, g: Graph) -> MetaGamble:
    name, _, arg = spec.partition(":")
    if name == "uniform":
        return MetaGamble.pure(uniform_gamble(g.n))
    if name == "uniform-leaves":
        return MetaGamble.pure(uniform_on_subset(g.n, g.leaves()))
    if name == "sitter-leaves":
        return random_sitter_meta(g.n, g.leaves())
    if name == "sitter-all":
        return random_sitter_meta(g.n, range(g.n))
    if name == "interval":
        return interval_meta(g.n, int(arg) if arg else None)
    raise CliError(f"unknown meta-gamble {spec!r}; choose from {', '.join(META_NAMES)}")


def resolve_strategy(name: str, g: Graph, gamble: Gamble | None, start: int):
    """Strategy object for the simulator and exact evaluator."""
    if name.startswith("stay:"):
        return RandomizedStrategy.pure(Walk.stay(int(name.split(":", 1)[1])))
    if name in ("tree", "spanning-tree"):
        if gamble is None:
            raise CliError(f"strategy {name} needs a known gamble (--gamble)")
        if name == "tree":
            if not g.is_tree():
                raise CliError("strategy 'tree' needs a tree; use 'spanning-tree'")
            return RandomizedStrategy.pure(tree_pursuit_walk(root_tree(g, start), gamble))
        return RandomizedStrategy.pure(known_gamble_walk(g, gamble, start))
    if name == "cycle-circle":
        return cycle_circling_strategy(g, start)
    if name.startswith("star-sweep:"):
        return StarSweep(g, int(name.split(":", 1)[1]))
    if name == "dfs-patrol":
        return dfs_patrol_strategy(root_tree(spanning_tree(g), start))
    raise CliError(f"unknown strategy {name!r}; choose from {', '.join(STRATEGY_NAMES)}")


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_eval_walk(args) -> int:
    g = _load_graph(args.graph)
    gamble = _load_gamble(args.gamble, g.n)
    w = parse_walk(args.walk)
    w.check(g)
    e = expected_capture_meta(w, gamble)
    _write(json.dumps({"walk": str(w), "expected_capture_time": _num(e)}, indent=2), args.out)
    return 0


def cmd_tree_strategy(args) -> int:
    g = _load_graph(args.graph)
    gamble = _load_gamble(args.gamble, g.n)
    t = g if g.is_tree() else spanning_tree(g)
    rt = root_tree(t, args.start)
    w = tree_pursuit_walk(rt, gamble)
    e = expected_capture_meta(w, gamble)
    suffix = [
        {"vertex": v, "remaining_time": _num(tv), "branch_bound": _num(b), "ok": tv <= b}
        for v, tv, b in suffix_times(rt, gamble)
    ]
    ok = e <= g.n and all(r["ok"] for r in suffix)
    doc = {"walk": str(w), "expected_capture_time": _num(e), "n": g.n, "within_n": e <= g.n, "suffix": suffix}
    _write(json.dumps(doc, indent=2), args.out)
    return 0 if ok else 1


def cmd_solve(args) -> int:
    g = _load_graph(args.graph)
    gamble = _load_gamble(args.gamble, g.n)
    vt = solve_value(g, gamble, args.tol / 100)
    starts = [args.start] if args.start is not None else list(range(g.n))
    sandwiches = []
    for s in starts:
        sw = value_sandwich(g, gamble, s, args.tol, vt=vt, strict=False)
        sandwiches.append({
            "start": s, "lower": sw.lower, "upper": _num(sw.upper), "upper_float": float(sw.upper),
            "width_ok": sw.width <= 10 * args.tol or g.n > 12, "walk": str(sw.walk),
        })
    sp = start_position_analysis(g, gamble, args.tol, vt=vt)
    doc = {
        "values": vt.values.tolist(),
        "residual": vt.residual,
        "iterations": vt.iterations,
        "sandwich": sandwiches,
        "worst_start": {"vertex": sp.worst[0], "value": sp.worst[1]},
        "best_start": {"vertex": sp.best[0], "value": sp.best[1]},
    }
    _write(json.dumps(doc, indent=2), args.out)
    return 0 if all(s["width_ok"] for s in sandwiches) else 1


def cmd_simulate(args) -> int:
    g = _load_graph(args.graph)
    if (args.gamble is None) == (args.meta is None):
        raise CliError("give exactly one of --gamble or --meta")
    gamble = _load_gamble(args.gamble, g.n) if args.gamble else None
    opponent = gamble if gamble is not None else resolve_meta(args.meta, g)
    strat = resolve_strategy(args.strategy, g, gamble, args.start)
    if isinstance(strat, RandomizedStrategy):
        strat.check(g)
    report = simulate(strat, opponent, args.trials, args.seed, workers=args.workers)
    doc = report.to_dict()
    doc["strategy"] = args.strategy
    _write(json.dumps(doc, indent=2), args.out)
    return 0


def _parse_param(text: str) -> tuple[str, object]:
    key, sep, raw = text.partition("=")
    if not sep:
        raise CliError(f"--set expects key=value, got {text!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    if isinstance(value, list):
        value = tuple(value)
    return key.replace("-", "_"), value


def cmd_experiment(args) -> int:
    params = dict(_parse_param(p) for p in args.set or ())
    if args.seed is not None:
        params["seed"] = args.seed
    result = run_experiment(args.name, **params)
    _write(emit(result, args.format), args.out)
    return 0 if result.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="copgambler", description="Cop vs. gambler pursuit game on graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, gamble_required=True):
        sp.add_argument("--graph", required=True, help="edge-list file")
        sp.add_argument("--gamble", required=gamble_required, help="gamble file ('v p' lines)")
        sp.add_argument("--out", help="write output here instead of stdout")

    sp = sub.add_parser("eval-walk", help="exact expected capture time of a walk")
    common(sp)
    sp.add_argument("--walk", required=True, help="'start | p1 .. pk | absorb a' or '... | loop c1 .. cL'")
    sp.set_defaults(func=cmd_eval_walk)

    sp = sub.add_parser("tree-strategy", help="tree pursuit walk against a known gamble")
    common(sp)
    sp.add_argument("--start", type=int, default=0)
    sp.set_defaults(func=cmd_tree_strategy)

    sp = sub.add_parser("solve", help="optimal values, value sandwich and policy walk")
    common(sp)
    sp.add_argument("--start", type=int)
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("simulate", help="Monte Carlo estimate of the capture time")
    common(sp, gamble_required=False)
    sp.add_argument("--strategy", required=True, help=", ".join(STRATEGY_NAMES))
    sp.add_argument("--meta", help=", ".join(META_NAMES))
    sp.add_argument("--start", type=int, default=0)
    sp.add_argument("--trials", type=int, default=10**5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("experiment", help="run a named experiment")
    sp.add_argument("name", choices=sorted(EXPERIMENTS))
    sp.add_argument("--seed", type=int)
    sp.add_argument("--format", choices=("json", "csv", "text"), default="text")
    sp.add_argument("--out")
    sp.add_argument("--set", action="append", metavar="KEY=VALUE", help="experiment parameter (JSON value)")
    sp.set_defaults(func=cmd_experiment)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, GraphError, GambleError, ExperimentError, ValueError, OSError) as exc:
        print(f"copgambler: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
