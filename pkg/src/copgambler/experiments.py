"""Named experiments that check the game's quantitative claims and emit tables."""

from __future__ import annotations

import csv
import io
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from . import generators as gen
from .evaluator import (
    expected_capture_meta,
    expected_capture_randomized,
    expected_capture_time,
)
from .gamble import (
    MetaGamble,
    format_fraction,
    interval_meta,
    random_gamble,
    random_sitter_meta,
    uniform_gamble,
    uniform_on_subset,
)
from .graph import Graph, root_tree
from .sim import SimCase, compare_exact_vs_mc
from .solver import solve_value
from .strategies import (
    StarSweep,
    cycle_circling_strategy,
    dfs_patrol_strategy,
    known_gamble_walk,
    round_survival,
    suffix_times,
    tree_pursuit_walk,
)

CYCLE_FACTOR = math.e / (math.e - 1) - 0.5


class ExperimentError(ValueError):
    pass


@dataclass
class BoundCheck:
    case: str
    claim: str
    value: Any
    bound: Any
    passed: bool


@dataclass
class ExperimentResult:
    experiment: str
    parameters: dict
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    bounds: list[BoundCheck] = field(default_factory=list)
    simulation: list[dict] | None = None

    @property
    def passed(self) -> bool:
        return all(b.passed for b in self.bounds)

    def check(self, case: str, claim: str, value, bound, passed: bool) -> None:
        self.bounds.append(BoundCheck(case, claim, value, bound, bool(passed)))

    def failures(self) -> list[BoundCheck]:
        return [b for b in self.bounds if not b.passed]


# --- value-n --------------------------------------------------------------

def value_n(n: int = 12, graphs: int = 20, walks: int = 5, seed: int = 0) -> ExperimentResult:
    rng = random.Random(seed)
    res = ExperimentResult(
        "value-n",
        {"n": n, "graphs": graphs, "walks": walks, "seed": seed},
        ["graph", "edges", "walk_values", "tree_walk_value", "solver_min", "solver_max"],
    )
    u = uniform_gamble(n)
    for i in range(graphs):
        g = gen.random_connected_graph(n, rng)
        vals = [expected_capture_time(gen.random_walk(g, rng), u) for _ in range(walks)]
        tw = expected_capture_time(known_gamble_walk(g, u, rng.randrange(n)), u)
        vt = solve_value(g, u)
        lo, hi = float(vt.values.min()), float(vt.values.max())
        res.rows.append(
            {"graph": i, "edges": len(g.edges), "walk_values": vals, "tree_walk_value": tw,
             "solver_min": lo, "solver_max": hi}
        )
        res.check(f"graph {i}", "uniform gamble: every walk has E = n", vals + [tw], n,
                  all(v == n for v in vals + [tw]))
        res.check(f"graph {i}", "uniform gamble: optimal value n (solver, 1e-9)", (lo, hi), n,
                  abs(lo - n) <= 1e-9 and abs(hi - n) <= 1e-9)
    return res


# --- tree-bound -------------------------------------------------------------

def tree_bound(max_n: int = 7, gambles: int = 20, seed: int = 0) -> ExperimentResult:
    """Every unlabeled tree up to ``max_n`` vertices, every root, random gambles."""
    rng = random.Random(seed)
    res = ExperimentResult(
        "tree-bound",
        {"max_n": max_n, "gambles": gambles, "seed": seed},
        ["n", "tree", "edges", "instances", "max_value", "max_suffix_ratio"],
    )
    for n in range(1, max_n + 1):
        for ti, t in enumerate(gen.unlabeled_trees(n)):
            worst = Fraction(0)
            worst_ratio = Fraction(0)
            suffix_ok = True
            count = 0
            for root in range(n):
                rt = root_tree(t, root)
                for _ in range(gambles):
                    g = random_gamble(n, rng)
                    e = expected_capture_time(tree_pursuit_walk(rt, g), g)
                    worst = max(worst, e)
                    for _, tv, bound in suffix_times(rt, g):
                        suffix_ok &= tv <= bound
                        worst_ratio = max(worst_ratio, tv / bound)
                    count += 1
            edges = " ".join(f"{a}-{b}" for a, b in sorted(t.edges))
            res.rows.append({"n": n, "tree": ti, "edges": edges, "instances": count,
                             "max_value": worst, "max_suffix_ratio": worst_ratio})
            res.check(f"n={n} tree {ti}", "tree strategy: E <= n", worst, n, worst <= n)
            res.check(f"n={n} tree {ti}", "tree strategy: T_i <= m_i/c_i on the descent path",
                      worst_ratio, 1, suffix_ok)
    return res


# --- star ---------------------------------------------------------------------

def star(ns: tuple[int, ...] = (5, 11, 51, 101), simulate_trials: int = 0, seed: int = 0) -> ExperimentResult:
    res = ExperimentResult(
        "star",
        {"ns": list(ns), "simulate_trials": simulate_trials, "seed": seed},
        ["n", "dwell1_sitter", "dwell1_uniform_leaves", "dwell2_sitter", "dwell2_uniform_leaves",
         "double_pass_sitter", "double_pass_uniform_leaves", "three_halves_n"],
    )
    sim_cases = []
    for n in ns:
        g = gen.star_graph(n)
        one, two = StarSweep(g, 1), StarSweep(g, 2)
        sitter = random_sitter_meta(n, one.leaves)
        spread = MetaGamble.pure(uniform_on_subset(n, one.leaves))
        d1s, d1u = one.exact_meta(sitter), one.exact_meta(spread)
        d2s, d2u = two.exact_meta(sitter), two.exact_meta(spread)
        # two back-to-back single-dwell passes repeat the same pass, so the
        # double-pass reading has the single-dwell capture law
        res.rows.append({
            "n": n, "dwell1_sitter": d1s, "dwell1_uniform_leaves": d1u,
            "dwell2_sitter": d2s, "dwell2_uniform_leaves": d2u,
            "double_pass_sitter": d1s, "double_pass_uniform_leaves": d1u,
            "three_halves_n": Fraction(3 * n, 2),
        })
        res.check(f"n={n}", "leaf sweep vs random sitter: E = n", d1s, n, d1s == n)
        res.check(f"n={n}", "leaf sweep vs uniform on leaves: E = 2n-2", d1u, 2 * n - 2, d1u == 2 * n - 2)
        window = (Fraction(3 * n, 2) - 2, Fraction(3 * n, 2) + 2)
        for label, v in (("random sitter", d2s), ("uniform on leaves", d2u)):
            res.check(f"n={n}", f"double-visit sweep vs {label}: E within 3n/2 +- 2", v, window,
                      window[0] <= v <= window[1])
        if simulate_trials:
            sim_cases += [
                SimCase(f"n={n} dwell1 sitter", one, sitter, d1s),
                SimCase(f"n={n} dwell1 uniform-leaves", one, spread, d1u),
                SimCase(f"n={n} dwell2 sitter", two, sitter, d2s),
                SimCase(f"n={n} dwell2 uniform-leaves", two, spread, d2u),
            ]
    if sim_cases:
        res.simulation = compare_exact_vs_mc(sim_cases, simulate_trials, seed)
    return res


# --- cycle --------------------------------------------------------------------

def cycle(n: int = 30, gambles: int = 100, seed: int = 0) -> ExperimentResult:
    rng = random.Random(seed)
    res = ExperimentResult(
        "cycle",
        {"n": n, "gambles": gambles, "seed": seed},
        ["gamble", "circuit_survival", "survival_bound", "value", "value_bound"],
    )
    g = gen.cycle_graph(n)
    strat = cycle_circling_strategy(g, 0)
    surv_bound = (1 - Fraction(1, n)) ** n
    e_bound = CYCLE_FACTOR * n + 1
    opponents = [(f"random {i}", MetaGamble.pure(random_gamble(n, rng))) for i in range(gambles)]
    opponents += [("uniform", MetaGamble.pure(uniform_gamble(n))), ("interval", interval_meta(n))]
    for label, m in opponents:
        survs = [round_survival(w, gm) for _, gm in m.components for _, w in strat.components]
        e = expected_capture_meta(strat, m)
        worst_surv = max(survs)
        res.rows.append({"gamble": label, "circuit_survival": worst_surv, "survival_bound": surv_bound,
                         "value": e, "value_bound": e_bound})
        res.check(label, "one circuit survives with probability <= (1-1/n)^n", worst_surv, surv_bound,
                  worst_surv <= surv_bound)
        if label.startswith("random") or label == "uniform":
            res.check(label, "circling: E <= (e/(e-1) - 1/2) n + 1", e, e_bound, e <= e_bound)
    return res


# --- dfs-patrol ---------------------------------------------------------------

def dfs_patrol(trees: int = 50, max_n: int = 40, seed: int = 0) -> ExperimentResult:
    rng = random.Random(seed)
    res = ExperimentResult(
        "dfs-patrol",
        {"trees": trees, "max_n": max_n, "seed": seed},
        ["tree", "n", "gamble", "round_length", "round_survival", "survival_bound", "value"],
    )
    for i in range(trees):
        n = rng.randint(1, max_n)
        t = gen.random_tree(n, rng)
        rt = root_tree(t, rng.randrange(n))
        strat = dfs_patrol_strategy(rt)
        opps = [("random", random_gamble(n, rng)), ("uniform", uniform_gamble(n)),
                ("uniform-leaves", uniform_on_subset(n, t.leaves()))]
        length = max(len(w.tail_cycle) for _, w in strat.components)
        res.check(f"tree {i}", "one search takes at most 3n-2 turns", length, 3 * n - 2, length <= 3 * n - 2)
        for label, g in opps:
            surv = max(round_survival(w, g) for _, w in strat.components)
            twice = math.prod((1 - p) ** 2 for p in g.probs)
            e = expected_capture_randomized(strat, g)
            res.rows.append({"tree": i, "n": n, "gamble": label, "round_length": length,
                             "round_survival": surv, "survival_bound": twice, "value": e})
            res.check(f"tree {i} {label}", "a search survives with probability <= prod (1-p_i)^2",
                      surv, twice, surv <= twice)
            res.check(f"tree {i} {label}", "prod (1-p_i)^2 <= (1-1/n)^(2n)",
                      twice, (1 - Fraction(1, n)) ** (2 * n), twice <= (1 - Fraction(1, n)) ** (2 * n))
            res.check(f"tree {i} {label}", "DFS patrol: E < 2n", e, 2 * n, e < 2 * n)
    return res


# --- conjecture-probe ---------------------------------------------------------

def _probe_metas(g: Graph, family: str) -> dict[str, MetaGamble]:
    n = g.n
    metas = {
        "uniform": MetaGamble.pure(uniform_gamble(n)),
        "sitter-all": random_sitter_meta(n, range(n)),
    }
    if family == "cycle":
        metas["interval"] = interval_meta(n)
    elif n > 1:
        metas["uniform-leaves"] = MetaGamble.pure(uniform_on_subset(n, g.leaves()))
        metas["sitter-leaves"] = random_sitter_meta(n, g.leaves())
    return metas


def _probe_cops(g: Graph, family: str) -> dict[str, Callable[[MetaGamble], Any]]:
    cops: dict[str, Callable[[MetaGamble], Any]] = {}
    if family == "cycle":
        s = cycle_circling_strategy(g, 0)
        cops["cycle-circle"] = lambda m: expected_capture_meta(s, m)
        return cops
    for root in range(g.n):
        s = dfs_patrol_strategy(root_tree(g, root))
        cops[f"dfs-patrol@{root}"] = lambda m, s=s: expected_capture_meta(s, m)
    if family == "star":
        for d in (1, 2):
            sw = StarSweep(g, d)
            cops[f"star-sweep:{d}"] = sw.exact_meta
    return cops


def conjecture_probe(ns: tuple[int, ...] = (4, 6, 8, 10), random_trees: int = 3, seed: int = 0) -> ExperimentResult:
    """Max over tested gamblers of the best tested cop, relative to n. Reported only."""
    rng = random.Random(seed)
    res = ExperimentResult(
        "conjecture-probe",
        {"ns": list(ns), "random_trees": random_trees, "seed": seed},
        ["family", "n", "worst_gambler", "best_cop", "value", "value_over_n"],
    )
    for n in ns:
        graphs = [("path", gen.path_graph(n)), ("star", gen.star_graph(n))]
        if n >= 3:
            graphs.append(("cycle", gen.cycle_graph(n)))
        graphs += [("random-tree", gen.random_tree(n, rng)) for _ in range(random_trees)]
        for family, g in graphs:
            cops = _probe_cops(g, family)
            best_by_meta = {}
            for mname, m in _probe_metas(g, family).items():
                scores = {c: f(m) for c, f in cops.items()}
                cop = min(scores, key=lambda c: scores[c])
                best_by_meta[mname] = (cop, scores[cop])
            worst = max(best_by_meta, key=lambda k: best_by_meta[k][1])
            cop, val = best_by_meta[worst]
            res.rows.append({"family": family, "n": n, "worst_gambler": worst, "best_cop": cop,
                             "value": val, "value_over_n": float(val) / n})
    return res


EXPERIMENTS: dict[str, Callable[..., ExperimentResult]] = {
    "value-n": value_n,
    "tree-bound": tree_bound,
    "star": star,
    "cycle": cycle,
    "dfs-patrol": dfs_patrol,
    "conjecture-probe": conjecture_probe,
}


def run_experiment(name: str, **params) -> ExperimentResult:
    try:
        fn = EXPERIMENTS[name]
    except KeyError:
        raise ExperimentError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}") from None
    try:
        return fn(**params)
    except TypeError as exc:
        raise ExperimentError(f"invalid parameters for {name}: {exc}") from None


# --- output -------------------------------------------------------------------

def _plain(x: Any) -> Any:
    if isinstance(x, Fraction):
        return format_fraction(x)
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    return x


def _cell(x: Any) -> str:
    x = _plain(x)
    if isinstance(x, list):
        return " ".join(_cell(v) for v in x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def emit(result: ExperimentResult, fmt: str = "json") -> str:
    if fmt == "json":
        doc = {
            "experiment": result.experiment,
            "parameters": _plain(result.parameters),
            "passed": result.passed,
            "rows": [_plain({c: r.get(c) for c in result.columns}) for r in result.rows],
            "bounds": [_plain(vars(b)) for b in result.bounds],
        }
        if result.simulation is not None:
            doc["simulation"] = result.simulation
        return json.dumps(doc, indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(result.columns)
        for r in result.rows:
            writer.writerow([_cell(r.get(c)) for c in result.columns])
        return buf.getvalue()
    if fmt == "text":
        table = [result.columns] + [[_cell(r.get(c)) for c in result.columns] for r in result.rows]
        widths = [max(len(row[i]) for row in table) for i in range(len(result.columns))]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in table]
        failed = result.failures()
        lines.append("")
        lines.append(f"{result.experiment}: {len(result.bounds) - len(failed)}/{len(result.bounds)} bound checks passed")
        for b in failed:
            lines.append(f"FAILED {b.case}: {b.claim} (value {_cell(b.value)}, bound {_cell(b.bound)})")
        return "\n".join(lines) + "\n"
    raise ExperimentError(f"unknown format {fmt!r}")
