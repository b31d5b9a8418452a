"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Derived constants are checked against independent oracles: a closed form
for the double-dwell sweep against a sitter, permutation enumeration for
small stars, and Monte Carlo for the rest.
"""

import math
import random
import time
from fractions import Fraction as F

import pytest

from copgambler.evaluator import (
    INFINITE,
    RandomizedStrategy,
    expected_capture_meta,
    expected_capture_randomized,
    expected_capture_time,
)
from copgambler.experiments import CYCLE_FACTOR
from copgambler.gamble import (
    MetaGamble,
    interval_meta,
    random_gamble,
    random_sitter_meta,
    uniform_gamble,
    uniform_on_subset,
)
from copgambler.generators import (
    cycle_graph,
    path_graph,
    random_connected_graph,
    random_tree,
    random_walk,
    star_graph,
    unlabeled_trees,
)
from copgambler.graph import root_tree
from copgambler.sim import SimCase, compare_exact_vs_mc, simulate
from copgambler.solver import solve_value, value_sandwich
from copgambler.strategies import (
    StarSweep,
    cycle_circling_strategy,
    dfs_patrol_strategy,
    known_gamble_walk,
    round_survival,
    suffix_times,
    tree_pursuit_walk,
)

pytestmark = pytest.mark.acceptance


def report(capsys, number, title, ok, elapsed, limit, detail=""):
    status = "PASS" if ok and elapsed < limit else "FAIL"
    with capsys.disabled():
        print(f"\n[{status}] criterion {number}: {title} ({elapsed:.1f}s / {limit}s) {detail}".rstrip())
    return status == "PASS"


def test_c1_uniform_gamble_exact(capsys):
    t0 = time.perf_counter()
    rng = random.Random(1)
    bad = []
    for i in range(200):
        n = rng.randint(2, 50)
        g = random_connected_graph(n, rng)
        w = random_walk(g, rng)
        w.check(g)
        e = expected_capture_time(w, uniform_gamble(n))
        if e != n:
            bad.append((i, n, e))
    ok = not bad
    assert report(capsys, 1, "uniform gamble gives E = n exactly", ok, time.perf_counter() - t0, 10,
                  f"200 pairs, {len(bad)} mismatches")


def test_c2_tree_strategy_bound(capsys):
    t0 = time.perf_counter()
    rng = random.Random(2)
    pairs = cases = 0
    bad = []
    for n in range(1, 10):
        for t in unlabeled_trees(n):
            for root in range(n):
                rt = root_tree(t, root)
                pairs += 1
                for _ in range(100):
                    gamble = random_gamble(n, rng)
                    cases += 1
                    e = expected_capture_time(tree_pursuit_walk(rt, gamble), gamble)
                    if not e <= n:
                        bad.append((t.edges, root, gamble, e))
                    for v, tv, bound in suffix_times(rt, gamble):
                        if not tv <= bound:
                            bad.append((t.edges, root, gamble, v, tv, bound))
    ok = not bad and pairs == sum(n * c for n, c in zip(range(1, 10), [1, 1, 1, 2, 3, 6, 11, 23, 47]))
    assert report(capsys, 2, "tree strategy E <= n and suffix T_i <= m_i/c_i", ok, time.perf_counter() - t0, 120,
                  f"{pairs} rooted trees, {cases} gambles, {len(bad)} violations")


def _value_corpus():
    rng = random.Random(3)
    corpus = []
    for _ in range(50):
        n = rng.randint(1, 12)
        corpus.append((random_connected_graph(n, rng), random_gamble(n, rng)))
    return corpus


def test_c3_game_value(capsys):
    t0 = time.perf_counter()
    bad = []
    for g, gamble in _value_corpus():
        n = g.n
        vt = solve_value(g, gamble, 1e-14)
        for s in range(n):
            sw = value_sandwich(g, gamble, s, vt=vt)
            if not (sw.upper <= n and sw.lower <= float(sw.upper) + 1e-12):
                bad.append(("random", g.edges, s, sw))
        u = uniform_gamble(n)
        ut = solve_value(g, u, 1e-14)
        for s in range(n):
            sw = value_sandwich(g, u, s, vt=ut)
            if not (abs(sw.lower - n) <= 1e-9 and abs(float(sw.upper) - n) <= 1e-9):
                bad.append(("uniform", g.edges, s, sw))
    ok = not bad
    assert report(capsys, 3, "value sandwich upper <= n; uniform value n", ok, time.perf_counter() - t0, 60,
                  f"50 graphs, {len(bad)} violations")


def _dwell2_sitter_closed_form(n):
    # the sitter's leaf has uniform rank r among n-1 leaves and is hit at time 3r - 1
    return F(sum(3 * r - 1 for r in range(1, n)), n - 1)


def test_c4_star_constants(capsys):
    t0 = time.perf_counter()
    bad = []
    for n in range(3, 51):
        sw = StarSweep(star_graph(n), 1)
        sitter = random_sitter_meta(n, sw.leaves)
        spread = MetaGamble.pure(uniform_on_subset(n, sw.leaves))
        if sw.exact_meta(sitter) != n or sw.exact_meta(spread) != 2 * n - 2:
            bad.append(("dwell1", n))
    # rank symmetry against explicit enumeration of every leaf order
    for n in range(3, 8):
        for dwell in (1, 2):
            sw = StarSweep(star_graph(n), dwell)
            mix = sw.enumerate()
            for m in (random_sitter_meta(n, sw.leaves), MetaGamble.pure(uniform_on_subset(n, sw.leaves))):
                if sw.exact_meta(m) != expected_capture_meta(mix, m):
                    bad.append(("enumeration", n, dwell))
    sims = []
    for n in (51, 101):
        sw = StarSweep(star_graph(n), 2)
        sitter = random_sitter_meta(n, sw.leaves)
        spread = MetaGamble.pure(uniform_on_subset(n, sw.leaves))
        lo, hi = F(3 * n, 2) - 2, F(3 * n, 2) + 2
        es, eu = sw.exact_meta(sitter), sw.exact_meta(spread)
        if not (lo <= es <= hi and lo <= eu <= hi):
            bad.append(("dwell2 window", n, es, eu))
        if es != _dwell2_sitter_closed_form(n):
            bad.append(("dwell2 closed form", n, es))
        sims += [SimCase(f"{n} sitter", sw, sitter, es), SimCase(f"{n} spread", sw, spread, eu)]
    rows = compare_exact_vs_mc(sims, trials=20000, master_seed=4)
    bad += [("dwell2 monte carlo", r["label"], r["z"]) for r in rows if r["flagged"]]
    ok = not bad
    assert report(capsys, 4, "star sweep constants n, 2n-2 and ~3n/2", ok, time.perf_counter() - t0, 30,
                  f"{len(bad)} violations")


def test_c5_cycle_circling(capsys):
    t0 = time.perf_counter()
    rng = random.Random(5)
    n = 30
    g = cycle_graph(n)
    strat = cycle_circling_strategy(g, 0)
    surv_bound = (1 - F(1, n)) ** n
    e_bound = CYCLE_FACTOR * n + 1
    bad = []
    worst = F(0)
    for _ in range(100):
        gamble = random_gamble(n, rng)
        surv = max(round_survival(w, gamble) for _, w in strat.components)
        e = expected_capture_randomized(strat, gamble)
        worst = max(worst, e)
        if not (surv <= surv_bound and e <= e_bound):
            bad.append((gamble, surv, e))
    ok = not bad
    assert report(capsys, 5, "cycle circling survival and E bound on C_30", ok, time.perf_counter() - t0, 10,
                  f"max E {float(worst):.3f} vs {e_bound:.3f}")


def test_c6_dfs_patrol(capsys):
    t0 = time.perf_counter()
    rng = random.Random(6)
    bad = []
    checked = 0
    for _ in range(50):
        n = rng.randint(1, 40)
        t = random_tree(n, rng)
        strat = dfs_patrol_strategy(root_tree(t, rng.randrange(n)))
        length = max(len(w.tail_cycle) for _, w in strat.components)
        if length > 3 * n - 2:
            bad.append(("round length", n, length))
        for gamble in (random_gamble(n, rng), uniform_gamble(n), uniform_on_subset(n, t.leaves())):
            checked += 1
            surv = max(round_survival(w, gamble) for _, w in strat.components)
            twice = math.prod((1 - p) ** 2 for p in gamble.probs)
            e = expected_capture_randomized(strat, gamble)
            if not (surv <= twice <= (1 - F(1, n)) ** (2 * n) and e < 2 * n):
                bad.append((n, gamble, surv, twice, e))
    ok = not bad
    assert report(capsys, 6, "DFS patrol round <= 3n-2, survival bounds, E < 2n", ok, time.perf_counter() - t0, 30,
                  f"{checked} (tree, gamble) pairs, {len(bad)} violations")


def test_c7_solver_dominance(capsys):
    t0 = time.perf_counter()
    bad = []
    for g, gamble in _value_corpus():
        vt = solve_value(g, gamble)
        for s in range(g.n):
            e = expected_capture_time(known_gamble_walk(g, gamble, s), gamble)
            if not vt.values[s] <= float(e) + 1e-9:
                bad.append((g.edges, s, vt.values[s], e))
    ok = not bad
    assert report(capsys, 7, "solver value <= tree strategy E", ok, time.perf_counter() - t0, 60,
                  f"{len(bad)} violations")


def _sim_corpus():
    rng = random.Random(8)
    cases = []
    # plain walks against random gambles, kept to moderate finite means
    while len(cases) < 8:
        n = rng.randint(2, 12)
        g = random_connected_graph(n, rng)
        w = random_walk(g, rng)
        gamble = random_gamble(n, rng, 10)
        e = expected_capture_time(w, gamble)
        if e != INFINITE and e <= 40:
            cases.append(SimCase(f"walk n={n}", w, gamble, e))
    for n in (6, 9):
        g = random_connected_graph(n, rng)
        cases.append(SimCase(f"uniform n={n}", random_walk(g, rng), uniform_gamble(n), n))
    for n in (5, 12):
        g = random_tree(n, rng)
        gamble = random_gamble(n, rng)
        w = known_gamble_walk(g, gamble, rng.randrange(n))
        cases.append(SimCase(f"tree strategy n={n}", w, gamble, expected_capture_time(w, gamble)))
    for n, dwell in ((6, 1), (9, 2)):
        sw = StarSweep(star_graph(n), dwell)
        for m in (random_sitter_meta(n, sw.leaves), MetaGamble.pure(uniform_on_subset(n, sw.leaves))):
            cases.append(SimCase(f"star n={n} dwell {dwell}", sw, m, sw.exact_meta(m)))
    g = cycle_graph(10)
    strat = cycle_circling_strategy(g, 3)
    gamble = random_gamble(10, rng)
    cases.append(SimCase("cycle n=10", strat, gamble, expected_capture_randomized(strat, gamble)))
    t = random_tree(15, rng)
    strat = dfs_patrol_strategy(root_tree(t, 0))
    m = random_sitter_meta(15, t.leaves())
    cases.append(SimCase("dfs patrol n=15", strat, m, expected_capture_meta(strat, m)))
    g = path_graph(7)
    mix = RandomizedStrategy.mix([
        (F(1, 3), dfs_patrol_strategy(root_tree(g, 0))),
        (F(2, 3), dfs_patrol_strategy(root_tree(g, 3))),
    ])
    m = MetaGamble([(F(1, 2), uniform_on_subset(7, [6])), (F(1, 2), random_gamble(7, rng))])
    cases.append(SimCase("patrol mixture vs meta n=7", mix, m, expected_capture_meta(mix, m)))
    g = cycle_graph(16)
    strat = cycle_circling_strategy(g, 0)
    m = interval_meta(16)
    cases.append(SimCase("cycle vs interval n=16", strat, m, expected_capture_meta(strat, m)))
    assert all(c.exact != INFINITE for c in cases)
    return cases


def test_c8_monte_carlo_agreement(capsys):
    t0 = time.perf_counter()
    cases = _sim_corpus()
    rows = compare_exact_vs_mc(cases, trials=10**5, master_seed=2024)
    flagged = [r for r in rows if r["flagged"]]
    identical = all(
        simulate(c.strategy, c.opponent, 10**5, 77).to_json()
        == simulate(c.strategy, c.opponent, 10**5, 77, workers=8).to_json()
        for c in (cases[0], cases[12], cases[-1])
    )
    ok = len(cases) == 20 and not flagged and identical
    worst = max(r["z"] for r in rows)
    assert report(capsys, 8, "Monte Carlo within 4 sigma; bit-identical across workers", ok,
                  time.perf_counter() - t0, 120,
                  f"{len(rows)} cases, max z {worst:.2f}, identical={identical}")
