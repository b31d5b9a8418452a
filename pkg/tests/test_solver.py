import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from copgambler.evaluator import Absorb, Loop, Walk, expected_capture_time
from copgambler.gamble import delta_gamble, random_gamble, uniform_gamble, uniform_on_subset
from copgambler.generators import (
    complete_graph,
    cycle_graph,
    path_graph,
    random_connected_graph,
    random_tree,
    star_graph,
)
from copgambler.solver import (
    SandwichWidthError,
    SolverError,
    bellman_residual,
    extract_policy_walk,
    policy_step,
    solve_value,
    start_position_analysis,
    value_iterates,
    value_sandwich,
)
from copgambler.strategies import known_gamble_walk


def brute_force_optimum(g, gamble, start, horizon):
    """Best deterministic walk value, truncated: exhaustive search over move sequences.

    Each walk is extended by staying put from the end of the enumerated
    sequence, which gives an upper bound; exhaustive search over all
    sequences of the given length makes it tight for short horizons.
    """
    best = None
    frontier = [(start,)]
    for _ in range(horizon):
        frontier = [seq + (w,) for seq in frontier for w in g.closed_neighborhood(seq[-1])]
    for seq in frontier:
        w = Walk(start, seq[1:-1], Absorb(seq[-1])) if len(seq) > 1 else Walk.stay(start)
        e = expected_capture_time(w, gamble)
        best = e if best is None else min(best, e)
    return best


def test_uniform_all_values_n():
    g = random_connected_graph(6, random.Random(1))
    vt = solve_value(g, uniform_gamble(6))
    assert np.all(np.abs(vt.values - 6) < 1e-9)


@pytest.mark.parametrize("g", [path_graph(5), star_graph(6), cycle_graph(7), complete_graph(4)])
def test_delta_values_are_distances(g):
    for v in range(g.n):
        vt = solve_value(g, delta_gamble(g.n, v))
        dist = g.distances_from(v)
        assert list(vt.values) == [max(d, 1) for d in dist]
        for s in range(g.n):
            sw = value_sandwich(g, delta_gamble(g.n, v), s)
            assert sw.lower == sw.upper == max(dist[s], 1)


def test_star_uniform_on_leaves():
    n = 5
    g, gamble = star_graph(n), uniform_on_subset(n, range(1, n))
    vt = solve_value(g, gamble)
    # heading to a leaf and waiting there beats alternating through the center
    assert vt.values[0] == pytest.approx(n - 1, abs=1e-9)
    assert vt.values[1] == pytest.approx(n - 1, abs=1e-9)
    w = extract_policy_walk(g, gamble, vt, 0)
    assert w == Walk(0, (), Absorb(1))
    sw = value_sandwich(g, gamble, 0, vt=vt)
    assert sw.upper == n - 1 and sw.width <= 1e-11
    # the alternating walk is strictly worse
    alt = Walk(0, (1,), Loop((0, 1)))
    assert expected_capture_time(alt, gamble) > n - 1


def test_against_brute_force_search():
    rng = random.Random(3)
    for _ in range(15):
        n = rng.randint(2, 5)
        g = random_connected_graph(n, rng)
        gamble = random_gamble(n, rng, 10)
        vt = solve_value(g, gamble)
        for s in range(n):
            brute = brute_force_optimum(g, gamble, s, horizon=5)
            sw = value_sandwich(g, gamble, s, vt=vt)
            # the optimum is no larger than any enumerated walk's value
            assert sw.lower <= float(brute) + 1e-9
            assert sw.upper <= brute


def test_monotone_iterates():
    rng = random.Random(8)
    for _ in range(20):
        n = rng.randint(2, 12)
        g = random_connected_graph(n, rng)
        gamble = random_gamble(n, rng, 5)
        prev = np.zeros(n)
        for cur in itertools.islice(value_iterates(g, gamble), 300):
            assert np.all(cur >= prev)
            prev = cur


@given(st.integers(1, 12), st.integers(0, 2**32), st.sampled_from([2, 10, 100]))
@settings(max_examples=80, deadline=None)
def test_bellman_consistency_and_sandwich(n, seed, weight):
    rng = random.Random(seed)
    g = random_connected_graph(n, rng)
    gamble = random_gamble(n, rng, weight)
    tol = 1e-12
    vt = solve_value(g, gamble, tol)
    assert vt.residual < tol
    assert bellman_residual(g, gamble, vt.values) <= tol
    assert np.all(np.isfinite(vt.values)) and np.all(vt.values >= 1 - 1e-12)
    tight = solve_value(g, gamble, tol / 100)
    for s in range(n):
        sw = value_sandwich(g, gamble, s, tol, vt=tight)
        assert sw.upper <= n
        assert sw.lower <= float(sw.upper) + 1e-12
        assert sw.width <= 10 * tol
        assert vt.values[s] <= float(expected_capture_time(known_gamble_walk(g, gamble, s), gamble)) + 1e-9


def test_argmin_stable_under_smaller_tol():
    rng = random.Random(21)
    for _ in range(40):
        n = rng.randint(1, 12)
        g = random_connected_graph(n, rng)
        for gamble in (random_gamble(n, rng), uniform_gamble(n)):
            a = solve_value(g, gamble, 1e-12)
            b = solve_value(g, gamble, 1e-13)
            for u in range(n):
                assert policy_step(g, gamble, a.values, u) == policy_step(g, gamble, b.values, u)


def test_policy_walk_uniform_is_n():
    rng = random.Random(4)
    for _ in range(10):
        n = rng.randint(1, 12)
        g = random_connected_graph(n, rng)
        vt = solve_value(g, uniform_gamble(n))
        for s in range(n):
            assert expected_capture_time(extract_policy_walk(g, uniform_gamble(n), vt, s), uniform_gamble(n)) == n


def test_policy_walk_delta_follows_shortest_path():
    g = path_graph(6)
    gamble = delta_gamble(6, 4)
    w = extract_policy_walk(g, gamble, solve_value(g, gamble), 0)
    assert w == Walk(0, (1, 2, 3), Absorb(4))


def test_policy_walks_are_legal():
    rng = random.Random(2)
    for _ in range(50):
        n = rng.randint(2, 10)
        g = random_connected_graph(n, rng)
        gamble = random_gamble(n, rng, 3)
        vt = solve_value(g, gamble)
        for s in range(n):
            w = extract_policy_walk(g, gamble, vt, s)
            w.check(g)
            if isinstance(w.tail, Loop):
                assert len(w.tail.cycle) >= 2


def test_start_position_analysis():
    sp = start_position_analysis(random_connected_graph(7, random.Random(0)), uniform_gamble(7))
    assert sp.worst[0] == 0 and sp.best[0] == 0
    assert sp.worst[1] == pytest.approx(7, abs=1e-9) and sp.best[1] == pytest.approx(7, abs=1e-9)
    sp = start_position_analysis(path_graph(5), delta_gamble(5, 0))
    assert sp.best == (0, 1.0) and sp.worst == (4, 4.0)


def test_random_tree_worst_start_within_n():
    rng = random.Random(9)
    for _ in range(20):
        g = random_tree(8, rng)
        sp = start_position_analysis(g, random_gamble(8, rng))
        assert sp.worst[1] <= 8 + 1e-9


def test_iteration_cap():
    with pytest.raises(SolverError):
        solve_value(path_graph(6), uniform_gamble(6), max_iter=3)


def test_strict_sandwich_reports_width():
    g = cycle_graph(9)
    gamble = random_gamble(9, random.Random(5))
    loose = solve_value(g, gamble, 1e-3)
    with pytest.raises(SandwichWidthError):
        value_sandwich(g, gamble, 0, tol=1e-12, vt=loose)
    sw = value_sandwich(g, gamble, 0, tol=1e-12, vt=loose, strict=False)
    assert sw.width > 1e-11
