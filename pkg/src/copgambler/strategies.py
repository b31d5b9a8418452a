"""Cop strategies for known and unknown gamblers."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .evaluator import (
    INFINITE,
    Absorb,
    Expectation,
    Loop,
    RandomizedStrategy,
    Walk,
    expected_capture_randomized,
    expected_capture_time,
)
from .gamble import Gamble, MetaGamble
from .graph import Graph, GraphError, RootedTree, dfs_patrol_order, root_tree, spanning_tree


class StrategyError(ValueError):
    pass


@dataclass(frozen=True)
class BranchTable:
    """Branch size ``m`` and branch gamble mass ``c`` for every vertex."""

    root: int
    m: tuple[int, ...]
    c: tuple[Fraction, ...]

    def ratio(self, v: int) -> Fraction:
        return Fraction(self.c[v], self.m[v])


def branch_table(rt: RootedTree, g: Gamble) -> BranchTable:
    if g.n != rt.n:
        raise StrategyError(f"gamble over {g.n} vertices, tree has {rt.n}")
    c = list(g.probs)
    for v in reversed(rt.preorder()):
        if v != rt.root:
            c[rt.parent[v]] += c[v]
    return BranchTable(rt.root, rt.subtree_size, tuple(c))


def descent_path(rt: RootedTree, g: Gamble) -> list[int]:
    """Vertices the tree strategy passes through; the last one is where it stays.

    At each vertex the cop stays for good when its own probability is at
    least the average probability of its branch; otherwise she enters the
    child branch with the highest average (smallest id on ties).
    """
    bt = branch_table(rt, g)
    v = rt.root
    path = [v]
    while rt.children[v] and g[v] < bt.ratio(v):
        nxt = max(rt.children[v], key=lambda u: (bt.ratio(u), -u))
        # c(v) > p(v) here, so some child branch carries mass
        assert bt.c[nxt] > 0, "descent entered a zero-mass branch"
        v = nxt
        path.append(v)
    return path


def tree_pursuit_walk(rt: RootedTree, g: Gamble) -> Walk:
    path = descent_path(rt, g)
    return Walk(path[0], tuple(path[1:-1]), Absorb(path[-1]))


def suffix_times(rt: RootedTree, g: Gamble) -> list[tuple[int, Expectation, Fraction | float]]:
    """For each vertex on the descent path: ``(v, T, m/c)``.

    ``T`` is the expected capture time counted from the moment the cop
    arrives at ``v``, arrival included as a capture chance.
    """
    bt = branch_table(rt, g)
    path = descent_path(rt, g)
    rows = []
    for i, v in enumerate(path):
        rest = path[i:]
        # start at v and "arrive" again at time 1 so that v itself is checked
        w = Walk(v, tuple(rest[:-1]), Absorb(rest[-1]))
        bound = Fraction(bt.m[v]) / bt.c[v] if bt.c[v] else INFINITE
        rows.append((v, expected_capture_time(w, g), bound))
    return rows


def known_gamble_walk(graph: Graph, gamble: Gamble, start: int) -> Walk:
    """Tree strategy on the breadth-first spanning tree, rooted at ``start``."""
    return tree_pursuit_walk(root_tree(spanning_tree(graph), start), gamble)


def cycle_order(g: Graph, start: int = 0) -> list[int]:
    """Vertices of a cycle graph in order, from ``start`` toward its smaller neighbor."""
    if g.n < 3 or len(g.edges) != g.n or any(g.degree(v) != 2 for v in range(g.n)):
        raise GraphError("graph is not a cycle")
    order = [start]
    prev, cur = start, g.neighbors(start)[0]
    while cur != start:
        order.append(cur)
        a, b = g.neighbors(cur)
        prev, cur = cur, (b if a == prev else a)
    return order


def cycle_circling_strategy(g: Graph, start: int) -> RandomizedStrategy:
    """Fair coin picks a direction; the cop then circles the cycle forever."""
    order = cycle_order(g, start)
    one_way = tuple(order[1:]) + (start,)
    other_way = tuple(reversed(order[1:])) + (start,)
    half = Fraction(1, 2)
    return RandomizedStrategy(
        ((half, Walk(start, (), Loop(one_way))), (half, Walk(start, (), Loop(other_way))))
    )


def dfs_patrol_walk(rt: RootedTree, reversed_: bool = False) -> Walk:
    """Repeat the DFS tour forever.

    A root of degree one is a leaf too, so returning to it costs the same
    extra turn as any other leaf.
    """
    order = dfs_patrol_order(rt, reversed_)
    cycle = order[1:]
    if rt.tree.degree(rt.root) == 1:
        cycle.append(rt.root)
    return Walk(rt.root, (), Loop(tuple(cycle)))


def dfs_patrol_strategy(rt: RootedTree) -> RandomizedStrategy:
    half = Fraction(1, 2)
    return RandomizedStrategy(
        ((half, dfs_patrol_walk(rt)), (half, dfs_patrol_walk(rt, reversed_=True)))
    )


def round_survival(w: Walk, g: Gamble) -> Fraction:
    """Survival probability over one repetition of the walk's tail cycle."""
    out = Fraction(1)
    for v in w.tail_cycle:
        out *= 1 - g[v]
    return out


def star_center(g: Graph) -> int:
    if g.n < 2:
        raise GraphError("graph is not a star")
    if g.n == 2:
        return 0
    centers = [v for v in range(g.n) if g.degree(v) == g.n - 1]
    if len(g.edges) != g.n - 1 or len(centers) != 1:
        raise GraphError("graph is not a star")
    return centers[0]


class StarSweep:
    """Leaf sweep on the star from the center, leaves in uniformly random order.

    Each leaf gets a block of ``1 + dwell`` turns: one turn at the center,
    then ``dwell`` turns at the leaf. With ``dwell=1`` the cop sits on
    leaves exactly at even times. The sweep repeats with the same order.
    """

    def __init__(self, g: Graph, dwell: int = 1):
        if dwell < 1:
            raise StrategyError("dwell must be at least 1")
        self.graph = g
        self.center = star_center(g)
        self.leaves = tuple(v for v in range(g.n) if v != self.center)
        self.dwell = dwell

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def block(self) -> int:
        return 1 + self.dwell

    def walk(self, order: Sequence[int]) -> Walk:
        cycle: list[int] = []
        for leaf in order:
            cycle.append(self.center)
            cycle.extend([leaf] * self.dwell)
        return Walk(self.center, (), Loop(tuple(cycle)))

    def enumerate(self) -> RandomizedStrategy:
        """Explicit mixture over every leaf order; feasible for few leaves only."""
        return RandomizedStrategy.uniform(
            [self.walk(p) for p in itertools.permutations(self.leaves)]
        )

    def _symmetric_params(self, g: Gamble) -> tuple[Fraction, Fraction, int] | None:
        """``(p_center, a, s)`` if leaves carry either ``a`` or 0, with ``s`` at ``a``."""
        vals = {g[v] for v in self.leaves} - {Fraction(0)}
        if len(vals) > 1:
            return None
        a = vals.pop() if vals else Fraction(0)
        s = sum(1 for v in self.leaves if g[v] == a) if a else 0
        return g[self.center], a, s

    def exact(self, g: Gamble) -> Expectation:
        """Exact expected capture time against a single gamble.

        Uses rank symmetry: under a uniform leaf order, the number of
        positive-mass leaves among the first ``j`` visits is hypergeometric,
        which is all the survival products depend on. Gambles that are not
        leaf-symmetric fall back to enumerating orders.
        """
        if g.n != self.n:
            raise StrategyError("gamble size does not match the star")
        params = self._symmetric_params(g)
        if params is None:
            if math.factorial(len(self.leaves)) > 40320:
                raise StrategyError("exact sweep value needs a leaf-symmetric gamble at this size")
            return expected_capture_randomized(self.enumerate(), g)
        pc, a, s = params
        L, d = len(self.leaves), self.dwell
        gamma, sigma = 1 - pc, 1 - a
        hit_block = sum((sigma**i for i in range(d)), Fraction(0))
        pass_sum = Fraction(0)
        for j in range(L):
            acc = Fraction(0)
            for k in range(max(0, s - (L - j)), min(s, j) + 1):
                pk = Fraction(math.comb(s, k) * math.comb(L - s, j - k), math.comb(L, j))
                hit = Fraction(s - k, L - j)
                block = hit * (1 + gamma * hit_block) + (1 - hit) * (1 + gamma * d)
                acc += pk * sigma ** (d * k) * block
            pass_sum += gamma**j * acc
        pass_survival = gamma**L * sigma ** (d * s)
        if pass_survival == 1:
            return INFINITE
        return pass_sum / (1 - pass_survival)

    def exact_meta(self, m: MetaGamble | Gamble) -> Expectation:
        if isinstance(m, Gamble):
            m = MetaGamble.pure(m)
        total = Fraction(0)
        for w, g in m.components:
            e = self.exact(g)
            if e == INFINITE:
                return INFINITE
            total += w * e
        return total

    def sample_walk_table(self, keys: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-trial walks from uniform keys of shape ``(trials, leaves)``.

        Sorting the keys yields a uniform leaf order per trial. Returns
        ``(prefix_len, cycle_len, sequence)`` as used by the simulator.
        """
        trials = keys.shape[0]
        leaves = np.asarray(self.leaves, dtype=np.int64)
        order = leaves[np.argsort(keys, axis=1, kind="stable")]
        seq = np.repeat(order, self.block, axis=1)
        seq[:, :: self.block] = self.center
        prefix_len = np.zeros(trials, dtype=np.int64)
        cycle_len = np.full(trials, seq.shape[1], dtype=np.int64)
        return prefix_len, cycle_len, seq

    @property
    def random_keys(self) -> int:
        return len(self.leaves)
