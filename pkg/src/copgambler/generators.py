"""Graph families and random corpora for tests and experiments."""

from __future__ import annotations

import random
from typing import Iterator

import networkx as nx

from .evaluator import Absorb, Loop, Walk
from .graph import Graph


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(n: int) -> Graph:
    """``K_{1,n-1}`` with center 0."""
    return Graph(n, [(0, i) for i in range(1, n)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_tree(n: int, rng: random.Random) -> Graph:
    """Random recursive tree under a random relabeling."""
    labels = list(range(n))
    rng.shuffle(labels)
    return Graph(n, [(labels[i], labels[rng.randrange(i)]) for i in range(1, n)])


def random_connected_graph(n: int, rng: random.Random, extra: float | None = None) -> Graph:
    """Random tree plus each remaining pair independently with probability ``extra``."""
    if extra is None:
        extra = rng.choice([0.0, 0.05, 0.15, 0.4])
    base = random_tree(n, rng)
    edges = set(base.edges)
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in edges and rng.random() < extra:
                edges.add((i, j))
    return Graph(n, edges)


def unlabeled_trees(n: int) -> Iterator[Graph]:
    """Every tree on ``n`` vertices, one per isomorphism class."""
    if n == 1:
        yield Graph(1)
        return
    for t in nx.nonisomorphic_trees(n):
        yield Graph(n, t.edges())


def _random_step(g: Graph, v: int, rng: random.Random) -> int:
    return rng.choice(g.closed_neighborhood(v))


def _shortest_path(g: Graph, a: int, b: int) -> list[int]:
    """Vertices after ``a`` up to and including ``b``."""
    dist = g.distances_from(b)
    out = []
    while a != b:
        a = min(w for w in g.adjacency[a] if dist[w] == dist[a] - 1)
        out.append(a)
    return out


def random_walk(g: Graph, rng: random.Random, max_prefix: int = 12, max_cycle: int = 12) -> Walk:
    """Random legal walk with either an absorbing or a looping tail."""
    start = rng.randrange(g.n)
    prefix = []
    v = start
    for _ in range(rng.randint(0, max_prefix)):
        v = _random_step(g, v, rng)
        prefix.append(v)
    if rng.random() < 0.4:
        return Walk(start, prefix, Absorb(_random_step(g, v, rng)))
    # closed loop: wander off, then return to the loop's first vertex
    first = _random_step(g, v, rng)
    cycle = [first]
    u = first
    for _ in range(rng.randint(0, max_cycle)):
        u = _random_step(g, u, rng)
        cycle.append(u)
    # the wrap-around supplies the final step into `first`
    cycle.extend(_shortest_path(g, u, first)[:-1])
    return Walk(start, prefix, Loop(tuple(cycle)))
