"""Graphs, spanning trees, rooted branch statistics and DFS patrol tours.

Vertices are dense integer ids ``0..n-1``. Every :class:`Graph` is validated
on construction: simple, undirected and connected.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable


class GraphError(ValueError):
    """Base class for invalid graph input."""


class MalformedLineError(GraphError):
    pass


class VertexRangeError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class SelfLoopError(GraphError):
    pass


class DisconnectedGraphError(GraphError):
    pass


class NotATreeError(GraphError):
    pass


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 1:
            raise GraphError(f"vertex count must be positive, got {n}")
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            for x in (u, v):
                if not 0 <= x < n:
                    raise VertexRangeError(f"vertex {x} out of range [0, {n})")
            if u == v:
                raise SelfLoopError(f"self-loop at vertex {u}")
            e = _edge(u, v)
            if e in seen:
                raise DuplicateEdgeError(f"duplicate edge {e[0]} {e[1]}")
            seen.add(e)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", frozenset(seen))
        if len(self.component_of(0)) != n:
            raise DisconnectedGraphError(f"graph with {n} vertices is not connected")

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Sorted neighbor tuples, indexed by vertex."""
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(a)) for a in nbrs)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def closed_neighborhood(self, v: int) -> tuple[int, ...]:
        return tuple(sorted((v, *self.adjacency[v])))

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return _edge(u, v) in self.edges

    def can_step(self, u: int, v: int) -> bool:
        """True if a cop at ``u`` may occupy ``v`` on the next move."""
        return u == v or self.has_edge(u, v)

    def component_of(self, v: int) -> set[int]:
        # computed from raw edges: adjacency is not cached yet during __init__
        nbrs: dict[int, list[int]] = {}
        for a, b in self.edges:
            nbrs.setdefault(a, []).append(b)
            nbrs.setdefault(b, []).append(a)
        seen = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for w in nbrs.get(u, ()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def is_tree(self) -> bool:
        return len(self.edges) == self.n - 1

    def distances_from(self, source: int) -> list[int]:
        dist = [-1] * self.n
        dist[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for w in self.adjacency[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    def leaves(self) -> list[int]:
        """Vertices of degree one (the single vertex when n == 1)."""
        if self.n == 1:
            return [0]
        return [v for v in range(self.n) if self.degree(v) == 1]

    def to_text(self) -> str:
        lines = [f"{self.n} {len(self.edges)}"]
        lines += [f"{u} {v}" for u, v in sorted(self.edges)]
        return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    """Parse the edge-list format: header ``n m`` then ``m`` lines ``u v``.

    Lines starting with ``#`` and blank lines are ignored.
    """
    rows: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rows.append((lineno, line.split()))
    if not rows:
        raise MalformedLineError("empty graph document")

    def ints(lineno: int, tokens: list[str], what: str) -> tuple[int, int]:
        if len(tokens) != 2:
            raise MalformedLineError(f"line {lineno}: expected '{what}', got {' '.join(tokens)!r}")
        try:
            return int(tokens[0]), int(tokens[1])
        except ValueError:
            raise MalformedLineError(f"line {lineno}: non-integer token in {' '.join(tokens)!r}") from None

    n, m = ints(*rows[0], "n m")
    if n < 1 or m < 0:
        raise MalformedLineError(f"line {rows[0][0]}: bad header n={n} m={m}")
    body = rows[1:]
    if len(body) != m:
        raise MalformedLineError(f"header declares {m} edges, found {len(body)} edge lines")
    return Graph(n, [ints(lineno, tokens, "u v") for lineno, tokens in body])


def spanning_tree(g: Graph) -> Graph:
    """Breadth-first spanning tree from vertex 0, neighbors in ascending order."""
    seen = [False] * g.n
    seen[0] = True
    queue = deque([0])
    edges = []
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if not seen[w]:
                seen[w] = True
                edges.append((u, w))
                queue.append(w)
    return Graph(g.n, edges)


@dataclass(frozen=True)
class RootedTree:
    tree: Graph
    root: int
    parent: tuple[int, ...]
    subtree_size: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return self.tree.n

    def is_leaf(self, v: int) -> bool:
        return not self.children[v]

    def preorder(self) -> list[int]:
        out = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(reversed(self.children[v]))
        return out

    def branch(self, v: int) -> set[int]:
        """Vertices whose path to the root passes through ``v``."""
        out = set()
        stack = [v]
        while stack:
            u = stack.pop()
            out.add(u)
            stack.extend(self.children[u])
        return out


def root_tree(t: Graph, root: int) -> RootedTree:
    if not t.is_tree():
        raise NotATreeError(f"expected {t.n - 1} edges for a tree, got {len(t.edges)}")
    if not 0 <= root < t.n:
        raise VertexRangeError(f"root {root} out of range [0, {t.n})")
    parent = [-1] * t.n
    parent[root] = root
    order = [root]
    for u in order:
        for w in t.adjacency[u]:
            if parent[w] < 0:
                parent[w] = u
                order.append(w)
    children: list[list[int]] = [[] for _ in range(t.n)]
    for v in range(t.n):
        if v != root:
            children[parent[v]].append(v)
    size = [1] * t.n
    for v in reversed(order):
        if v != root:
            size[parent[v]] += size[v]
    return RootedTree(
        tree=t,
        root=root,
        parent=tuple(parent),
        subtree_size=tuple(size),
        children=tuple(tuple(sorted(c)) for c in children),
    )


def dfs_patrol_order(rt: RootedTree, reversed_: bool = False) -> list[int]:
    """Closed depth-first tour from the root with one extra turn at every leaf.

    Children are taken in ascending id order; ``reversed_`` returns the same
    tour walked backwards. Each tree edge is crossed exactly twice. A single
    vertex tree yields ``[root, root]``.
    """
    if rt.n == 1:
        return [rt.root, rt.root]
    tour = [rt.root]
    stack = [(rt.root, iter(rt.children[rt.root]))]
    while stack:
        v, kids = stack[-1]
        c = next(kids, None)
        if c is None:
            stack.pop()
            if stack:
                tour.append(stack[-1][0])
            continue
        tour.append(c)
        if rt.is_leaf(c):
            tour.append(c)
            tour.append(v)
        else:
            stack.append((c, iter(rt.children[c])))
    return tour[::-1] if reversed_ else tour
