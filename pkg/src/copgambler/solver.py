"""Optimal cop play against a known gamble.

The optimal expected capture time from vertex ``u`` is the least fixed point of

    V(u) = min over w in N[u] of 1 + (1 - p_w) V(w)

Value iteration from the zero table approaches it monotonically from below,
so every iterate is a valid lower bound. The greedy policy is then evaluated
exactly in rationals, which gives an upper bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .evaluator import Absorb, Expectation, Loop, Walk, expected_capture_time
from .gamble import Gamble
from .graph import Graph

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10**7


class SolverError(RuntimeError):
    pass


class SandwichWidthError(SolverError):
    pass


@dataclass(frozen=True)
class ValueTable:
    values: np.ndarray
    residual: float
    iterations: int

    def __getitem__(self, v: int) -> float:
        return float(self.values[v])


def _neighborhood_index(g: Graph) -> np.ndarray:
    """Rows of closed neighborhoods, padded by repeating the vertex itself."""
    width = 1 + max((g.degree(v) for v in range(g.n)), default=0)
    idx = np.empty((g.n, width), dtype=np.int64)
    for v in range(g.n):
        nb = g.closed_neighborhood(v)
        idx[v, : len(nb)] = nb
        idx[v, len(nb):] = v
    return idx


def value_iterates(g: Graph, gamble: Gamble) -> Iterator[np.ndarray]:
    """Successive Jacobi iterates ``V_1, V_2, ...`` starting from ``V_0 = 0``."""
    if gamble.n != g.n:
        raise ValueError(f"gamble over {gamble.n} vertices, graph has {g.n}")
    idx = _neighborhood_index(g)
    miss = 1.0 - np.asarray(gamble.as_floats())
    v = np.zeros(g.n)
    while True:
        cost = 1.0 + miss * v
        v = cost[idx].min(axis=1)
        yield v


def bellman_residual(g: Graph, gamble: Gamble, values: np.ndarray) -> float:
    idx = _neighborhood_index(g)
    miss = 1.0 - np.asarray(gamble.as_floats())
    return float(np.max(np.abs((1.0 + miss * values)[idx].min(axis=1) - values)))


def solve_value(
    g: Graph, gamble: Gamble, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> ValueTable:
    prev = np.zeros(g.n)
    for k, cur in enumerate(value_iterates(g, gamble), start=1):
        step = float(np.max(cur - prev))
        if step < tol:
            return ValueTable(cur, step, k)
        if k >= max_iter:
            raise SolverError(f"no convergence after {max_iter} sweeps (step {step:.3g})")
        prev = cur
    raise AssertionError("unreachable")


def policy_step(g: Graph, gamble: Gamble, values: np.ndarray, u: int, tie_tol: float = 1e-9) -> int:
    """Greedy move from ``u``; near-ties go to the smallest vertex id."""
    nb = g.closed_neighborhood(u)
    costs = [1.0 + (1.0 - float(gamble[w])) * values[w] for w in nb]
    best = min(costs)
    return next(w for w, c in zip(nb, costs) if c <= best + tie_tol)


def extract_policy_walk(
    g: Graph, gamble: Gamble, vt: ValueTable, start: int, tie_tol: float = 1e-9
) -> Walk:
    """Follow the greedy policy from ``start`` until a vertex repeats."""
    first_seen = {start: 0}
    traj = [start]
    while True:
        nxt = policy_step(g, gamble, vt.values, traj[-1], tie_tol)
        if nxt in first_seen:
            i = first_seen[nxt]
            break
        first_seen[nxt] = len(traj)
        traj.append(nxt)
    # traj[t] is occupied at time t; from time i on the trajectory cycles
    j = len(traj)
    if i == 0:
        prefix: tuple[int, ...] = ()
        cycle = tuple(traj[1:]) + (start,)
    else:
        prefix = tuple(traj[1:i])
        cycle = tuple(traj[i:j])
    tail = Absorb(cycle[0]) if len(cycle) == 1 else Loop(cycle)
    return Walk(start, prefix, tail)


@dataclass(frozen=True)
class Sandwich:
    lower: float
    upper: Expectation
    walk: Walk
    tol: float

    @property
    def width(self) -> float:
        return float(self.upper) - self.lower


def value_sandwich(
    g: Graph,
    gamble: Gamble,
    start: int,
    tol: float = DEFAULT_TOL,
    vt: ValueTable | None = None,
    strict: bool = True,
) -> Sandwich:
    """Certified bracket on the optimal value from ``start``.

    ``lower`` is the value-iteration iterate, ``upper`` the exact value of
    the extracted policy walk. With ``strict`` a bracket wider than
    ``10 * tol`` raises :class:`SandwichWidthError`.

    A step below ``tol`` still leaves the iterate up to ``tol / (1 - rho)``
    under the fixed point, so the solve runs at ``tol / 100``.
    """
    if vt is None:
        vt = solve_value(g, gamble, tol / 100)
    walk = extract_policy_walk(g, gamble, vt, start)
    out = Sandwich(float(vt.values[start]), expected_capture_time(walk, gamble), walk, tol)
    if strict and g.n <= 12 and out.width > 10 * tol:
        raise SandwichWidthError(
            f"sandwich [{out.lower!r}, {float(out.upper)!r}] wider than {10 * tol:g} at start {start}"
        )
    return out


@dataclass(frozen=True)
class StartAnalysis:
    worst: tuple[int, float]
    best: tuple[int, float]


def start_position_analysis(
    g: Graph, gamble: Gamble, tol: float = DEFAULT_TOL, vt: ValueTable | None = None
) -> StartAnalysis:
    """Worst and best starting vertices for the cop; values within ``10 * tol`` tie."""
    if vt is None:
        vt = solve_value(g, gamble, tol)
    vals = vt.values
    hi, lo = float(vals.max()), float(vals.min())
    worst = next(v for v in range(g.n) if vals[v] >= hi - 10 * tol)
    best = next(v for v in range(g.n) if vals[v] <= lo + 10 * tol)
    return StartAnalysis((worst, float(vals[worst])), (best, float(vals[best])))


def exact_policy_values(g: Graph, gamble: Gamble, vt: ValueTable) -> list[Fraction | float]:
    """Exact value of the greedy policy from every start."""
    return [expected_capture_time(extract_policy_walk(g, gamble, vt, s), gamble) for s in range(g.n)]
