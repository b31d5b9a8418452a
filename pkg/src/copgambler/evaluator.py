"""Exact expected capture times.

Timing: the cop occupies ``start`` at time 0 and ``w_t`` at each time
``t >= 1``. Capture is checked only at ``t >= 1``, so

    E[T] = sum_{t >= 1} prod_{s < t} (1 - p(w_s))

Every walk has an eventually constant or eventually periodic tail, so the
sum splits into a finite prefix plus a geometric series. Results are exact
``Fraction`` values, or ``math.inf`` when capture can fail forever.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

from .gamble import Gamble, MetaGamble
from .graph import Graph

INFINITE = math.inf

Expectation = Union[Fraction, float]


class WalkError(ValueError):
    pass


@dataclass(frozen=True)
class Absorb:
    vertex: int


@dataclass(frozen=True)
class Loop:
    cycle: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "cycle", tuple(self.cycle))
        if not self.cycle:
            raise WalkError("loop tail must be nonempty")


Tail = Union[Absorb, Loop]


@dataclass(frozen=True)
class Walk:
    start: int
    prefix: tuple[int, ...]
    tail: Tail

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))

    @classmethod
    def stay(cls, v: int) -> Walk:
        return cls(v, (), Absorb(v))

    @property
    def tail_cycle(self) -> tuple[int, ...]:
        return (self.tail.vertex,) if isinstance(self.tail, Absorb) else self.tail.cycle

    def vertices(self) -> set[int]:
        return {self.start, *self.prefix, *self.tail_cycle}

    def at(self, t: int) -> int:
        """Vertex occupied at time ``t``."""
        if t == 0:
            return self.start
        if t <= len(self.prefix):
            return self.prefix[t - 1]
        cyc = self.tail_cycle
        return cyc[(t - len(self.prefix) - 1) % len(cyc)]

    def occupancies(self) -> Iterator[int]:
        """Vertices at times 1, 2, 3, ... (infinite)."""
        yield from self.prefix
        cyc = self.tail_cycle
        while True:
            yield from cyc

    def check(self, g: Graph) -> None:
        """Raise WalkError unless every move is a stay or an edge of ``g``."""
        seq = [self.start, *self.prefix, *self.tail_cycle]
        for v in seq:
            if not 0 <= v < g.n:
                raise WalkError(f"vertex {v} not in graph with {g.n} vertices")
        for a, b in zip(seq, seq[1:]):
            if not g.can_step(a, b):
                raise WalkError(f"illegal move {a} -> {b}")
        cyc = self.tail_cycle
        if not g.can_step(cyc[-1], cyc[0]):
            raise WalkError(f"loop wrap-around {cyc[-1]} -> {cyc[0]} is not a move")

    def __str__(self) -> str:
        return format_walk(self)


def parse_walk(text: str) -> Walk:
    """Parse ``start | p1 ... pk | absorb a`` or ``start | p1 ... pk | loop c1 ... cL``."""
    parts = [p.strip() for p in text.split("|")]
    if len(parts) != 3:
        raise WalkError(f"walk literal needs three '|'-separated fields: {text!r}")
    try:
        start = int(parts[0])
        prefix = tuple(int(x) for x in parts[1].split())
        kind, *rest = parts[2].split()
        tail_vs = tuple(int(x) for x in rest)
    except ValueError:
        raise WalkError(f"cannot parse walk literal {text!r}") from None
    if kind == "absorb":
        if len(tail_vs) != 1:
            raise WalkError("absorb takes exactly one vertex")
        return Walk(start, prefix, Absorb(tail_vs[0]))
    if kind == "loop":
        return Walk(start, prefix, Loop(tail_vs))
    raise WalkError(f"unknown tail kind {kind!r}")


def format_walk(w: Walk) -> str:
    prefix = " ".join(map(str, w.prefix))
    if isinstance(w.tail, Absorb):
        tail = f"absorb {w.tail.vertex}"
    else:
        tail = "loop " + " ".join(map(str, w.tail.cycle))
    middle = f" {prefix} " if prefix else " "
    return f"{w.start} |{middle}| {tail}"


def _check_sizes(w: Walk, g: Gamble) -> None:
    bad = [v for v in w.vertices() if not 0 <= v < g.n]
    if bad:
        raise WalkError(f"walk visits {bad}, outside gamble over {g.n} vertices")


def survival_probability(w: Walk, g: Gamble, t: int) -> Fraction:
    """Probability that no capture has happened by the end of time ``t``."""
    _check_sizes(w, g)
    if t < 0:
        raise ValueError("t must be nonnegative")
    surv = Fraction(1)
    occ = w.occupancies()
    for _ in range(t):
        surv *= 1 - g[next(occ)]
        if not surv:
            break
    return surv


def expected_capture_time(w: Walk, g: Gamble) -> Expectation:
    _check_sizes(w, g)
    total = Fraction(0)
    surv = Fraction(1)
    for v in w.prefix:
        total += surv
        surv *= 1 - g[v]
    if not surv:
        return total
    # one pass over the tail cycle: partial sums and per-cycle survival
    partial = Fraction(0)
    rho = Fraction(1)
    for v in w.tail_cycle:
        partial += rho
        rho *= 1 - g[v]
    if rho == 1:
        return INFINITE
    return total + surv * partial / (1 - rho)


@dataclass(frozen=True)
class RandomizedStrategy:
    """Cop picks one walk at random (weights exact) before play starts."""

    components: tuple[tuple[Fraction, Walk], ...]

    def __post_init__(self):
        comps = tuple((Fraction(w), walk) for w, walk in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise WalkError("randomized strategy needs at least one walk")
        if any(w <= 0 for w, _ in comps):
            raise WalkError("strategy weights must be positive")
        if sum(w for w, _ in comps) != 1:
            raise WalkError("strategy weights must sum to 1")

    @classmethod
    def pure(cls, w: Walk) -> RandomizedStrategy:
        return cls(((Fraction(1), w),))

    @classmethod
    def uniform(cls, walks: Sequence[Walk]) -> RandomizedStrategy:
        q = Fraction(1, len(walks))
        return cls(tuple((q, w) for w in walks))

    @classmethod
    def mix(cls, parts: Iterable[tuple[Fraction, RandomizedStrategy]]) -> RandomizedStrategy:
        """Flatten a weighted mixture of strategies into one."""
        return cls(
            tuple((a * b, w) for a, s in parts for b, w in s.components)
        )

    def check(self, g: Graph) -> None:
        for _, w in self.components:
            w.check(g)


def _weighted_sum(terms: Iterable[tuple[Fraction, Expectation]]) -> Expectation:
    total = Fraction(0)
    for weight, e in terms:
        if e == INFINITE:
            return INFINITE
        total += weight * e
    return total


def expected_capture_randomized(s: RandomizedStrategy, g: Gamble) -> Expectation:
    return _weighted_sum((w, expected_capture_time(walk, g)) for w, walk in s.components)


def expected_capture_meta(s: RandomizedStrategy | Walk, m: MetaGamble | Gamble) -> Expectation:
    """Cop randomness and the gambler's one-time choice are independent."""
    if isinstance(s, Walk):
        s = RandomizedStrategy.pure(s)
    if isinstance(m, Gamble):
        m = MetaGamble.pure(m)
    return _weighted_sum((w, expected_capture_randomized(s, g)) for w, g in m.components)


def tail_bound(w: Walk, g: Gamble, horizon: int) -> tuple[Fraction, Expectation]:
    """Truncated sum of survival probabilities plus a rigorous bound on the remainder.

    Returns ``(partial, remainder_bound)`` with
    ``partial <= E <= partial + remainder_bound``. Computed step by step,
    independently of the closed form in :func:`expected_capture_time`.
    """
    _check_sizes(w, g)
    if horizon < len(w.prefix):
        raise ValueError("horizon must cover the walk prefix")
    partial = Fraction(0)
    surv = Fraction(1)
    occ = w.occupancies()
    for _ in range(horizon):
        partial += surv
        surv *= 1 - g[next(occ)]
    if not surv:
        return partial, Fraction(0)
    # past the prefix, survival shrinks by rho over every full cycle and is
    # nonincreasing inside one
    rho = Fraction(1)
    for v in w.tail_cycle:
        rho *= 1 - g[v]
    if rho == 1:
        return partial, INFINITE
    return partial, surv * len(w.tail_cycle) / (1 - rho)
