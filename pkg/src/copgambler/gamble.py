"""Exact gambles (fixed vertex distributions) and meta-gambles (mixtures)."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class GambleError(ValueError):
    pass


@dataclass(frozen=True)
class Gamble:
    """Probability of the gambler sitting at each vertex, as exact rationals."""

    probs: tuple[Fraction, ...]

    def __post_init__(self):
        probs = tuple(Fraction(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if not probs:
            raise GambleError("gamble over an empty vertex set")
        if any(p < 0 for p in probs):
            raise GambleError("negative probability in gamble")
        total = sum(probs, Fraction(0))
        if total != 1:
            raise GambleError(f"gamble sums to {total}, not 1")

    @property
    def n(self) -> int:
        return len(self.probs)

    def __getitem__(self, v: int) -> Fraction:
        return self.probs[v]

    def __iter__(self):
        return iter(self.probs)

    def __len__(self) -> int:
        return len(self.probs)

    def support(self) -> list[int]:
        return [v for v, p in enumerate(self.probs) if p > 0]

    def mass(self, vertices: Iterable[int]) -> Fraction:
        return sum((self.probs[v] for v in vertices), Fraction(0))

    def as_floats(self) -> list[float]:
        return [float(p) for p in self.probs]

    def to_text(self) -> str:
        return "".join(f"{v} {p}\n" for v, p in enumerate(self.probs) if p)


@dataclass(frozen=True)
class MetaGamble:
    """A gambler who picks one of several gambles at random before play starts."""

    components: tuple[tuple[Fraction, Gamble], ...]

    def __post_init__(self):
        comps = tuple((Fraction(w), g) for w, g in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise GambleError("meta-gamble needs at least one component")
        if any(w <= 0 for w, _ in comps):
            raise GambleError("meta-gamble weights must be positive")
        if sum(w for w, _ in comps) != 1:
            raise GambleError("meta-gamble weights must sum to 1")
        if len({g.n for _, g in comps}) != 1:
            raise GambleError("meta-gamble components disagree on vertex count")

    @property
    def n(self) -> int:
        return self.components[0][1].n

    @classmethod
    def pure(cls, g: Gamble) -> MetaGamble:
        return cls(((Fraction(1), g),))

    def collapse(self) -> Gamble:
        """Vertex marginals of the mixture. Not the same game as the mixture itself."""
        probs = [Fraction(0)] * self.n
        for w, g in self.components:
            for v, p in enumerate(g.probs):
                probs[v] += w * p
        return Gamble(tuple(probs))


def uniform_gamble(n: int) -> Gamble:
    if n < 1:
        raise GambleError(f"need n >= 1, got {n}")
    return Gamble((Fraction(1, n),) * n)


def delta_gamble(n: int, v: int) -> Gamble:
    if not 0 <= v < n:
        raise GambleError(f"vertex {v} out of range [0, {n})")
    return Gamble(tuple(Fraction(int(u == v)) for u in range(n)))


def uniform_on_subset(n: int, subset: Iterable[int]) -> Gamble:
    s = set(subset)
    if not s:
        raise GambleError("uniform gamble on an empty vertex set")
    if not all(0 <= v < n for v in s):
        raise GambleError(f"subset {sorted(s)} not contained in [0, {n})")
    q = Fraction(1, len(s))
    return Gamble(tuple(q if v in s else Fraction(0) for v in range(n)))


def random_sitter_meta(n: int, leaves: Iterable[int]) -> MetaGamble:
    """Sitter hiding at one of ``leaves`` chosen uniformly."""
    spots = sorted(set(leaves))
    if not spots:
        raise GambleError("random sitter needs at least one hiding place")
    w = Fraction(1, len(spots))
    return MetaGamble(tuple((w, delta_gamble(n, v)) for v in spots))


def interval_meta(n: int, k: int | None = None) -> MetaGamble:
    """Uniform gamble on a uniformly chosen arc of ``k`` consecutive cycle vertices.

    ``k`` defaults to ``ceil(sqrt(n))``.
    """
    if k is None:
        k = math.isqrt(n - 1) + 1 if n > 1 else 1
    if not 1 <= k <= n:
        raise GambleError(f"interval width {k} outside [1, {n}]")
    w = Fraction(1, n)
    return MetaGamble(
        tuple((w, uniform_on_subset(n, [(i + j) % n for j in range(k)])) for i in range(n))
    )


def random_gamble(n: int, rng: random.Random, max_weight: int = 100) -> Gamble:
    """Integer weights drawn from ``[0, max_weight]`` and normalized exactly."""
    while True:
        weights = [rng.randint(0, max_weight) for _ in range(n)]
        total = sum(weights)
        if total:
            return Gamble(tuple(Fraction(w, total) for w in weights))


def parse_gamble(text: str, n: int) -> Gamble:
    """Parse lines ``v p`` where ``p`` is ``a/b`` or a decimal literal.

    Omitted vertices get probability zero; ``#`` starts a comment line.
    """
    probs = [Fraction(0)] * n
    seen: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise GambleError(f"line {lineno}: expected 'v p', got {line!r}")
        try:
            v = int(tokens[0])
            p = Fraction(tokens[1])
        except (ValueError, ZeroDivisionError):
            raise GambleError(f"line {lineno}: cannot parse {line!r}") from None
        if not 0 <= v < n:
            raise GambleError(f"line {lineno}: vertex {v} out of range [0, {n})")
        if v in seen:
            raise GambleError(f"line {lineno}: vertex {v} listed twice")
        seen.add(v)
        probs[v] = p
    return Gamble(tuple(probs))


def format_fraction(x: Fraction) -> str:
    """Always ``a/b``, so integers come out as ``8/1``."""
    return f"{x.numerator}/{x.denominator}"


def leaf_gambles(n: int, leaves: Sequence[int]) -> dict[str, MetaGamble]:
    """The two leaf opponents used against star sweeps."""
    return {
        "random-sitter": random_sitter_meta(n, leaves),
        "uniform-leaves": MetaGamble.pure(uniform_on_subset(n, leaves)),
    }
