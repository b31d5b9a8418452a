"""Reproducible Monte Carlo simulation of cop strategies against gamblers.

Every random number is a pure function of ``(master_seed, trial, stream,
counter)``, hashed with the SplitMix64 finalizer. Trials can therefore be
split across threads in any way and the report stays bit-identical.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Protocol, Sequence, Union

import numpy as np

from .evaluator import Expectation, RandomizedStrategy, Walk
from .gamble import Gamble, MetaGamble

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1

# random streams per trial
_COP_PICK, _COP_KEYS, _GAMBLE_PICK, _GAMBLER_STEP = 0, 1, 2, 3

CHUNK = 4096
STEP_BLOCK = 64


class SimulationDiverged(RuntimeError):
    pass


class SampledStrategy(Protocol):
    """Strategy that draws its walk from per-trial uniform keys (e.g. a random order)."""

    random_keys: int

    def sample_walk_table(self, keys: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]: ...


Strategy = Union[Walk, RandomizedStrategy, SampledStrategy]


def _mix(x: np.ndarray) -> np.ndarray:
    x = (x ^ (x >> np.uint64(30))) * _M1
    x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


def counter_uniforms(seed: int, trials: np.ndarray, stream: int, counters: np.ndarray) -> np.ndarray:
    """Uniform doubles in [0, 1) for every (trial, counter) pair.

    ``trials`` has shape ``(B,)`` and ``counters`` shape ``(K,)``; the result
    has shape ``(B, K)``.
    """
    with np.errstate(over="ignore"):
        seed_word = np.uint64(seed & _MASK64)
        key = _mix(seed_word + (trials.astype(np.uint64) + np.uint64(1)) * _GOLDEN)
        ctr = _mix((np.uint64(stream) << np.uint64(48)) ^ counters.astype(np.uint64))
        x = _mix(key[:, None] ^ ctr[None, :])
    return (x >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def _cumulative(weights: Sequence[Fraction]) -> np.ndarray:
    """Exact cumulative sums rounded to float, so the last entry is exactly 1."""
    acc, out = Fraction(0), []
    for w in weights:
        acc += w
        out.append(float(acc))
    return np.asarray(out)


def _walk_table(walks: Sequence[Walk]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    width = max(len(w.prefix) + len(w.tail_cycle) for w in walks)
    seq = np.zeros((len(walks), width), dtype=np.int64)
    for i, w in enumerate(walks):
        row = list(w.prefix) + list(w.tail_cycle)
        seq[i, : len(row)] = row
    pre = np.array([len(w.prefix) for w in walks], dtype=np.int64)
    cyc = np.array([len(w.tail_cycle) for w in walks], dtype=np.int64)
    return pre, cyc, seq


@dataclass
class SimReport:
    trials: int
    mean: float
    sample_variance: float
    ci95_halfwidth: float
    master_seed: int
    capture_time_histogram: dict[int, int] = field(repr=False)

    @property
    def sigma(self) -> float:
        """Standard error of the mean."""
        return self.ci95_halfwidth / 1.96

    def to_dict(self) -> dict:
        d = asdict(self)
        d["capture_time_histogram"] = {str(k): v for k, v in sorted(self.capture_time_histogram.items())}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _report(hist: Counter, trials: int, seed: int) -> SimReport:
    total = sum(t * c for t, c in hist.items())
    total_sq = sum(t * t * c for t, c in hist.items())
    mean = Fraction(total, trials)
    var = Fraction(total_sq * trials - total * total, trials * (trials - 1)) if trials > 1 else Fraction(0)
    ci = 1.96 * math.sqrt(var / trials)
    return SimReport(trials, float(mean), float(var), ci, seed, dict(sorted(hist.items())))


def _run_chunk(strategy, opponent: MetaGamble, seed: int, lo: int, hi: int, max_steps: int) -> np.ndarray:
    trials = np.arange(lo, hi, dtype=np.int64)
    b = len(trials)
    zero = np.zeros(1, dtype=np.int64)

    if isinstance(strategy, RandomizedStrategy):
        pre_c, cyc_c, seq_c = _walk_table([w for _, w in strategy.components])
        cdf = _cumulative([w for w, _ in strategy.components])
        u = counter_uniforms(seed, trials, _COP_PICK, zero)[:, 0]
        pick = np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)
        pre, cyc, seq = pre_c[pick], cyc_c[pick], seq_c[pick]
    else:
        keys = counter_uniforms(seed, trials, _COP_KEYS, np.arange(strategy.random_keys))
        pre, cyc, seq = strategy.sample_walk_table(keys)

    # capture at time t iff the gambler's uniform lands in the cop vertex's cdf slot
    gcdf = np.stack([_cumulative(g.probs) for _, g in opponent.components])
    glo = np.concatenate([np.zeros((len(gcdf), 1)), gcdf[:, :-1]], axis=1)
    wcdf = _cumulative([w for w, _ in opponent.components])
    u = counter_uniforms(seed, trials, _GAMBLE_PICK, zero)[:, 0]
    gpick = np.minimum(np.searchsorted(wcdf, u, side="right"), len(wcdf) - 1)

    result = np.zeros(b, dtype=np.int64)
    active = np.arange(b)
    t0 = 1
    while active.size:
        if t0 > max_steps:
            raise SimulationDiverged(
                f"{active.size} trials uncaptured after {max_steps} steps"
            )
        ts = np.arange(t0, t0 + STEP_BLOCK, dtype=np.int64)
        p, c = pre[active, None], cyc[active, None]
        idx = np.where(ts[None, :] <= p, ts[None, :] - 1, p + (ts[None, :] - 1 - p) % c)
        occ = np.take_along_axis(seq[active], idx, axis=1)
        comp = gpick[active, None]
        u = counter_uniforms(seed, trials[active], _GAMBLER_STEP, ts)
        hit = (u >= glo[comp, occ]) & (u < gcdf[comp, occ])
        caught = hit.any(axis=1)
        first = hit.argmax(axis=1)
        result[active[caught]] = ts[first[caught]]
        active = active[~caught]
        t0 += STEP_BLOCK
    return result


def simulate(
    strategy: Strategy,
    opponent: Gamble | MetaGamble,
    trials: int,
    master_seed: int,
    workers: int = 1,
    max_steps: int | None = None,
) -> SimReport:
    """Play ``trials`` independent games and summarize the capture times.

    ``max_steps`` defaults to ``10**9 // trials``; a trial still running
    after that many moves raises :class:`SimulationDiverged`.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if isinstance(strategy, Walk):
        strategy = RandomizedStrategy.pure(strategy)
    if isinstance(opponent, Gamble):
        opponent = MetaGamble.pure(opponent)
    if max_steps is None:
        max_steps = max(10**9 // trials, 1)
    bounds = [(lo, min(lo + CHUNK, trials)) for lo in range(0, trials, CHUNK)]

    def run(bound: tuple[int, int]) -> np.ndarray:
        return _run_chunk(strategy, opponent, master_seed, *bound, max_steps)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, bounds))
    else:
        parts = [run(b) for b in bounds]
    hist: Counter = Counter()
    for part in parts:
        vals, counts = np.unique(part, return_counts=True)
        for v, c in zip(vals.tolist(), counts.tolist()):
            hist[v] += c
    return _report(hist, trials, master_seed)


@dataclass
class SimCase:
    label: str
    strategy: Strategy
    opponent: Gamble | MetaGamble
    exact: Expectation


def disagrees(report: SimReport, exact: Expectation, k: float = 4.0) -> bool:
    """True if the sample mean is more than ``k`` standard errors from ``exact``."""
    return abs(report.mean - float(exact)) > k * report.sigma


def compare_exact_vs_mc(
    cases: Sequence[SimCase], trials: int = 10**5, master_seed: int = 0, workers: int = 1
) -> list[dict]:
    rows = []
    for i, case in enumerate(cases):
        rep = simulate(case.strategy, case.opponent, trials, master_seed + i, workers)
        z = abs(rep.mean - float(case.exact)) / rep.sigma if rep.sigma else (
            0.0 if rep.mean == float(case.exact) else math.inf
        )
        rows.append(
            {
                "label": case.label,
                "exact": float(case.exact),
                "mean": rep.mean,
                "sigma": rep.sigma,
                "z": z,
                "flagged": disagrees(rep, case.exact),
            }
        )
    return rows
