"""Monte Carlo simulation of the isotropic random flight.

A trajectory starts at the origin with a uniform direction, runs at speed c
and re-draws its direction uniformly at the events of a rate-lambda Poisson
process. Only the position at time t is kept.

Reproducibility: the sample budget is split across ``workers`` sub-streams,
each driven by a Philox counter-based generator spawned from
``SeedSequence(seed)``. For a fixed (seed, workers, samples) the estimates are
bit-identical regardless of how the sub-streams are scheduled.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .coeffs import FlightParams

WORKERS_ENV = "MARKOVFLIGHT_WORKERS"
CHUNK = 1 << 18
SUPPORT_RTOL = 1e-12


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {env!r}")
        return n
    return os.cpu_count() or 1


@dataclass(frozen=True)
class McConfig:
    params: FlightParams
    t: float
    samples: int = 1_000_000
    seed: int = 42
    workers: int = field(default_factory=default_workers)

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError(f"t must be > 0, got {self.t!r}")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class McEstimate:
    """Sample mean and standard error. Complex estimands carry the imaginary
    part in ``imag`` / ``imag_stderr``."""

    mean: float
    stderr: float
    samples: int
    seed: int
    imag: float | None = None
    imag_stderr: float | None = None


def make_rng(seed: int, index: int = 0, workers: int = 1) -> np.random.Generator:
    """Generator for sub-stream ``index`` of ``workers`` derived from ``seed``."""
    child = np.random.SeedSequence(seed).spawn(workers)[index]
    return np.random.Generator(np.random.Philox(child))


def sample_directions(m: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` independent uniform unit vectors in R^m, shape (size, m)."""
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    g = rng.standard_normal((size, m))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sample_direction(m: int, rng: np.random.Generator) -> np.ndarray:
    return sample_directions(m, 1, rng)[0]


def simulate_positions(
    params: FlightParams, t: float, size: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Positions at time t of ``size`` trajectories and their event counts.

    Event times are cumulative exponential gaps; the segment that crosses t is
    cut there.
    """
    m, lam, c = params.m, params.lam, params.c
    pos = np.zeros((size, m))
    events = np.zeros(size, dtype=np.int64)
    remaining = np.full(size, float(t))
    active = np.arange(size)
    while active.size:
        d = sample_directions(m, active.size, rng)
        if lam > 0:
            gap = rng.exponential(1.0 / lam, active.size)
        else:
            gap = np.full(active.size, np.inf)
        rem = remaining[active]
        switched = gap < rem
        seg = np.where(switched, gap, rem)
        pos[active] += (c * seg)[:, None] * d
        remaining[active] = rem - seg
        events[active[switched]] += 1
        active = active[switched]
    return pos, events


def simulate_position(cfg: McConfig, rng: np.random.Generator) -> np.ndarray:
    """Position vector of a single trajectory."""
    return simulate_positions(cfg.params, cfg.t, 1, rng)[0][0]


Statistic = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _worker_sums(cfg: McConfig, stat: Statistic, index: int, count: int):
    rng = make_rng(cfg.seed, index, cfg.workers)
    bound = cfg.params.c * cfg.t * (1 + SUPPORT_RTOL)
    s1 = s2 = None
    done = 0
    while done < count:
        size = min(CHUNK, count - done)
        pos, events = simulate_positions(cfg.params, cfg.t, size, rng)
        norms = np.linalg.norm(pos, axis=1)
        if np.any(norms > bound):
            raise AssertionError(
                f"trajectory left the ball of radius ct: max |x| = {norms.max()!r}"
            )
        values = np.asarray(stat(pos, events), dtype=float)
        part1 = values.sum(axis=0)
        part2 = (values * values).sum(axis=0)
        s1 = part1 if s1 is None else s1 + part1
        s2 = part2 if s2 is None else s2 + part2
        done += size
    return s1, s2


def accumulate(cfg: McConfig, stat: Statistic) -> tuple[np.ndarray, np.ndarray]:
    """Mean and standard error of ``stat(positions, events)`` over the samples.

    ``stat`` maps a (k, m) position block and its (k,) event counts to (k,) or
    (k, j) values.
    """
    base, rem = divmod(cfg.samples, cfg.workers)
    counts = [base + (i < rem) for i in range(cfg.workers)]
    jobs = [(i, n) for i, n in enumerate(counts) if n]
    if cfg.workers == 1 or len(jobs) == 1:
        results = [_worker_sums(cfg, stat, i, n) for i, n in jobs]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(lambda job: _worker_sums(cfg, stat, *job), jobs))
    # merged in sub-stream order so the float sums do not depend on scheduling
    s1 = sum(r[0] for r in results)
    s2 = sum(r[1] for r in results)
    n = cfg.samples
    mean = s1 / n
    if n > 1:
        var = np.maximum(s2 - n * mean * mean, 0.0) / (n - 1)
    else:
        var = np.zeros_like(mean)
    return np.asarray(mean), np.sqrt(var / n)


def estimate_cf(cfg: McConfig, alpha: Sequence[float]) -> McEstimate:
    """Estimate E exp(i <alpha, X(t)>) from cos and sin sample means."""
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (cfg.params.m,):
        raise ValueError(f"alpha must have length m={cfg.params.m}")
    if not np.any(alpha):
        return McEstimate(1.0, 0.0, cfg.samples, cfg.seed, 0.0, 0.0)

    def stat(pos, _events):
        phase = pos @ alpha
        return np.column_stack((np.cos(phase), np.sin(phase)))

    mean, se = accumulate(cfg, stat)
    return McEstimate(float(mean[0]), float(se[0]), cfg.samples, cfg.seed, float(mean[1]), float(se[1]))


def estimate_mixed_moment(cfg: McConfig, q: Sequence[int]) -> McEstimate:
    """Estimate E prod_j X_j(t)^{q_j}."""
    q = tuple(int(k) for k in q)
    if len(q) != cfg.params.m or min(q) < 0:
        raise ValueError(f"q must be {cfg.params.m} nonnegative integers, got {q}")
    exps = np.array(q)

    def stat(pos, _events):
        return np.prod(pos**exps, axis=1)

    mean, se = accumulate(cfg, stat)
    return McEstimate(float(mean), float(se), cfg.samples, cfg.seed)


def estimate_no_switch_fraction(cfg: McConfig) -> McEstimate:
    """Fraction of trajectories without a direction change (on the sphere |x| = ct)."""
    mean, se = accumulate(cfg, lambda _pos, events: (events == 0).astype(float))
    return McEstimate(float(mean), float(se), cfg.samples, cfg.seed)


def estimate_direction_moments(m: int, samples: int, seed: int = 42) -> tuple[np.ndarray, np.ndarray]:
    """Means and standard errors of d_j and d_j^2 for uniform directions.

    Returns arrays of shape (2, m): row 0 for d_j, row 1 for d_j^2.
    """
    rng = make_rng(seed)
    s1 = np.zeros((2, m))
    s2 = np.zeros((2, m))
    done = 0
    while done < samples:
        size = min(CHUNK, samples - done)
        d = sample_directions(m, size, rng)
        vals = np.stack((d, d * d))
        s1 += vals.sum(axis=1)
        s2 += (vals * vals).sum(axis=1)
        done += size
    mean = s1 / samples
    var = np.maximum(s2 - samples * mean * mean, 0.0) / max(samples - 1, 1)
    return mean, np.sqrt(var / samples)


def mc_to_json(estimand: str, est: McEstimate) -> dict:
    if est.imag is None:
        mean, stderr = est.mean, est.stderr
    else:
        mean, stderr = [est.mean, est.imag], [est.stderr, est.imag_stderr]
    return {"estimand": estimand, "mean": mean, "stderr": stderr, "samples": est.samples, "seed": est.seed}


def z_score(value: float, target: float, stderr: float) -> float:
    if stderr == 0:
        return 0.0 if value == target else math.inf
    return abs(value - target) / stderr
