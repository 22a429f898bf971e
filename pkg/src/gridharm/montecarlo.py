"""Simple-random-walk exit sampler: a solver-free oracle for harmonic measure.

The probability that a simple random walk from an interior point exits a
finite domain through a boundary subset equals the discrete harmonic function
with indicator boundary data at the start point, so walk tallies cross-check
both the direct solver and the spectral measure expansion without sharing any
code with them.

Randomness is counter-based: sample i draws its step-s direction from
splitmix64(key_i + s * gamma) with key_i = splitmix64(seed + i * gamma'), so
estimates depend only on (seed, samples), not on batching or worker count.
Directions are picked by an exact 64-bit multiply-high map onto 0..2m-1
(rejection-free; residual non-uniformity 2m/2^64 per draw).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .lattice import GridDomain, Point

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_GAMMA2 = np.uint64(0xD1B54A32D192ED03)
_MASK32 = np.uint64(0xFFFFFFFF)
_U64 = 1 << 64


def _mix64(x: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer, vectorized over uint64 arrays."""
    x = x.copy()
    x ^= x >> np.uint64(30)
    x *= np.uint64(0xBF58476D1CE4E5B9)
    x ^= x >> np.uint64(27)
    x *= np.uint64(0x94D049BB133111EB)
    x ^= x >> np.uint64(31)
    return x


def _mulhi_small(h: np.ndarray, c: int) -> np.ndarray:
    """floor(h * c / 2^64) for c < 2^32: exact two-limb multiply-high."""
    cc = np.uint64(c)
    hi = h >> np.uint64(32)
    lo = h & _MASK32
    return (hi * cc + ((lo * cc) >> np.uint64(32))) >> np.uint64(32)


@dataclass(frozen=True)
class WalkConfig:
    """Sampling parameters; max_steps defaults to 100 x (lattice diameter)^2."""

    seed: int
    samples: int
    max_steps: int | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.seed < _U64:
            raise ValueError("seed must fit in 64 bits")
        if self.samples < 100:
            raise ValueError(f"at least 100 samples required, got {self.samples}")
        if self.max_steps is not None and self.max_steps < 1:
            raise ValueError("max_steps must be positive")


@dataclass(frozen=True)
class ExitEstimate:
    """Exit-probability estimate with its binomial standard error.

    Walks that hit max_steps are never silently dropped: they count as
    non-exits in the estimate and are reported via stop_fraction.
    """

    estimate: float
    stderr: float
    stop_fraction: float
    hits: int
    stopped: int
    samples: int
    max_steps: int


def _default_max_steps(domain: GridDomain) -> int:
    pts = domain.points
    diam = sum(
        max(p[a] for p in pts) - min(p[a] for p in pts) for a in range(domain.mesh.dimension)
    )
    return 100 * max(diam, 1) ** 2


def estimate_exit_probability(
    domain: GridDomain, start: Point, target: Iterable[Point], cfg: WalkConfig
) -> ExitEstimate:
    """Probability that the walk from `start` exits through `target`, with stderr."""
    start = tuple(start)
    if not domain.is_interior(start):
        raise ValueError(f"start point {start} is not interior")
    target_set = {tuple(p) for p in target}
    bad = [p for p in target_set if not domain.is_boundary(p)]
    if bad:
        raise ValueError(f"target contains non-boundary points, e.g. {bad[0]}")

    m = domain.mesh.dimension
    pts = domain.points
    mins = [min(p[a] for p in pts) for a in range(m)]
    dims = [max(p[a] for p in pts) - mins[a] + 1 for a in range(m)]
    strides = np.ones(m, dtype=np.int64)
    for a in range(m - 2, -1, -1):
        strides[a] = strides[a + 1] * dims[a + 1]

    def encode(p: Point) -> int:
        return int(sum((p[a] - mins[a]) * strides[a] for a in range(m)))

    cls = np.zeros(int(np.prod(dims)), dtype=np.int8)
    for p in domain.interior:
        cls[encode(p)] = 1
    for p in domain.boundary:
        cls[encode(p)] = 3 if p in target_set else 2

    # direction -> linear-index move, canonical order (axis ascending, minus, plus)
    moves = np.empty(2 * m, dtype=np.int64)
    for a in range(m):
        moves[2 * a] = -strides[a]
        moves[2 * a + 1] = strides[a]

    max_steps = cfg.max_steps if cfg.max_steps is not None else _default_max_steps(domain)
    keys = _mix64(np.uint64(cfg.seed % _U64) + np.arange(1, cfg.samples + 1, dtype=np.uint64) * _GAMMA)
    pos = np.full(cfg.samples, encode(start), dtype=np.int64)
    active = np.arange(cfg.samples)
    hits = 0

    for s in range(max_steps):
        if active.size == 0:
            break
        h = _mix64(keys[active] + np.uint64((s * int(_GAMMA2)) % _U64))
        dirs = _mulhi_small(h, 2 * m).astype(np.int64)
        pos[active] += moves[dirs]
        landed = cls[pos[active]]
        hits += int(np.count_nonzero(landed == 3))
        active = active[landed == 1]

    stopped = int(active.size)
    estimate = hits / cfg.samples
    stderr = float(np.sqrt(estimate * (1.0 - estimate) / cfg.samples))
    return ExitEstimate(
        estimate=estimate,
        stderr=stderr,
        stop_fraction=stopped / cfg.samples,
        hits=hits,
        stopped=stopped,
        samples=cfg.samples,
        max_steps=max_steps,
    )
