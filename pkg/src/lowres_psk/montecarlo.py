"""Seeded, chunked Monte Carlo estimation of the average SEP.

Randomness is laid out in fixed blocks of ``STREAM_BLOCK`` trials; block
``b`` draws from ``RngStream(seed, stream_id=b)``.  A chunk is a run of
consecutive trials covering one or more blocks, and chunk results are
aggregated by summing ``(errors, trials)``.  The estimate therefore depends
only on the seed and the total trial count, not on ``chunk_size`` or on
the order chunks are processed in.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._accel import USING_NUMBA, njit
from .analytic import SepQuery, linear_to_db
from .channel import FadingSpec, RngStream, sample_fading, sample_noise
from .detector import DetectionContext, ml_detect_geometric
from .errors import ConfigError, DegenerateInput
from .geometry import QuantizerSpec, build_constellation, quantize
from .results import SepCurve

STREAM_BLOCK = 1 << 14
DEFAULT_MAX_TRIALS = 10 ** 8
DEFAULT_REL_CI = 0.02
DEFAULT_CHUNK = 1 << 18


@dataclass(frozen=True)
class SimPlan:
    """What to simulate and when to stop.

    Stops once ``stderr / p_hat <= target_rel_ci`` (checked after each
    chunk, only when at least one error was seen) or when ``max_trials``
    trials have run.
    """

    query: SepQuery
    max_trials: int = DEFAULT_MAX_TRIALS
    target_rel_ci: float = DEFAULT_REL_CI
    chunk_size: int = DEFAULT_CHUNK
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.query, SepQuery):
            raise ConfigError("query must be a SepQuery")
        chunk = min(self.chunk_size, self.max_trials) if self.chunk_size == DEFAULT_CHUNK else self.chunk_size
        object.__setattr__(self, "chunk_size", int(chunk))
        object.__setattr__(self, "max_trials", int(self.max_trials))
        if not self.max_trials >= self.chunk_size >= 1:
            raise ConfigError(f"need max_trials >= chunk_size >= 1, got {self.max_trials} and {self.chunk_size}")
        if not self.target_rel_ci > 0:
            raise ConfigError("target_rel_ci must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit non-negative integer")

    @classmethod
    def fixed(cls, query: SepQuery, trials: int, seed: int = 0, chunk_size: Optional[int] = None) -> "SimPlan":
        """Plan that always runs exactly ``trials`` trials."""
        return cls(query, trials, 1e-300, chunk_size or min(DEFAULT_CHUNK, trials), seed)


@dataclass(frozen=True)
class SepEstimate:
    p_hat: float
    stderr: float
    trials: int
    errors: int
    seed: int
    chunks: int
    chunk_size: int
    target_met: bool

    @property
    def rel_ci(self) -> float:
        return self.stderr / self.p_hat if self.p_hat > 0 else math.inf

    def ci95(self):
        half = 1.959963984540054 * self.stderr
        return max(0.0, self.p_hat - half), min(1.0, self.p_hat + half)


def _estimate(errors: int, trials: int, plan: SimPlan, chunks: int, met: bool) -> SepEstimate:
    p = errors / trials
    return SepEstimate(p, math.sqrt(p * (1.0 - p) / trials), trials, errors, plan.seed, chunks, plan.chunk_size, met)


def run_trial(query: SepQuery, rng: RngStream) -> bool:
    """One transmission: draw X, H, W, quantize Y and detect; True on a symbol error."""
    mod = build_constellation(query.M)
    i = int(rng.generator.integers(0, query.M))
    h = complex(sample_fading(FadingSpec(query.m), rng))
    w = complex(sample_noise(rng))
    y = math.sqrt(query.snr) * h * mod.points[i] + w
    k = quantize(y, query.n)
    return ml_detect_geometric(DetectionContext(mod, QuantizerSpec(query.n), h, query.snr), k) != i


# ---------------------------------------------------------------------------
# error-count kernels


@njit
def _count_errors_loop(sym, h, w, sqrt_snr, M, n):
    # returns -1 if a received sample is exactly zero
    regions = 2 ** n
    width = 2.0 * math.pi / regions
    cos_tab = np.empty(M)
    sin_tab = np.empty(M)
    for i in range(M):
        ang = math.pi * (2 * i + 1) / M - math.pi
        cos_tab[i] = math.cos(ang)
        sin_tab[i] = math.sin(ang)
    errors = 0
    for t in range(sym.shape[0]):
        xr = cos_tab[sym[t]]
        xi = sin_tab[sym[t]]
        hr = h[t].real
        hi = h[t].imag
        yr = sqrt_snr * (hr * xr - hi * xi) + w[t].real
        yi = sqrt_snr * (hr * xi + hi * xr) + w[t].imag
        if yr == 0.0 and yi == 0.0:
            return -1
        a = math.atan2(yi, yr)
        if a >= math.pi:
            a = -math.pi
        k = int(math.floor((a + math.pi) / width))
        if k >= regions:
            k = regions - 1
        psi = math.pi * (2 * k + 1) / regions - math.pi
        lam = math.atan2(hi, hr)
        dec = int(math.floor((psi - lam + math.pi) * M / (2.0 * math.pi))) % M
        if dec != sym[t]:
            errors += 1
    return errors


def _count_errors_vec(sym, h, w, sqrt_snr, M, n):
    regions = 2 ** n
    width = 2.0 * math.pi / regions
    x = np.exp(1j * (np.pi * (2 * sym + 1) / M - np.pi))
    y = sqrt_snr * h * x + w
    if np.any(y == 0):
        return -1
    a = np.arctan2(y.imag, y.real)
    a = np.where(a >= np.pi, -np.pi, a)
    k = np.minimum(np.floor((a + np.pi) / width).astype(np.int64), regions - 1)
    psi = np.pi * (2 * k + 1) / regions - np.pi
    lam = np.arctan2(h.imag, h.real)
    dec = np.floor((psi - lam + np.pi) * M / (2.0 * np.pi)).astype(np.int64) % M
    return int(np.count_nonzero(dec != sym))


count_errors = _count_errors_loop if USING_NUMBA else _count_errors_vec
count_errors.__doc__ = "Number of symbol errors over the given draws (``-1`` if some ``y == 0``)."


def draw_block(query: SepQuery, seed: int, block: int):
    """Symbols, fading and noise for trial block ``block`` of ``seed``."""
    rng = RngStream(seed, block)
    sym = rng.generator.integers(0, query.M, STREAM_BLOCK)
    h = sample_fading(FadingSpec(query.m), rng, STREAM_BLOCK)
    w = sample_noise(rng, STREAM_BLOCK)
    return sym, h, w


def run_range(query: SepQuery, seed: int, start: int, stop: int) -> int:
    """Error count over global trial indices ``[start, stop)``."""
    errors = 0
    sqrt_snr = math.sqrt(query.snr)
    first, last = start // STREAM_BLOCK, (stop - 1) // STREAM_BLOCK
    for b in range(first, last + 1):
        sym, h, w = draw_block(query, seed, b)
        lo = max(start - b * STREAM_BLOCK, 0)
        hi = min(stop - b * STREAM_BLOCK, STREAM_BLOCK)
        e = count_errors(sym[lo:hi], h[lo:hi], w[lo:hi], sqrt_snr, query.M, query.n)
        if e < 0:
            raise DegenerateInput("received sample exactly at the origin")
        errors += e
    return errors


def simulate_sep(plan: SimPlan) -> SepEstimate:
    """Run chunks until the relative CI target is met or ``max_trials`` is used up."""
    errors = trials = chunks = 0
    while trials < plan.max_trials:
        stop = min(trials + plan.chunk_size, plan.max_trials)
        errors += run_range(plan.query, plan.seed, trials, stop)
        trials = stop
        chunks += 1
        if errors > 0:
            p = errors / trials
            if math.sqrt(p * (1.0 - p) / trials) <= plan.target_rel_ci * p:
                return _estimate(errors, trials, plan, chunks, True)
    return _estimate(errors, trials, plan, chunks, False)


def sweep_sep(plans: Sequence[SimPlan]) -> SepCurve:
    """Simulate each plan and collect the results as a curve ordered by SNR."""
    plans = sorted(plans, key=lambda p: p.query.snr)
    if not plans:
        raise ConfigError("sweep needs at least one plan")
    q0 = plans[0].query
    if any((p.query.M, p.query.n, p.query.m) != (q0.M, q0.n, q0.m) for p in plans):
        raise ConfigError("all plans in a sweep must share (M, n, m)")
    seeds = {p.seed for p in plans}
    estimates = [simulate_sep(p) for p in plans]
    with np.errstate(divide="ignore"):
        snr_db = [float(linear_to_db(p.query.snr)) for p in plans]
    return SepCurve(q0.M, q0.n, q0.m, snr_db,
                    [e.p_hat for e in estimates], [e.stderr for e in estimates],
                    "montecarlo", seeds.pop() if len(seeds) == 1 else None,
                    [e.trials for e in estimates])
