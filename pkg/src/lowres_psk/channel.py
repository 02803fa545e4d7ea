"""Nakagami-m fading and complex AWGN with reproducible substreams.

Random streams use numpy's counter-based ``Philox`` bit generator keyed by
``SeedSequence(seed, spawn_key=(stream_id,))``.  The same ``(seed,
stream_id)`` pair reproduces the same draws; different ``stream_id`` values
give independent streams.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .errors import ConfigError, DomainError

RNG_ALGORITHM = "Philox4x64 keyed by SeedSequence(seed, spawn_key=(stream_id,))"


@dataclass(frozen=True)
class FadingSpec:
    """Circularly symmetric fading with Nakagami-m magnitude, unit power."""

    m: float
    omega: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.m, (int, float, np.floating, np.integer)) and math.isfinite(self.m)):
            raise ConfigError(f"Nakagami shape m must be a finite number, got {self.m!r}")
        if self.m < 0.5:
            raise ConfigError(f"Nakagami shape m must be >= 0.5, got {self.m}")
        if self.omega != 1.0:
            raise ConfigError("only unit-power fading (omega = 1) is supported")


class RngStream:
    """One independent random substream, owned by a single worker."""

    def __init__(self, seed: int, stream_id: int = 0):
        if seed < 0 or stream_id < 0:
            raise ConfigError("seed and stream_id must be non-negative")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.Philox(ss))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def sample_fading(spec: FadingSpec, rng: RngStream, size: Optional[int] = None):
    """Draw fading coefficient(s) ``h = sqrt(G) * exp(j*U)``.

    ``G ~ Gamma(m, 1/m)`` so ``|h|`` is Nakagami-m with unit power, and
    ``U ~ Uniform[-pi, pi)`` independent of ``G``.
    """
    if not isinstance(spec, FadingSpec):
        spec = FadingSpec(spec)
    g = rng.generator
    power = g.gamma(spec.m, 1.0 / spec.m, size)
    phase = g.uniform(-math.pi, math.pi, size)
    return np.sqrt(power) * np.exp(1j * phase)


def sample_noise(rng: RngStream, size: Optional[int] = None):
    """Draw CN(0, 1) noise: independent N(0, 1/2) real and imaginary parts."""
    g = rng.generator
    scale = math.sqrt(0.5)
    re = g.normal(0.0, scale, size)
    im = g.normal(0.0, scale, size)
    return re + 1j * im


def nakagami_magnitude_pdf(r, m: float):
    """Density of the Nakagami-m magnitude with unit spread.

    ``f(r) = 2 m^m / Gamma(m) * r^(2m-1) * exp(-m r^2)`` for ``r >= 0``.
    """
    FadingSpec(m)
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("Nakagami magnitude must be non-negative")
    log_pdf = math.log(2.0) + m * math.log(m) - gammaln(m) - m * r * r
    with np.errstate(divide="ignore", invalid="ignore"):
        power_term = np.where(r > 0, (2.0 * m - 1.0) * np.log(r), 0.0 if m == 0.5 else -np.inf)
    out = np.exp(log_pdf + power_term)
    if out.ndim == 0:
        return float(out)
    return out
