"""Maximum-likelihood detection from a quantized phase.

Two routes to the same decision:

* :func:`ml_detect_geometric` -- pick the symbol whose channel-rotated,
  SNR-scaled image lies closest to the bisecting ray of the observed cone.
* :func:`ml_detect_oracle` -- integrate the unit-variance complex Gaussian
  centred at each rotated symbol over the observed cone and take the
  argmax.  The radial part of the cone integral is done in closed form;
  the angular part by adaptive Gauss-Legendre quadrature.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._accel import njit
from .errors import ConfigError, DegenerateInput, QuadratureError
from .geometry import (
    ModulationSpec,
    QuantizerSpec,
    _check_index,
    arg,
    bisector_angle,
    build_constellation,
    fading_partition_index,
    region_of_attraction,
    wrap_phase,
)
from .quadrature import CONVERGED, integrate

DEFAULT_ORACLE_TOL = 1e-9
SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class DetectionContext:
    """Modulation, quantizer, channel realization and linear SNR seen by the detector."""

    mod: ModulationSpec
    quant: QuantizerSpec
    h: complex
    snr: float

    def __post_init__(self):
        if self.h == 0:
            raise DegenerateInput("channel h = 0 has no phase")
        if not self.snr >= 0 or not math.isfinite(self.snr):
            raise ConfigError(f"snr must be finite and >= 0, got {self.snr!r}")

    @classmethod
    def build(cls, M: int, n: int, h: complex, snr: float) -> "DetectionContext":
        return cls(build_constellation(M), QuantizerSpec(n), complex(h), float(snr))

    def rotated_points(self) -> np.ndarray:
        return math.sqrt(self.snr) * self.h * self.mod.points


@dataclass(frozen=True)
class OracleResult:
    symbol: int
    likelihoods: np.ndarray
    gap: float
    tie: bool


def ray_distance(z, psi):
    """Euclidean distance from ``z`` to the half-line ``{t e^{j psi}: t >= 0}``.

    ``|z| |sin d|`` when the angular offset ``d`` is within ``pi/2`` of the
    ray, otherwise ``|z|`` (the origin is the closest point).
    """
    z = np.asarray(z)
    mag = np.abs(z)
    delta = np.abs(wrap_phase(np.angle(z) - psi))
    out = np.where(delta <= 0.5 * math.pi, mag * np.abs(np.sin(delta)), mag)
    return float(out) if out.ndim == 0 else out


def ml_detect_geometric(ctx: DetectionContext, k: int) -> int:
    """Index of the symbol nearest the bisector of cone ``k``; ties go to the smallest index.

    At zero SNR every rotated symbol sits at the origin, so all distances
    tie and symbol 0 is returned.
    """
    _check_index(k, ctx.quant.region_count, "quantizer output k")
    if ctx.snr == 0:
        return 0
    psi = bisector_angle(k, ctx.quant)
    # every rotated symbol has the same radius, so compare unit-radius
    # distances built from exact angle sums; keeps the decision scale-free
    delta = np.abs(wrap_phase(np.asarray(ctx.mod.angles) + arg(ctx.h) - psi))
    dist = np.where(delta <= 0.5 * math.pi, np.sin(delta), 1.0)
    return int(np.argmin(dist))


@njit
def nearest_symbol(lam, k, M, n):
    """Vectorised geometric decision for channel phases ``lam`` and cone indices ``k``.

    With all rotated symbols at the same radius the ray distance is
    increasing in the angular offset, so the decision is the symbol whose
    rotated phase is closest to the bisector:
    ``floor((psi_k - lam + pi) * M / (2 pi)) mod M``.
    """
    out = np.empty(lam.shape[0], dtype=np.int64)
    regions = 2 ** n
    for i in range(lam.shape[0]):
        psi = math.pi * (2 * k[i] + 1) / regions - math.pi
        x = (psi - lam[i] + math.pi) * M / (2.0 * math.pi)
        out[i] = int(math.floor(x)) % M
    return out


# ---------------------------------------------------------------------------
# likelihood oracle


@njit
def _cone_density(phi, p):
    # angular density of P(mu + W in cone) after the radial integral;
    # p = [rho, alpha]
    rho = p[0]
    d = phi - p[1]
    c = rho * np.cos(d)
    s = rho * np.sin(d)
    out = np.empty(phi.shape[0])
    base = 0.5 * math.exp(-rho * rho)
    for i in range(phi.shape[0]):
        out[i] = base + 0.5 * SQRT_PI * c[i] * math.exp(-s[i] * s[i]) * math.erfc(-c[i])
    return out / math.pi


@njit
def cone_probabilities(rho, alpha, lower, width, rtol, max_depth):
    """``P(mu_i + W in [lower, lower + width))`` for means ``rho_i e^{j alpha_i}``.

    Returns the probabilities and the worst quadrature status.
    """
    out = np.empty(rho.shape[0])
    p = np.empty(2)
    worst = 0
    for i in range(rho.shape[0]):
        p[0] = rho[i]
        p[1] = alpha[i]
        v, e, s = integrate(_cone_density, lower, lower + width, p, rtol, 0.0, max_depth, np.empty(0))
        out[i] = v
        if s > worst:
            worst = s
    return out, worst


def region_probabilities(ctx: DetectionContext, tol: float = DEFAULT_ORACLE_TOL) -> np.ndarray:
    """Matrix ``P[k, i] = P(Q(Y) = k | X = x_i, H = h)`` over all cones."""
    z = ctx.rotated_points()
    rho = np.abs(z)
    alpha = np.angle(z)
    width = ctx.quant.sector_width
    out = np.empty((ctx.quant.region_count, ctx.mod.M))
    for k in range(ctx.quant.region_count):
        probs, status = cone_probabilities(rho, alpha, -math.pi + k * width, width, tol, 60)
        if status != CONVERGED:
            raise QuadratureError(f"cone probability for k={k} did not reach tol={tol}")
        out[k] = probs
    return out


def ml_detect_oracle(ctx: DetectionContext, k: int, tol: float = DEFAULT_ORACLE_TOL) -> OracleResult:
    """Brute-force ML decision by integrating each symbol's likelihood over cone ``k``.

    ``tie`` is set when the two largest likelihoods differ by no more than
    ``10 * tol``; ``symbol`` is then the smallest index among the maximisers.
    """
    if not tol > 0:
        raise ConfigError("tol must be positive")
    _check_index(k, ctx.quant.region_count, "quantizer output k")
    z = ctx.rotated_points()
    width = ctx.quant.sector_width
    probs, status = cone_probabilities(np.abs(z), np.angle(z), -math.pi + k * width, width, tol, 60)
    if status != CONVERGED:
        raise QuadratureError(f"cone probability did not reach tol={tol}")
    order = np.argsort(-probs, kind="stable")
    gap = float(probs[order[0]] - probs[order[1]]) if probs.size > 1 else math.inf
    tie = gap <= 10.0 * tol
    if tie:
        top = probs[order[0]]
        symbol = int(np.flatnonzero(probs >= top - 10.0 * tol)[0])
    else:
        symbol = int(order[0])
    return OracleResult(symbol, probs, gap, tie)


def decision_table(M: int, n: int, phases) -> list:
    """Decision map for each channel phase: rows of ``(phase, cell, decisions)``.

    ``decisions[k]`` is the symbol chosen for quantizer output ``k``; ``cell``
    is the channel-phase partition index of that phase.
    """
    mod = build_constellation(M)
    quant = QuantizerSpec(n)
    rows = []
    for lam in np.atleast_1d(phases):
        h = complex(math.cos(lam), math.sin(lam))
        ctx = DetectionContext(mod, quant, h, 1.0)
        decisions = [ml_detect_geometric(ctx, k) for k in range(quant.region_count)]
        rows.append((float(lam), fading_partition_index(h, n), decisions))
    return rows


def attraction_symbol(phase: float, lam: float, M: int, n: int) -> int:
    """Symbol whose region of attraction (for channel phase ``lam``) contains ``phase``."""
    cell = fading_partition_index(complex(math.cos(lam), math.sin(lam)), n)
    for i in range(M):
        if region_of_attraction(i, cell, M, n).contains(phase):
            return i
    raise AssertionError("regions of attraction do not cover the circle")  # pragma: no cover
