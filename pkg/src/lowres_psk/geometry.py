"""M-PSK constellations, phase-quantizer cones and decision-region geometry.

Phases follow the ``[-pi, pi)`` convention throughout: ``arg`` maps the
``+pi`` that ``atan2`` returns on the negative real axis to ``-pi``.
Cone regions are half-open, so a point on a boundary belongs to the
higher-indexed region.
"""

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .errors import ConfigError, DegenerateInput

TWO_PI = 2.0 * math.pi

ArrayLike = Union[complex, float, np.ndarray]


def _is_power_of_two(x: int) -> bool:
    return x >= 1 and (x & (x - 1)) == 0


def wrap_phase(phi):
    """Wrap angle(s) into ``[-pi, pi)``."""
    out = np.mod(np.asarray(phi, dtype=float) + math.pi, TWO_PI) - math.pi
    # np.mod can return exactly 2*pi for tiny negative inputs
    out = np.where(out >= math.pi, out - TWO_PI, out)
    if np.ndim(out) == 0:
        return float(out)
    return out


def arg(z):
    """Principal argument in ``[-pi, pi)``."""
    a = np.arctan2(np.imag(z), np.real(z))
    a = np.where(a >= math.pi, -math.pi, a)
    if np.ndim(a) == 0:
        return float(a)
    return a


@dataclass(frozen=True)
class ModulationSpec:
    """M-PSK constellation ``x_i = exp(j*pi*((2i+1)/M - 1))``."""

    M: int
    angles: Tuple[float, ...]

    def __post_init__(self):
        if not isinstance(self.M, (int, np.integer)) or not _is_power_of_two(int(self.M)) or self.M < 2:
            raise ConfigError(f"M must be a power of 2 with M >= 2, got {self.M!r}")
        if len(self.angles) != self.M:
            raise ConfigError("angles must have exactly M entries")

    @property
    def bits(self) -> int:
        return int(self.M).bit_length() - 1

    @property
    def spacing(self) -> float:
        return TWO_PI / self.M

    @property
    def points(self) -> np.ndarray:
        return np.exp(1j * np.asarray(self.angles))


@dataclass(frozen=True)
class QuantizerSpec:
    """n-bit phase quantizer with ``2**n`` equal-angle cones."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ConfigError(f"n must be an integer >= 1, got {self.n!r}")

    @property
    def region_count(self) -> int:
        return 1 << int(self.n)

    @property
    def sector_width(self) -> float:
        return TWO_PI / self.region_count

    def region(self, k: int) -> "ConeRegion":
        _check_index(k, self.region_count, "region index k")
        return ConeRegion(-math.pi + k * self.sector_width, self.sector_width)


@dataclass(frozen=True)
class ConeRegion:
    """Half-open angular sector ``[lower, lower + width)`` on the circle."""

    lower_angle: float
    width: float

    def __post_init__(self):
        if not 0.0 < self.width <= TWO_PI:
            raise ConfigError(f"cone width must lie in (0, 2*pi], got {self.width}")
        object.__setattr__(self, "lower_angle", wrap_phase(self.lower_angle))

    @property
    def upper_angle(self) -> float:
        return self.lower_angle + self.width

    @property
    def center(self) -> float:
        return wrap_phase(self.lower_angle + 0.5 * self.width)

    def contains(self, phase):
        """Membership test for phase(s); invariant under ``phase + 2*pi*j``."""
        offset = np.mod(np.asarray(phase, dtype=float) - self.lower_angle, TWO_PI)
        inside = offset < self.width
        if np.ndim(inside) == 0:
            return bool(inside)
        return inside

    def contains_point(self, z) -> bool:
        if z == 0:
            raise DegenerateInput("the origin has no phase")
        return self.contains(arg(z))

    def rotated(self, angle: float) -> "ConeRegion":
        return ConeRegion(self.lower_angle + angle, self.width)


def _check_index(k, size, what):
    if not isinstance(k, (int, np.integer)) or not 0 <= k < size:
        raise IndexError(f"{what} must lie in [0, {size - 1}], got {k!r}")


def build_constellation(M: int) -> ModulationSpec:
    """Return the M-PSK constellation with angles ``pi*((2i+1)/M - 1)``.

    >>> build_constellation(4).angles[2] == math.pi / 4
    True
    """
    if not isinstance(M, (int, np.integer)) or M < 2 or not _is_power_of_two(int(M)):
        raise ConfigError(f"M must be a power of 2 with M >= 2, got {M!r}")
    M = int(M)
    angles = tuple(math.pi * (2 * i + 1) / M - math.pi for i in range(M))
    return ModulationSpec(M, angles)


def quantize(y: ArrayLike, q: Union[QuantizerSpec, int]):
    """Index of the quantizer cone containing ``y``.

    ``k = floor((Arg(y) + pi) / (2*pi / 2**n))``.  Works elementwise on
    arrays; raises :class:`DegenerateInput` if any sample is exactly zero.
    """
    if not isinstance(q, QuantizerSpec):
        q = QuantizerSpec(q)
    y = np.asarray(y)
    if np.any(y == 0):
        raise DegenerateInput("quantize: the zero sample has no phase")
    count = q.region_count
    k = np.floor((arg(y) + math.pi) / q.sector_width).astype(np.int64)
    k = np.minimum(k, count - 1)
    if k.ndim == 0:
        return int(k)
    return k


def bisector_angle(k: int, q: Union[QuantizerSpec, int]) -> float:
    """Phase of the ray bisecting cone ``k``: ``pi*(2k+1)/2**n - pi``."""
    if not isinstance(q, QuantizerSpec):
        q = QuantizerSpec(q)
    _check_index(k, q.region_count, "region index k")
    return math.pi * (2 * k + 1) / q.region_count - math.pi


def fading_partition_index(h, n: int):
    """Index of the channel-phase cell containing ``h``.

    Cell ``k`` collects ``(2k-1)*pi/2**n <= Arg(h) + pi < (2k+1)*pi/2**n``;
    cell 0 wraps around the negative real axis and cell ``2**(n-1)`` is
    centred on ``Arg(h) = 0``.
    """
    q = QuantizerSpec(n)
    h = np.asarray(h)
    if np.any(h == 0):
        raise DegenerateInput("fading_partition_index: zero channel has no phase")
    count = q.region_count
    k = np.floor(((arg(h) + math.pi) * count / math.pi + 1.0) / 2.0).astype(np.int64) % count
    if k.ndim == 0:
        return int(k)
    return k


def partition_cell(k: int, n: int) -> ConeRegion:
    """The channel-phase cell indexed by :func:`fading_partition_index`."""
    q = QuantizerSpec(n)
    _check_index(k, q.region_count, "partition index k")
    half = math.pi / q.region_count
    return ConeRegion((2 * k - 1) * half - math.pi, 2 * half)


def region_of_attraction(i: int, k: int, M: int, n: int) -> ConeRegion:
    """Decision cone of symbol ``i`` when the channel lies in cell ``k``.

    The cone ``[Arg(x_i) - pi/M, Arg(x_i) + pi/M)`` rotated by
    ``(k - 2**(n-1)) * 2*pi / 2**n``.
    """
    mod = build_constellation(M)
    q = QuantizerSpec(n)
    _check_index(i, M, "symbol index i")
    _check_index(k, q.region_count, "partition index k")
    rotation = (k - q.region_count // 2) * q.sector_width
    return ConeRegion(mod.angles[i] - math.pi / M + rotation, TWO_PI / M)
