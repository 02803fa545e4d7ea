"""Average SEP of M-PSK with n-bit phase quantization over Nakagami-m fading.

Covers the universal error floor, the conditional SEP for a fixed channel,
the general SEP as a sum of four fading-averaged integrals (``p1 + p2 -
p3 + p4`` for M >= 4, ``p2`` alone for BPSK), the ``p1 + p2/2`` and
``p1 + 2*p2`` bounds, the QPSK/Rayleigh specialisations with their
high-SNR asymptotes and quantization penalties, and diversity-order
prediction and fitting.

All integrals are evaluated by nested adaptive Gauss-Legendre quadrature
(:mod:`lowres_psk.quadrature`); the integrand kernels below are compiled
with numba unless disabled.
"""

import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np
from scipy.special import erfc, gammaln

from ._accel import USING_NUMBA, njit
from .errors import ConfigError, DomainError, InsufficientData, QuadratureError
from .geometry import _is_power_of_two
from .quadrature import CONVERGED, graded_breaks, integrate, left_graded_breaks

HALF_PI = 0.5 * math.pi
SQRT2 = math.sqrt(2.0)
INV_SQRT2 = 1.0 / SQRT2

# magnitude cut-off: exp(-m r^2) < exp(-40) beyond sqrt(40/m)
R_MAX_EXPONENT = 40.0


@dataclass(frozen=True)
class SepQuery:
    """Arguments of the average SEP: order M, bits n, Nakagami shape m, linear SNR."""

    M: int
    n: int
    m: float
    snr: float

    def __post_init__(self):
        if not isinstance(self.M, (int, np.integer)) or self.M < 2 or not _is_power_of_two(int(self.M)):
            raise ConfigError(f"M must be a power of 2 with M >= 2, got {self.M!r}")
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ConfigError(f"n must be an integer >= 1, got {self.n!r}")
        if not math.isfinite(self.m) or self.m < 0.5:
            raise ConfigError(f"Nakagami shape m must be >= 0.5, got {self.m!r}")
        if not math.isfinite(self.snr) or self.snr < 0:
            raise ConfigError(f"SNR must be finite and >= 0, got {self.snr!r}")

    @property
    def log2M(self) -> int:
        return int(self.M).bit_length() - 1


@dataclass(frozen=True)
class QuadratureSettings:
    """Tolerances for the adaptive integrals.

    ``rel_tol`` applies to the double integrals, ``rel_tol_3d`` to the
    triple ones.  Nested inner integrals run ten times tighter than the
    level that calls them.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 0.0
    max_depth: int = 50
    trunc_sigma: float = 10.0
    rel_tol_3d: float = 1e-7

    def __post_init__(self):
        if not self.rel_tol > 0 or not self.rel_tol_3d > 0:
            raise ConfigError("relative tolerances must be positive")
        if self.abs_tol < 0:
            raise ConfigError("abs_tol must be non-negative")
        if self.trunc_sigma < 6:
            raise ConfigError("trunc_sigma must be >= 6")
        if self.max_depth < 1:
            raise ConfigError("max_depth must be >= 1")


DEFAULT_SETTINGS = QuadratureSettings()


@dataclass(frozen=True)
class SepComponents:
    p1: float
    p2: float
    p3: float
    p4: float
    error: float = 0.0

    def total(self, M: int) -> float:
        if M == 2:
            return self.p2
        return self.p1 + self.p2 - self.p3 + self.p4

    def __iter__(self):
        return iter((self.p1, self.p2, self.p3, self.p4))


@dataclass(frozen=True)
class DvoFit:
    """Least-squares decay exponent of ``-log10 p`` against ``log10 SNR``."""

    slope: float
    intercept: float
    snr_window: Tuple[float, float]
    residual: float
    points: int = field(default=0)


# ---------------------------------------------------------------------------
# Q-function on arrays: a loop over math.erfc when compiled, scipy otherwise.

if USING_NUMBA:

    @njit
    def _qfunc(x):
        out = np.empty(x.shape[0])
        for i in range(x.shape[0]):
            out[i] = 0.5 * math.erfc(x[i] * INV_SQRT2)
        return out

else:

    def _qfunc(x):
        return 0.5 * erfc(x * INV_SQRT2)


def qfunc(x):
    """Gaussian tail probability ``Q(x) = P(N(0,1) > x)``."""
    out = 0.5 * erfc(np.asarray(x, dtype=float) * INV_SQRT2)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# integrand kernels.  ``p[-1]`` of every nested kernel's parameter vector is a
# status slot the kernel raises when an inner integral fails to converge.


@njit
def _craig_beta(beta, p):
    # (A / sin^2 b + m)^(-m), written to stay finite as sin b -> 0
    s2 = np.sin(beta) ** 2
    return (s2 / (p[0] + p[1] * s2)) ** p[1]


@njit
def _p12_theta(theta, p):
    # p = [snr, m, use_cos, rtol, max_depth, status]
    out = np.empty(theta.shape[0])
    q = np.empty(2)
    q[1] = p[1]
    nob = np.empty(0)
    for i in range(theta.shape[0]):
        c = math.cos(theta[i]) if p[2] > 0.5 else math.sin(theta[i])
        q[0] = p[0] * c * c
        v, e, s = integrate(_craig_beta, 0.0, HALF_PI, q, p[3], 0.0, int(p[4]), nob)
        if s > p[5]:
            p[5] = s
        out[i] = v
    return out


@njit
def _p3_gamma(gam, p):
    # (B / sin^2 g + C)^(-m), p = [B, C, m]
    s2 = np.sin(gam) ** 2
    return (s2 / (p[0] + p[1] * s2)) ** p[2]


@njit
def _p3_beta(beta, p):
    # p = [A, B, m, rtol, max_depth, status]
    out = np.empty(beta.shape[0])
    q = np.empty(3)
    q[0] = p[1]
    q[2] = p[2]
    nob = np.empty(0)
    for i in range(beta.shape[0]):
        s2 = math.sin(beta[i]) ** 2
        q[1] = p[0] / s2 + p[2]
        v, e, s = integrate(_p3_gamma, 0.0, HALF_PI, q, p[3], 0.0, int(p[4]), nob)
        if s > p[5]:
            p[5] = s
        out[i] = v
    return out


@njit
def _p3_theta(theta, p):
    # p = [snr, m, rtol, max_depth, status]
    out = np.empty(theta.shape[0])
    q = np.zeros(6)
    q[2] = p[1]
    q[3] = 0.1 * p[2]
    q[4] = p[3]
    nob = np.empty(0)
    for i in range(theta.shape[0]):
        c = math.cos(theta[i])
        s = math.sin(theta[i])
        q[0] = p[0] * c * c
        q[1] = p[0] * s * s
        q[5] = 0.0
        v, e, st = integrate(_p3_beta, 0.0, HALF_PI, q, p[2], 0.0, int(p[3]), nob)
        st = max(st, int(q[5]))
        if st > p[4]:
            p[4] = st
        out[i] = v
    return out


@njit
def _edge_w(w, p):
    # Q(alpha + slope * w) * exp(-w^2), p = [alpha, slope]
    return _qfunc(p[0] + p[1] * w) * np.exp(-w * w)


@njit
def _edge_w_integral(a, theta, phi, trunc, rtol, max_depth):
    """Integral of Q(sqrt2*a*sec(phi)*sin(phi-theta) + sqrt2*w*tan(phi)) e^{-w^2}
    over w >= -a*cos(theta), truncated where e^{-w^2} is negligible."""
    q = np.empty(2)
    q[0] = SQRT2 * a * math.sin(phi - theta) / math.cos(phi)
    q[1] = SQRT2 * math.tan(phi)
    w0 = -a * math.cos(theta)
    cut = trunc * INV_SQRT2
    lo = max(w0, -cut)
    hi = max(w0, 0.0) + cut
    return integrate(_edge_w, lo, hi, q, rtol, 0.0, max_depth, np.empty(0))


@njit
def _p4_r(r, p):
    # p = [snr, m, theta, phi, trunc, rtol, max_depth, status]
    out = np.empty(r.shape[0])
    root = math.sqrt(p[0])
    m = p[1]
    for i in range(r.shape[0]):
        v, e, s = _edge_w_integral(root * r[i], p[2], p[3], p[4], p[5], int(p[6]))
        if s > p[7]:
            p[7] = s
        out[i] = v * r[i] ** (2.0 * m - 1.0) * math.exp(-m * r[i] * r[i])
    return out


@njit
def _p4_theta(theta, p):
    # p = [snr, m, phi, trunc, r_max, rtol, max_depth, status]
    out = np.empty(theta.shape[0])
    q = np.zeros(8)
    q[0] = p[0]
    q[1] = p[1]
    q[3] = p[2]
    q[4] = p[3]
    q[5] = 0.01 * p[5]
    q[6] = p[6]
    if p[0] > 0:
        breaks = left_graded_breaks(0.0, p[4], 0.25 / math.sqrt(p[0]), 12)
    else:
        breaks = np.empty(0)
    for i in range(theta.shape[0]):
        q[2] = theta[i]
        q[7] = 0.0
        v, e, st = integrate(_p4_r, 0.0, p[4], q, 0.1 * p[5], 0.0, int(p[6]), breaks)
        st = max(st, int(q[7]))
        if st > p[7]:
            p[7] = st
        out[i] = v
    return out


@njit
def _q26_first(beta, p):
    # p = [snr, sin(x), cos(x)] with x = pi / 2^(n-1)
    s2 = np.sin(beta) ** 2
    root = np.sqrt(p[0] + s2)
    k = 2.0 * np.sin(beta) * root / (p[0] + 2.0 * s2)
    return np.sin(beta) / root * np.arctan2(k * p[1], p[2])


@njit
def _q26_second_gamma(gam, p):
    # p = [snr, sin(x), cos(x), sin^2(beta)]
    snr = p[0]
    sb2 = p[3]
    sg2 = np.sin(gam) ** 2
    prod = (snr + sb2) * (snr + sg2)
    weight = np.sqrt(sb2 * sg2 / prod)
    k = 2.0 * np.sqrt(sb2 * sg2) * np.sqrt(prod) / (snr * (sb2 + sg2) + 2.0 * sb2 * sg2)
    return weight * np.arctan2(k * p[1], p[2])


@njit
def _q26_second_beta(beta, p):
    # p = [snr, sin(x), cos(x), rtol, max_depth, status]
    out = np.empty(beta.shape[0])
    q = np.empty(4)
    q[0] = p[0]
    q[1] = p[1]
    q[2] = p[2]
    nob = np.empty(0)
    for i in range(beta.shape[0]):
        q[3] = math.sin(beta[i]) ** 2
        v, e, s = integrate(_q26_second_gamma, 0.0, HALF_PI, q, p[3], 0.0, int(p[4]), nob)
        if s > p[5]:
            p[5] = s
        out[i] = v
    return out


# ---------------------------------------------------------------------------


def _raise_if_failed(status, what):
    if int(status) != CONVERGED:
        reason = "depth limit" if int(status) == 1 else "panel limit"
        raise QuadratureError(f"{what}: tolerance not reached ({reason})")


def _as_query(q, n=None, m=None, snr=None) -> SepQuery:
    if isinstance(q, SepQuery):
        return q
    return SepQuery(q, n, m, snr)


def theta_window(M: int, n: int) -> Tuple[float, float]:
    """Rotated-phase window ``pi/M -+ pi/2**n`` of the channel cell average."""
    return math.pi / M - math.pi / 2 ** n, math.pi / M + math.pi / 2 ** n


def _theta_breaks(a, b, snr):
    if snr <= 0:
        return np.empty(0)
    return graded_breaks(a, b, 0.1 / math.sqrt(snr), 12)


def error_floor(M: int, n: int, p_min: float = None) -> float:
    """SNR-independent lower bound ``(M - 2**n) / 2**n * p_min`` when ``n < log2 M``.

    ``p_min`` defaults to ``1/M`` (equiprobable symbols).
    """
    if not isinstance(M, (int, np.integer)) or M < 2 or not _is_power_of_two(int(M)):
        raise ConfigError(f"M must be a power of 2 with M >= 2, got {M!r}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ConfigError(f"n must be an integer >= 1, got {n!r}")
    if p_min is None:
        p_min = 1.0 / M
    if not 0 < p_min <= 1.0 / M + 1e-15:
        raise ConfigError(f"p_min must lie in (0, 1/M], got {p_min}")
    regions = 2 ** n
    if regions >= M:
        return 0.0
    return (M - regions) / regions * p_min


def conditional_sep(snr: float, r: float, theta: float, M: int, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Probability that ``sqrt(snr) * r * exp(j*theta) + W`` leaves the cone ``[0, 2*pi/M)``.

    For M >= 4 this is ``Q(c) + Q(s) - Q(c)Q(s)`` plus a Gaussian-weighted
    integral over the real part of the noise (zero for QPSK, where the far
    edge is the imaginary axis), with ``c = sqrt(2 snr) r cos(theta)`` and
    ``s = sqrt(2 snr) r sin(theta)``.  For BPSK the cone is the upper
    half-plane and only ``Q(s)`` remains.
    """
    if snr < 0 or r < 0:
        raise DomainError("snr and r must be non-negative")
    width = 2.0 * math.pi / M
    if not 0 < theta < width:
        raise DomainError(f"theta must lie in (0, 2*pi/M) = (0, {width}), got {theta}")
    a = math.sqrt(snr) * r
    qs = 0.5 * math.erfc(a * math.sin(theta))
    if M == 2:
        return qs
    qc = 0.5 * math.erfc(a * math.cos(theta))
    value = qc + qs - qc * qs
    if M == 4:
        return value
    v, e, st = _edge_w_integral(a, theta, width, settings.trunc_sigma, settings.rel_tol * 0.1, settings.max_depth)
    _raise_if_failed(st, "conditional_sep edge term")
    return value + v / math.sqrt(math.pi)


def _craig_component(q: SepQuery, use_cos: bool, settings: QuadratureSettings):
    a, b = theta_window(q.M, q.n)
    params = np.array([q.snr, q.m, 1.0 if use_cos else 0.0, settings.rel_tol * 0.1, settings.max_depth, 0.0])
    pref = 2 ** (q.n - 1) * q.m ** q.m / math.pi ** 2
    v, e, st = integrate(_p12_theta, a, b, params, settings.rel_tol, settings.abs_tol / pref, settings.max_depth, _theta_breaks(a, b, q.snr))
    _raise_if_failed(max(st, int(params[-1])), "p1" if use_cos else "p2")
    return pref * v, pref * e


def _p3(q: SepQuery, settings: QuadratureSettings):
    a, b = theta_window(q.M, q.n)
    tol = settings.rel_tol_3d
    params = np.array([q.snr, q.m, tol * 0.1, settings.max_depth, 0.0])
    pref = 2 ** (q.n - 1) * q.m ** q.m / math.pi ** 3
    v, e, st = integrate(_p3_theta, a, b, params, tol, settings.abs_tol / pref, settings.max_depth, _theta_breaks(a, b, q.snr))
    _raise_if_failed(max(st, int(params[-1])), "p3")
    return pref * v, pref * e


def _p4(q: SepQuery, settings: QuadratureSettings):
    if q.M <= 4:
        return 0.0, 0.0
    a, b = theta_window(q.M, q.n)
    tol = settings.rel_tol_3d
    phi = 2.0 * math.pi / q.M
    r_max = math.sqrt(R_MAX_EXPONENT / q.m)
    params = np.array([q.snr, q.m, phi, settings.trunc_sigma, r_max, tol, settings.max_depth, 0.0])
    log_pref = q.n * math.log(2.0) + q.m * math.log(q.m) - 1.5 * math.log(math.pi) - gammaln(q.m)
    pref = math.exp(log_pref)
    v, e, st = integrate(_p4_theta, a, b, params, tol, settings.abs_tol / pref, settings.max_depth, _theta_breaks(a, b, q.snr))
    _raise_if_failed(max(st, int(params[-1])), "p4")
    return pref * v, pref * e


def _require_theorem_regime(q: SepQuery):
    if q.n < q.log2M:
        raise ConfigError(
            f"the integral SEP expressions need n >= log2(M); got M={q.M}, n={q.n} "
            "(use Monte Carlo for the error-floor regime)"
        )


def sep_p_components(q, settings: QuadratureSettings = DEFAULT_SETTINGS) -> SepComponents:
    """The four fading-averaged integrals ``(p1, p2, p3, p4)``.

    For BPSK only ``p2`` is defined; the other three are reported as zero.
    ``p4`` vanishes identically for QPSK.  ``error`` is the summed
    quadrature error estimate.
    """
    q = _as_query(q)
    _require_theorem_regime(q)
    p2, e2 = _craig_component(q, False, settings)
    if q.M == 2:
        return SepComponents(0.0, p2, 0.0, 0.0, e2)
    p1, e1 = _craig_component(q, True, settings)
    p3, e3 = _p3(q, settings)
    p4, e4 = _p4(q, settings)
    return SepComponents(p1, p2, p3, p4, e1 + e2 + e3 + e4)


def sep_theorem3(q, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Average SEP for ``n >= log2 M`` by quadrature of the component integrals."""
    q = _as_query(q)
    comps = sep_p_components(q, settings)
    return min(1.0, max(0.0, comps.total(q.M)))


def sep_bounds(q, settings: QuadratureSettings = DEFAULT_SETTINGS) -> Tuple[float, float]:
    """Lower and upper bounds ``(p1 + p2/2, p1 + 2*p2)`` for M >= 4."""
    q = _as_query(q)
    if q.M < 4:
        raise ConfigError("the p1/p2 bounds need M >= 4")
    _require_theorem_regime(q)
    p1, _ = _craig_component(q, True, settings)
    p2, _ = _craig_component(q, False, settings)
    return p1 + 0.5 * p2, p1 + 2.0 * p2


def sep_bpsk_craig(snr: float, n: int, m: float, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """BPSK SEP written as the 1-bit sum of two quarter-window Craig integrals.

    For ``n = 1`` the full-window integral over ``theta in [0, pi]`` splits
    at ``pi/2`` into a ``sin`` part and a ``cos`` part on ``[0, pi/2]``.
    These are the QPSK 2-bit ``p2`` and ``p1`` integrals, but with prefactor
    ``2**(n-1) = 1`` instead of 2, so the sum is halved.  For ``n > 1`` this
    is the single window integral.
    """
    if n == 1:
        q4 = SepQuery(4, 2, m, snr)
        p1, _ = _craig_component(q4, True, settings)
        p2, _ = _craig_component(q4, False, settings)
        return 0.5 * (p1 + p2)
    return _craig_component(SepQuery(2, n, m, snr), False, settings)[0]


# ---------------------------------------------------------------------------
# QPSK under Rayleigh fading


def sep_qpsk_rayleigh_2bit_closed(snr: float) -> float:
    """Closed-form QPSK SEP with 2-bit quantization and Rayleigh fading.

    ``(2/pi) atan(1/sqrt(snr)) - ((1/pi) atan(1/sqrt(snr)))**2``
    """
    if snr < 0:
        raise DomainError("snr must be non-negative")
    t = math.atan2(1.0, math.sqrt(snr))
    return 2.0 / math.pi * t - (t / math.pi) ** 2


def sep_qpsk_rayleigh(snr: float, n: int, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """QPSK SEP under Rayleigh fading from the arctangent integral form (n >= 2)."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ConfigError("the QPSK Rayleigh expression needs n >= 2")
    if snr < 0:
        raise DomainError("snr must be non-negative")
    x = math.pi / 2 ** (n - 1)
    sx, cx = math.sin(x), math.cos(x)
    if n == 2:
        cx = 0.0
    nob = np.empty(0)
    p1 = np.array([snr, sx, cx])
    v1, e1, s1 = integrate(_q26_first, 0.0, HALF_PI, p1, settings.rel_tol * 0.1, 0.0, settings.max_depth, nob)
    _raise_if_failed(s1, "QPSK Rayleigh first term")
    p2 = np.array([snr, sx, cx, settings.rel_tol * 0.1, settings.max_depth, 0.0])
    v2, e2, s2 = integrate(_q26_second_beta, 0.0, HALF_PI, p2, settings.rel_tol, 0.0, settings.max_depth, nob)
    _raise_if_failed(max(s2, int(p2[-1])), "QPSK Rayleigh second term")
    return 2 ** n / math.pi ** 2 * v1 - 2 ** (n - 1) / math.pi ** 3 * v2


def asymptotic_sep_qpsk(snr: float, n) -> float:
    """Leading high-SNR term of the QPSK Rayleigh SEP.

    ``n = 2``: ``(2/pi) snr**-0.5``; ``n >= 3``:
    ``2**(n-1) (4 pi - 1) / pi**3 * tan(pi / 2**(n-1)) / snr``; ``n = inf``:
    ``(4 pi - 1) / pi**2 / snr``.
    """
    if snr <= 0:
        raise DomainError("snr must be positive")
    if n == math.inf:
        return (4 * math.pi - 1) / math.pi ** 2 / snr
    if n < 2:
        raise ConfigError("asymptotic QPSK SEP needs n >= 2")
    if n == 2:
        return 2.0 / math.pi / math.sqrt(snr)
    return 2 ** (n - 1) * (4 * math.pi - 1) / math.pi ** 3 * math.tan(math.pi / 2 ** (n - 1)) / snr


def psi_penalty(snr: float, n) -> float:
    """SEP increase (dB) of n-bit over unquantized QPSK at high SNR."""
    if snr <= 0:
        raise DomainError("snr must be positive")
    if n == math.inf:
        return 0.0
    if n < 2:
        raise ConfigError("psi penalty needs n >= 2")
    if n == 2:
        return 10.0 * math.log10(2.0 * math.pi / (4.0 * math.pi - 1.0) * math.sqrt(snr))
    return 10.0 * math.log10(2 ** (n - 1) / math.pi * math.tan(math.pi / 2 ** (n - 1)))


def phi_penalty(snr_2: float, n) -> float:
    """Extra transmit power (dB) that (n-1)-bit needs to match n-bit QPSK.

    ``snr_2`` is the linear SNR of the 2-bit system; it only enters for n = 3.
    """
    if n == math.inf:
        return 0.0
    if n < 3:
        raise ConfigError("phi penalty needs n >= 3")
    if n == 3:
        if snr_2 <= 0:
            raise DomainError("snr_2 must be positive")
        return 10.0 * math.log10(math.pi ** 2 / (2.0 * (4.0 * math.pi - 1.0)) * math.sqrt(snr_2))
    return 10.0 * math.log10(0.5 * math.tan(math.pi / 2 ** (n - 2)) / math.tan(math.pi / 2 ** (n - 1)))


def phi_penalty_at_sep(sep: float, n) -> float:
    """:func:`phi_penalty` indexed by the target SEP instead of the 2-bit SNR.

    For n = 3 the 2-bit SNR is read off the 2-bit asymptote,
    ``sqrt(snr_2) = 2 / (pi * sep)``.
    """
    if not 0 < sep < 1:
        raise DomainError("target SEP must lie in (0, 1)")
    return phi_penalty((2.0 / (math.pi * sep)) ** 2, n)


# ---------------------------------------------------------------------------
# diversity order


def dvo_theoretical(M: int, n: int, m: float) -> float:
    """High-SNR decay exponent: ``m``, ``1/2`` or ``0`` as n exceeds, equals or falls short of log2 M."""
    SepQuery(M, n, m, 1.0)
    bits = int(M).bit_length() - 1
    if n >= bits + 1:
        return float(m)
    if n == bits:
        return 0.5
    return 0.0


def db_to_linear(snr_db):
    return 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)


def linear_to_db(snr):
    return 10.0 * np.log10(np.asarray(snr, dtype=float))


def dvo_fit(curve, window_db: Tuple[float, float] = (30.0, 50.0)) -> DvoFit:
    """Fit the slope of ``-log10 p`` against ``log10 SNR`` inside ``window_db``.

    ``curve`` is a :class:`~lowres_psk.results.SepCurve` or any iterable of
    ``(snr_db, p)`` pairs.
    """
    if hasattr(curve, "snr_db"):
        snr_db = np.asarray(curve.snr_db, dtype=float)
        p = np.asarray(curve.values, dtype=float)
    else:
        pairs = np.asarray(list(curve), dtype=float)
        if pairs.size == 0:
            raise InsufficientData("empty curve")
        snr_db, p = pairs[:, 0], pairs[:, 1]
    lo, hi = window_db
    mask = (snr_db >= lo - 1e-9) & (snr_db <= hi + 1e-9) & (p > 0) & np.isfinite(p)
    if mask.sum() < 4:
        raise InsufficientData(f"need >= 4 positive points in [{lo}, {hi}] dB, have {int(mask.sum())}")
    x = snr_db[mask] / 10.0
    y = -np.log10(p[mask])
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.max(np.abs(y - (slope * x + intercept))))
    return DvoFit(float(slope), float(intercept), (float(lo), float(hi)), resid, int(mask.sum()))


def analytic_curve_values(M: int, n: int, m: float, snr_db: Sequence[float], settings: QuadratureSettings = DEFAULT_SETTINGS):
    """SEP and quadrature error estimates on an SNR grid given in dB."""
    values, errors = [], []
    for s in np.atleast_1d(snr_db):
        comps = sep_p_components(SepQuery(M, n, m, float(db_to_linear(s))), settings)
        values.append(min(1.0, max(0.0, comps.total(M))))
        errors.append(comps.error)
    return np.array(values), np.array(errors)
