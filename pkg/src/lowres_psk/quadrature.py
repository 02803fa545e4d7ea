"""Globally adaptive Gauss-Legendre quadrature on panels.

Each panel carries two estimates: a fixed-order Gauss-Legendre rule on the
whole panel and the same rule applied to its two halves.  The halves are
kept as the value and their difference from the whole is the error
estimate.  The panel with the largest error is bisected until the summed
error meets ``max(atol, rtol * |total|)`` or no panel may be split further.

Integrands take ``(x, params)`` with ``x`` a 1-D array of nodes and
``params`` a float64 array, and return an array of values.  Nested
integrals are written as an outer integrand that calls :func:`integrate`
for every node.  All of it is numba-compatible; see ``_accel``.
"""

import numpy as np

from ._accel import njit

GL_ORDER = 10
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)
GL_NODES = np.ascontiguousarray(_GL_X)
GL_WEIGHTS = np.ascontiguousarray(_GL_W)

MAX_PANELS = 4096

# status codes returned alongside the value
CONVERGED = 0
DEPTH_LIMIT = 1
PANEL_LIMIT = 2


@njit
def _gl(f, a, b, params):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return half * np.sum(GL_WEIGHTS * f(mid + half * GL_NODES, params))


@njit
def _split_estimate(f, a, b, whole, params):
    mid = 0.5 * (a + b)
    left = _gl(f, a, mid, params)
    right = _gl(f, mid, b, params)
    return left, right, abs(left + right - whole)


@njit
def integrate(f, a, b, params, rtol, atol, max_depth, breaks):
    """Integrate ``f`` over ``[a, b]``.

    ``breaks`` holds interior points that seed the initial panels (pass an
    empty array for none); panels are never split deeper than ``max_depth``
    bisections below their seed.

    Returns ``(value, error_estimate, status)``.
    """
    lo = np.empty(MAX_PANELS)
    hi = np.empty(MAX_PANELS)
    lhalf = np.empty(MAX_PANELS)
    rhalf = np.empty(MAX_PANELS)
    val = np.empty(MAX_PANELS)
    err = np.empty(MAX_PANELS)
    depth = np.zeros(MAX_PANELS, dtype=np.int64)

    n = 0
    left_edge = a
    for j in range(breaks.shape[0] + 1):
        right_edge = b if j == breaks.shape[0] else breaks[j]
        if right_edge <= left_edge:
            continue
        w = _gl(f, left_edge, right_edge, params)
        l_, r_, e_ = _split_estimate(f, left_edge, right_edge, w, params)
        lo[n] = left_edge
        hi[n] = right_edge
        lhalf[n] = l_
        rhalf[n] = r_
        val[n] = l_ + r_
        err[n] = e_
        n += 1
        left_edge = right_edge

    status = CONVERGED
    while True:
        total = 0.0
        total_err = 0.0
        for i in range(n):
            total += val[i]
            total_err += err[i]
        if total_err <= max(atol, rtol * abs(total)):
            break
        # worst panel that may still be split
        worst = -1
        worst_err = -1.0
        for i in range(n):
            if depth[i] < max_depth and err[i] > worst_err:
                worst_err = err[i]
                worst = i
        if worst < 0:
            status = DEPTH_LIMIT
            break
        if n + 1 > MAX_PANELS:
            status = PANEL_LIMIT
            break
        a_ = lo[worst]
        b_ = hi[worst]
        mid = 0.5 * (a_ + b_)
        # the halves of the parent become the "whole" rules of the children
        l1, r1, e1 = _split_estimate(f, a_, mid, lhalf[worst], params)
        l2, r2, e2 = _split_estimate(f, mid, b_, rhalf[worst], params)
        d = depth[worst] + 1
        hi[worst] = mid
        lhalf[worst] = l1
        rhalf[worst] = r1
        val[worst] = l1 + r1
        err[worst] = e1
        depth[worst] = d
        lo[n] = mid
        hi[n] = b_
        lhalf[n] = l2
        rhalf[n] = r2
        val[n] = l2 + r2
        err[n] = e2
        depth[n] = d
        n += 1

    total = 0.0
    total_err = 0.0
    for i in range(n):
        total += val[i]
        total_err += err[i]
    return total, total_err, status


@njit
def graded_breaks(a, b, scale, levels):
    """Break points clustering geometrically at both ends of ``[a, b]``.

    Points sit at ``scale * 4**j`` from each end, for ``j < levels``, as
    long as they stay inside the middle half-width of the interval.
    """
    out = np.empty(2 * levels)
    k = 0
    half = 0.5 * (b - a)
    for j in range(levels):
        d = scale * 4.0 ** j
        if d >= half:
            break
        out[k] = a + d
        out[k + 1] = b - d
        k += 2
    return np.sort(out[:k])


@njit
def left_graded_breaks(a, b, scale, levels):
    """Break points at ``a + scale * 4**j`` that fall strictly inside ``(a, b)``."""
    out = np.empty(levels)
    k = 0
    for j in range(levels):
        x = a + scale * 4.0 ** j
        if x >= b:
            break
        out[k] = x
        k += 1
    return out[:k].copy()
