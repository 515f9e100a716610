"""Numba kernels for the warping-distance dynamic program.

The three DP kernels below must keep their value arithmetic in lockstep:
``objective gradients must reproduce plain distance values bit-for-bit``,
so the forward expressions (soft threshold, gap cost, candidate order)
are written identically in each.

Candidate order encodes the tie-break: diagonal, then vertical (advance
the first trajectory), then horizontal; strict ``<`` keeps the earliest
candidate on exact ties.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange


@njit(cache=True)
def _cell_dists(A, B):
    """Euclidean distances for every grid cell; index 0 is the null state
    at the origin, so border cells use the plain state norm."""
    n = A.shape[0]
    m = B.shape[0]
    dim = A.shape[1]
    out = np.empty((n + 1, m + 1))
    out[0, 0] = 0.0
    for i in range(1, n + 1):
        s = 0.0
        for d in range(dim):
            v = A[i - 1, d]
            s += v * v
        out[i, 0] = np.sqrt(s)
    for j in range(1, m + 1):
        s = 0.0
        for d in range(dim):
            v = B[j - 1, d]
            s += v * v
        out[0, j] = np.sqrt(s)
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            s = 0.0
            for d in range(dim):
                v = A[i - 1, d] - B[j - 1, d]
                s += v * v
            out[i, j] = np.sqrt(s)
    return out


@njit(cache=True)
def _dp_distance(A, B, a, tau, gamma):
    """Minimum path cost D(n, m).  ``a`` and ``tau`` may be +inf."""
    dists = _cell_dists(A, B)
    n = A.shape[0]
    m = B.shape[0]
    acc = np.empty((n + 1, m + 1))
    acc[0, 0] = 0.0
    for i in range(n + 1):
        for j in range(m + 1):
            if i == 0 and j == 0:
                continue
            x = dists[i, j]
            if np.isinf(tau):
                sv = x
            else:
                sv = tau * np.tanh(x / tau)
            if np.isinf(a):
                nd = np.inf
            else:
                nd = a * sv + gamma
            best = np.inf
            if i >= 1 and j >= 1:
                c = acc[i - 1, j - 1] + sv
                if c < best:
                    best = c
            if i >= 1:
                c = acc[i - 1, j] + nd
                if c < best:
                    best = c
            if j >= 1:
                c = acc[i, j - 1] + nd
                if c < best:
                    best = c
            acc[i, j] = best
    return acc[n, m]


@njit(cache=True)
def _dp_choices(A, B, a, tau, gamma):
    """Like :func:`_dp_distance` but also records the tie-broken argmin
    branch per cell (0 diagonal, 1 vertical, 2 horizontal)."""
    dists = _cell_dists(A, B)
    n = A.shape[0]
    m = B.shape[0]
    acc = np.empty((n + 1, m + 1))
    choice = np.zeros((n + 1, m + 1), dtype=np.int8)
    acc[0, 0] = 0.0
    for i in range(n + 1):
        for j in range(m + 1):
            if i == 0 and j == 0:
                continue
            x = dists[i, j]
            if np.isinf(tau):
                sv = x
            else:
                sv = tau * np.tanh(x / tau)
            if np.isinf(a):
                nd = np.inf
            else:
                nd = a * sv + gamma
            best = np.inf
            ch = np.int8(0)
            if i >= 1 and j >= 1:
                c = acc[i - 1, j - 1] + sv
                if c < best:
                    best = c
                    ch = np.int8(0)
            if i >= 1:
                c = acc[i - 1, j] + nd
                if c < best:
                    best = c
                    ch = np.int8(1)
            if j >= 1:
                c = acc[i, j - 1] + nd
                if c < best:
                    best = c
                    ch = np.int8(2)
            acc[i, j] = best
            choice[i, j] = ch
    return acc[n, m], choice


@njit(cache=True)
def _dp_grad(A, B, alpha, gamma, eps):
    """Distance value and exact partials w.r.t. (alpha, gamma, epsilon)
    along the tie-broken optimal path.  Requires alpha < 1 and
    0 < eps < 1 so all coefficients stay finite."""
    a = alpha / (1.0 - alpha)
    tau = eps / (1.0 - eps)
    da_dalpha = 1.0 / ((1.0 - alpha) * (1.0 - alpha))
    dtau_deps = 1.0 / ((1.0 - eps) * (1.0 - eps))
    dists = _cell_dists(A, B)
    n = A.shape[0]
    m = B.shape[0]
    acc = np.empty((n + 1, m + 1))
    choice = np.zeros((n + 1, m + 1), dtype=np.int8)
    acc[0, 0] = 0.0
    for i in range(n + 1):
        for j in range(m + 1):
            if i == 0 and j == 0:
                continue
            x = dists[i, j]
            if np.isinf(tau):
                sv = x
            else:
                sv = tau * np.tanh(x / tau)
            if np.isinf(a):
                nd = np.inf
            else:
                nd = a * sv + gamma
            best = np.inf
            ch = np.int8(0)
            if i >= 1 and j >= 1:
                c = acc[i - 1, j - 1] + sv
                if c < best:
                    best = c
                    ch = np.int8(0)
            if i >= 1:
                c = acc[i - 1, j] + nd
                if c < best:
                    best = c
                    ch = np.int8(1)
            if j >= 1:
                c = acc[i, j - 1] + nd
                if c < best:
                    best = c
                    ch = np.int8(2)
            acc[i, j] = best
            choice[i, j] = ch

    g_alpha = 0.0
    g_gamma = 0.0
    g_eps = 0.0
    i = n
    j = m
    while i != 0 or j != 0:
        x = dists[i, j]
        u = x / tau
        t = np.tanh(u)
        sv = tau * t
        dsv_dtau = t - u * (1.0 - t * t)
        ch = choice[i, j]
        if ch == 0:
            g_eps += dsv_dtau * dtau_deps
            i -= 1
            j -= 1
        else:
            g_alpha += sv * da_dalpha
            g_gamma += 1.0
            g_eps += a * dsv_dtau * dtau_deps
            if ch == 1:
                i -= 1
            else:
                j -= 1
    return acc[n, m], g_alpha, g_gamma, g_eps


@njit(cache=True, parallel=True)
def _pairwise(flat, offsets, a, tau, gamma, out):
    """Fill the symmetric distance matrix; each unordered pair is
    evaluated once and mirrored (deterministic output placement)."""
    t = offsets.shape[0] - 1
    for i in prange(t):
        ai = flat[offsets[i] : offsets[i + 1]]
        for j in range(i + 1, t):
            bj = flat[offsets[j] : offsets[j + 1]]
            d = _dp_distance(ai, bj, a, tau, gamma)
            out[i, j] = d
            out[j, i] = d
