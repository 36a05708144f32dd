# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: escape-rate orbit iteration and mod-p orbit tables.

Operation-for-operation identical to the pure-Python fallback (same
order, no fused multiply-adds; the build disables FP contraction), so
both backends return bit-identical values.
"""

from libc.math cimport exp, log, sqrt

import numpy as np

BACKEND = "cython"

cdef double _NEG_INF = float("-inf")


def green_escape(
    long long m,
    long long[::1] degs,
    long long[::1] off,
    double[::1] cre,
    double[::1] cim,
    double[::1] cabs,
    double[::1] dre,
    double[::1] dim,
    double[::1] dabs,
    double[::1] abs_lead,
    double[::1] log_lead,
    double[::1] wfac,
    double lam,
    double r_enter,
    double r_switch,
    double e_bound,
    double c_up,
    double xr,
    double xi,
    double yr,
    double yi,
    long long n_max,
    double tol,
):
    """One-point escape-rate value; see the fallback for the contract."""
    cdef double inv_lam = 1.0 / lam
    cdef long long n = 0
    cdef long long n_escape = -1
    cdef long long k, j, d, o
    cdef double ax, ay, pr, pi, tr, ti, norm, big, scale
    cdef double pxr, pxi, pyr, pyi
    cdef double mag2, lx, ly, hx, hy, w, pad, nly, nhy, value, err
    cdef int bad
    ax = sqrt(xr * xr + xi * xi)
    ay = sqrt(yr * yr + yi * yi)
    # phase 1
    while True:
        if ay >= ax and ay >= r_enter:
            if n_escape < 0:
                n_escape = n
            if ay >= r_switch:
                break
        if n >= n_max:
            if n_escape >= 0:
                break  # inside the region; finish in log space anyway
            norm = ax if ax > ay else ay
            big = log(norm) if norm > 1.0 else 0.0
            scale = 1.0
            k = 0
            while k < n_max:
                scale *= inv_lam
                k += 1
            return (0.0, scale * (big + c_up), 0, -1, n)
        pxr = xr
        pxi = xi
        pyr = yr
        pyi = yi
        bad = 0
        k = 0
        while k < m:
            d = degs[k]
            o = off[k]
            pr = cre[o + d]
            pi = cim[o + d]
            j = d - 1
            while j >= 0:
                tr = pr * yr - pi * yi + cre[o + j]
                pi = pr * yi + pi * yr + cim[o + j]
                pr = tr
                j -= 1
            tr = pr - (dre[k] * xr - dim[k] * xi)
            ti = pi - (dre[k] * xi + dim[k] * xr)
            xr = yr
            xi = yi
            yr = tr
            yi = ti
            if not (
                -1e300 < xr < 1e300
                and -1e300 < xi < 1e300
                and -1e300 < yr < 1e300
                and -1e300 < yi < 1e300
            ):
                bad = 1
                break
            k += 1
        if bad:
            xr = pxr
            xi = pxi
            yr = pyr
            yi = pyi
            ax = sqrt(xr * xr + xi * xi)
            ay = sqrt(yr * yr + yi * yi)
            if n_escape < 0:
                # cannot certify region membership; give a crude bound
                norm = ax if ax > ay else ay
                big = log(norm) if norm > 1.0 else 0.0
                return (0.0, big + c_up, 0, -1, n)
            break
        ax = sqrt(xr * xr + xi * xi)
        ay = sqrt(yr * yr + yi * yi)
        n += 1
    # phase 2: log-magnitude recursion from the current state
    mag2 = xr * xr + xi * xi
    lx = 0.5 * log(mag2) if mag2 > 0.0 else _NEG_INF
    mag2 = yr * yr + yi * yi
    ly = 0.5 * log(mag2) if mag2 > 0.0 else _NEG_INF
    hy = 1e-13
    hx = 1e-13
    scale = 1.0
    k = 0
    while k < n:
        scale *= inv_lam
        k += 1
    cdef double target = tol * 0.25
    while scale * e_bound / (lam - 1.0) > target and n < n_max:
        k = 0
        while k < m:
            d = degs[k]
            o = off[k]
            w = 0.0
            j = 0
            while j < d:
                w += cabs[o + j] * exp((j - d) * ly)
                j += 1
            w += dabs[k] * exp(lx - d * ly)
            w /= abs_lead[k]
            if w > 0.5:
                w = 0.5  # cannot happen inside the region; defensive clamp
            pad = w / (1.0 - w)
            nly = d * ly + log_lead[k]
            nhy = d * hy + pad
            lx = ly
            hx = hy
            ly = nly
            hy = nhy
            k += 1
        n += 1
        scale *= inv_lam
    value = scale * ly
    err = scale * e_bound / (lam - 1.0) + scale * hy + 1e-14 * (1.0 + abs(value))
    return (value, err, 1, n_escape, n)


def modp_next_table(long long p, long long[::1] degs, long long[::1] off,
                    long long[::1] cmod, long long[::1] dmod):
    """Orbit table of the reduced map on F_p x F_p (index = x*p + y)."""
    cdef long long m = degs.shape[0]
    cdef long long total = p * p
    out = np.empty(total, dtype=np.int64)
    cdef long long[::1] nxt = out
    cdef long long idx, x, y, k, j, d, o, acc, ny
    for idx in range(total):
        x = idx // p
        y = idx % p
        for k in range(m):
            d = degs[k]
            o = off[k]
            acc = cmod[o + d]
            for j in range(d - 1, -1, -1):
                acc = (acc * y + cmod[o + j]) % p
            ny = (acc - dmod[k] * x) % p
            if ny < 0:
                ny += p
            x = y
            y = ny
        nxt[idx] = x * p + y
    return out
