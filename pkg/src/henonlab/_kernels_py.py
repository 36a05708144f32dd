"""Pure-Python kernels: escape-rate orbit iteration and mod-p orbit tables.

This is the fallback for the compiled extension. The floating-point
code is written operation-for-operation identically to the compiled
version (same order, no fused operations), so both backends return
bit-identical results; tests assert that.

green_escape implements the two-phase escape-rate computation:

  phase 1  complex-double orbit iteration until the point enters the
           escape region {|y| >= max(|x|, R)} and its norm passes
           r_switch (growth there at least doubles |y| per step);
  phase 2  log-magnitude recursion with a rigorous error budget: per
           factor log|y'| = d log|y| + log|lead| + log(1 + w), |w|
           bounded by the relative lower-order mass, accumulated into
           an interval halfwidth, plus the geometric tail bound at the
           stopping iterate.

Returned error bounds are honest upper estimates: tail + accumulated
halfwidth + a machine-precision pad.
"""

from math import exp, log, sqrt

import numpy as np

BACKEND = "python"

_NEG_INF = float("-inf")


def green_escape(
    m,
    degs,
    off,
    cre,
    cim,
    cabs,
    dre,
    dim,
    dabs,
    abs_lead,
    log_lead,
    wfac,
    lam,
    r_enter,
    r_switch,
    e_bound,
    c_up,
    xr,
    xi,
    yr,
    yi,
    n_max,
    tol,
):
    """One-point escape-rate value.

    Returns (value, err, escaped, n_escape, n_used) with escaped in
    {0, 1} and n_escape = -1 when the orbit stayed bounded through
    n_max full-map iterations.
    """
    inv_lam = 1.0 / lam
    n = 0
    n_escape = -1
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
    target = tol * 0.25
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


def modp_next_table(p, degs, off, cmod, dmod):
    """Orbit table of the reduced map on F_p x F_p.

    Point (x, y) is index x*p + y; entry holds the index of its image.
    Vectorized over the whole grid; integers are exact so this matches
    the compiled version entry for entry.
    """
    m = len(degs)
    xs, ys = np.divmod(np.arange(p * p, dtype=np.int64), p)
    for k in range(m):
        d = int(degs[k])
        o = int(off[k])
        acc = np.full(p * p, int(cmod[o + d]), dtype=np.int64)
        for j in range(d - 1, -1, -1):
            acc = (acc * ys + int(cmod[o + j])) % p
        nxt_y = (acc - int(dmod[k]) * xs) % p
        xs, ys = ys, nxt_y
    return xs * p + ys
