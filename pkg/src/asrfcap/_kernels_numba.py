"""Compiled kernel backend (numba).

Scalar mirror of _kernels_numpy, one iteration per parallel lane.  Keep
the arithmetic in lockstep with the vector backend: same expressions,
same evaluation order.  losses[k] depends only on (key, k), never on
thread scheduling, so worker count cannot change results.
"""

import math

import numpy as np
from numba import njit, prange

from ._coeffs import (
    GOLDEN, MIX1, MIX2,
    CHI2_BAND, CHI2_MAX_ATTEMPTS,
    UNIFORM_SCALE,
    PPND_A, PPND_B, PPND_C, PPND_D, PPND_E, PPND_F,
    PPND_CENTRAL, PPND_R0, PPND_SPLIT,
    ERF_THRESH, ERF_XSMALL, ERFC_XBIG, INV_SQRT_PI, INV_SQRT2,
    ERF_A, ERF_B, ERFC_C, ERFC_D, ERFC_P, ERFC_Q,
    BINOM_LOG_SWITCH,
    FAMILY_PRODUCT, FAMILY_T,
)


@njit(cache=True)
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * MIX1
    z = (z ^ (z >> np.uint64(27))) * MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _uniform(key, it, var):
    counter = (it << np.uint64(32)) | var
    word = _mix64(key ^ (counter * GOLDEN + GOLDEN))
    return (float(word >> np.uint64(11)) + 0.5) * UNIFORM_SCALE


@njit(cache=True)
def _ppnd16(u):
    q = u - 0.5
    if abs(q) <= PPND_CENTRAL:
        r = PPND_R0 - q * q
        num = PPND_A[7]
        for i in range(6, -1, -1):
            num = num * r + PPND_A[i]
        den = PPND_B[6]
        for i in range(5, -1, -1):
            den = den * r + PPND_B[i]
        den = den * r + 1.0
        return q * num / den
    if q < 0.0:
        r = u
    else:
        r = 1.0 - u
    r = math.sqrt(-math.log(r))
    if r <= PPND_SPLIT:
        r = r - 1.6
        num = PPND_C[7]
        for i in range(6, -1, -1):
            num = num * r + PPND_C[i]
        den = PPND_D[6]
        for i in range(5, -1, -1):
            den = den * r + PPND_D[i]
        den = den * r + 1.0
    else:
        r = r - PPND_SPLIT
        num = PPND_E[7]
        for i in range(6, -1, -1):
            num = num * r + PPND_E[i]
        den = PPND_F[6]
        for i in range(5, -1, -1):
            den = den * r + PPND_F[i]
        den = den * r + 1.0
    val = num / den
    if q < 0.0:
        return -val
    return val


@njit(cache=True)
def _erfc(x):
    y = abs(x)
    if y <= ERF_THRESH:
        ysq = y * y if y > ERF_XSMALL else 0.0
        xnum = ERF_A[4] * ysq
        xden = ysq
        for i in range(3):
            xnum = (xnum + ERF_A[i]) * ysq
            xden = (xden + ERF_B[i]) * ysq
        return 1.0 - x * (xnum + ERF_A[3]) / (xden + ERF_B[3])
    if y <= 4.0:
        xnum = ERFC_C[8] * y
        xden = y
        for i in range(7):
            xnum = (xnum + ERFC_C[i]) * y
            xden = (xden + ERFC_D[i]) * y
        res = (xnum + ERFC_C[7]) / (xden + ERFC_D[7])
        ysq = math.floor(y * 16.0) / 16.0
        dl = (y - ysq) * (y + ysq)
        res = math.exp(-ysq * ysq) * math.exp(-dl) * res
    else:
        res = 0.0
        if y < ERFC_XBIG:
            ysq = 1.0 / (y * y)
            xnum = ERFC_P[5] * ysq
            xden = ysq
            for i in range(4):
                xnum = (xnum + ERFC_P[i]) * ysq
                xden = (xden + ERFC_Q[i]) * ysq
            res = ysq * (xnum + ERFC_P[4]) / (xden + ERFC_Q[4])
            res = (INV_SQRT_PI - res) / y
            ysq16 = math.floor(y * 16.0) / 16.0
            dl = (y - ysq16) * (y + ysq16)
            res = math.exp(-ysq16 * ysq16) * math.exp(-dl) * res
    if x < 0.0:
        res = 2.0 - res
    return res


@njit(cache=True)
def _ncdf(x):
    return 0.5 * _erfc(-x * INV_SQRT2)


@njit(cache=True)
def _chi2(key, it, nu):
    a = 0.5 * nu
    boosted = a < 1.0
    d = ((a + 1.0) if boosted else a) - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    g = d
    for t in range(CHI2_MAX_ATTEMPTS):
        u1 = _uniform(key, it, CHI2_BAND + np.uint64(1 + 2 * t))
        x = _ppnd16(u1)
        tt = 1.0 + c * x
        if tt > 0.0:
            v = tt * tt * tt
            u2 = _uniform(key, it, CHI2_BAND + np.uint64(2 + 2 * t))
            if math.log(u2) < 0.5 * x * x + d - d * v + d * math.log(v):
                g = d * v
                break
    if boosted:
        u0 = _uniform(key, it, CHI2_BAND)
        g = g * u0 ** (1.0 / a)
    return 2.0 * g


@njit(cache=True)
def _binom_inv(u, m, p):
    if p <= 0.0:
        return 0
    if p >= 1.0:
        return m
    lq = m * math.log1p(-p)
    k = 0
    if lq > BINOM_LOG_SWITCH:
        ratio = p / (1.0 - p)
        pmf = math.exp(lq)
        cdf = pmf
        while u > cdf and k < m:
            scale = (m - k) / (k + 1.0)
            pmf = pmf * (scale * ratio)
            cdf += pmf
            k += 1
        return k
    lratio = math.log(p) - math.log1p(-p)
    logpmf = lq
    cdf = math.exp(logpmf)
    while u > cdf and k < m:
        scale = (m - k) / (k + 1.0)
        logpmf += math.log(scale) + lratio
        cdf += math.exp(logpmf)
        k += 1
    return k


@njit(cache=True, parallel=True)
def simulate_fast(key, n_iter, family, nu, m_arr, thr, sqr, s1r, unit, var_arr):
    losses = np.empty(n_iter)
    nblocks = m_arr.size
    for k in prange(n_iter):
        it = np.uint64(k)
        y = 0.0
        scale = 1.0
        if family != FAMILY_PRODUCT:
            y = _ppnd16(_uniform(key, it, np.uint64(0)))
        if family == FAMILY_T:
            v = _chi2(key, it, nu)
            scale = math.sqrt(v / nu)
        acc = 0.0
        for b in range(nblocks):
            if family == FAMILY_PRODUCT:
                zeta = thr[b]
            elif family == FAMILY_T:
                zeta = (thr[b] * scale - sqr[b] * y) / s1r[b]
            else:
                zeta = (thr[b] - sqr[b] * y) / s1r[b]
            pcond = _ncdf(zeta)
            u = _uniform(key, it, np.uint64(var_arr[b]))
            cnt = _binom_inv(u, m_arr[b], pcond)
            acc += unit[b] * cnt
        losses[k] = acc
    return losses


@njit(cache=True, parallel=True)
def simulate_naive(key, n_iter, family, nu, thr, sqr, s1r, unit):
    losses = np.empty(n_iter)
    ncredits = thr.size
    for k in prange(n_iter):
        it = np.uint64(k)
        y = 0.0
        scale = 1.0
        if family != FAMILY_PRODUCT:
            y = _ppnd16(_uniform(key, it, np.uint64(0)))
        if family == FAMILY_T:
            v = _chi2(key, it, nu)
            scale = math.sqrt(v / nu)
        acc = 0.0
        for i in range(ncredits):
            if family == FAMILY_PRODUCT:
                zeta = thr[i]
            elif family == FAMILY_T:
                zeta = (thr[i] * scale - sqr[i] * y) / s1r[i]
            else:
                zeta = (thr[i] - sqr[i] * y) / s1r[i]
            z = _ppnd16(_uniform(key, it, np.uint64(2 + i)))
            if z < zeta:
                acc += unit[i]
        losses[k] = acc
    return losses


@njit(cache=True, parallel=True)
def normal_grid(key, start, count, variate):
    out = np.empty(count)
    var = np.uint64(variate)
    for k in prange(count):
        out[k] = _ppnd16(_uniform(key, np.uint64(start + k), var))
    return out


@njit(cache=True, parallel=True)
def chi2_grid(key, start, count, nu):
    out = np.empty(count)
    for k in prange(count):
        out[k] = _chi2(key, np.uint64(start + k), nu)
    return out
