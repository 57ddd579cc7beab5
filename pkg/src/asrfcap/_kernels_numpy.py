"""Vectorized kernel backend (pure numpy).

This module is the reference implementation of the sampling and
simulation kernels.  The numba backend mirrors it operation for
operation; any change here must be applied there as well.  All
randomness is counter-based: the uniform at (seed, iteration, variate)
is a pure function of those coordinates, so results are independent of
chunking and worker scheduling by construction.
"""

import numpy as np

from ._coeffs import (
    GOLDEN, MIX1, MIX2, U64_MASK,
    ITERATION_SHIFT, CHI2_BAND, CHI2_MAX_ATTEMPTS,
    UNIFORM_SHIFT, UNIFORM_SCALE,
    PPND_A, PPND_B, PPND_C, PPND_D, PPND_E, PPND_F,
    PPND_CENTRAL, PPND_R0, PPND_SPLIT,
    ERF_THRESH, ERF_XSMALL, ERFC_XBIG, INV_SQRT_PI, INV_SQRT2,
    ERF_A, ERF_B, ERFC_C, ERFC_D, ERFC_P, ERFC_Q,
    BINOM_LOG_SWITCH,
    FAMILY_GAUSSIAN, FAMILY_PRODUCT, FAMILY_T,
)

_CHUNK = 1 << 15


def mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * MIX1
    z = (z ^ (z >> np.uint64(27))) * MIX2
    return z ^ (z >> np.uint64(31))


def stream_key(seed: int) -> np.uint64:
    # 1-element array: numpy scalars warn on wraparound, arrays do not.
    z = np.array([int(seed) & U64_MASK], dtype=np.uint64) + GOLDEN
    return mix64(z)[0]


def uniform_at(key: np.uint64, iterations: np.ndarray, variate) -> np.ndarray:
    """Uniform(0,1) draws at counter (iteration << 32) | variate."""
    counter = (iterations.astype(np.uint64) << ITERATION_SHIFT) | np.uint64(variate)
    word = mix64(key ^ (counter * GOLDEN + GOLDEN))
    return ((word >> UNIFORM_SHIFT) + 0.5) * UNIFORM_SCALE


def _poly(coeffs, r):
    num = np.full_like(r, coeffs[-1])
    for i in range(len(coeffs) - 2, -1, -1):
        num = num * r + coeffs[i]
    return num


def _poly1(coeffs, r):
    # denominator polynomials carry an implicit constant term of 1
    num = np.full_like(r, coeffs[-1])
    for i in range(len(coeffs) - 2, -1, -1):
        num = num * r + coeffs[i]
    return num * r + 1.0


def ppnd16(u: np.ndarray) -> np.ndarray:
    """Inverse standard normal CDF (Wichura's PPND16), u strictly in (0,1)."""
    u = np.asarray(u, dtype=np.float64)
    q = u - 0.5
    out = np.empty_like(u)
    central = np.abs(q) <= PPND_CENTRAL
    if central.any():
        qc = q[central]
        r = PPND_R0 - qc * qc
        out[central] = qc * _poly(PPND_A, r) / _poly1(PPND_B, r)
    tail = ~central
    if tail.any():
        qt = q[tail]
        r = np.where(qt < 0.0, u[tail], 1.0 - u[tail])
        r = np.sqrt(-np.log(r))
        val = np.empty_like(r)
        mid = r <= PPND_SPLIT
        if mid.any():
            rm = r[mid] - 1.6
            val[mid] = _poly(PPND_C, rm) / _poly1(PPND_D, rm)
        far = ~mid
        if far.any():
            rf = r[far] - PPND_SPLIT
            val[far] = _poly(PPND_E, rf) / _poly1(PPND_F, rf)
        out[tail] = np.where(qt < 0.0, -val, val)
    return out


def erfc(x: np.ndarray) -> np.ndarray:
    """Cody's rational erfc, accurate to ~1 ulp over the real line."""
    x = np.asarray(x, dtype=np.float64)
    y = np.abs(x)
    out = np.empty_like(x)

    lo = y <= ERF_THRESH
    if lo.any():
        yl = y[lo]
        ysq = np.where(yl > ERF_XSMALL, yl * yl, 0.0)
        xnum = ERF_A[4] * ysq
        xden = ysq.copy()
        for i in range(3):
            xnum = (xnum + ERF_A[i]) * ysq
            xden = (xden + ERF_B[i]) * ysq
        out[lo] = 1.0 - x[lo] * (xnum + ERF_A[3]) / (xden + ERF_B[3])

    mid = (y > ERF_THRESH) & (y <= 4.0)
    if mid.any():
        ym = y[mid]
        xnum = ERFC_C[8] * ym
        xden = ym.copy()
        for i in range(7):
            xnum = (xnum + ERFC_C[i]) * ym
            xden = (xden + ERFC_D[i]) * ym
        res = (xnum + ERFC_C[7]) / (xden + ERFC_D[7])
        ysq = np.floor(ym * 16.0) / 16.0
        dl = (ym - ysq) * (ym + ysq)
        out[mid] = np.exp(-ysq * ysq) * np.exp(-dl) * res

    hi = y > 4.0
    if hi.any():
        yh = y[hi]
        res = np.zeros_like(yh)
        live = yh < ERFC_XBIG
        if live.any():
            yl = yh[live]
            ysq = 1.0 / (yl * yl)
            xnum = ERFC_P[5] * ysq
            xden = ysq.copy()
            for i in range(4):
                xnum = (xnum + ERFC_P[i]) * ysq
                xden = (xden + ERFC_Q[i]) * ysq
            r = ysq * (xnum + ERFC_P[4]) / (xden + ERFC_Q[4])
            r = (INV_SQRT_PI - r) / yl
            ysq16 = np.floor(yl * 16.0) / 16.0
            dl = (yl - ysq16) * (yl + ysq16)
            res[live] = np.exp(-ysq16 * ysq16) * np.exp(-dl) * r
        out[hi] = res

    # erf branch already carries the sign; reflection applies to tails only
    neg = (x < 0.0) & ~lo
    if neg.any():
        out[neg] = 2.0 - out[neg]
    return out


def normal_cdf(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return 0.5 * erfc(-x * INV_SQRT2)


def normal_grid(key: np.uint64, start: int, count: int, variate: int) -> np.ndarray:
    """Standard normal draws for iterations start..start+count-1 at one slot."""
    its = np.arange(start, start + count, dtype=np.uint64)
    return ppnd16(uniform_at(key, its, variate))


def chi2_grid(key: np.uint64, start: int, count: int, nu: int) -> np.ndarray:
    its = np.arange(start, start + count, dtype=np.uint64)
    return chi2_draws(key, its, nu)


def chi2_draws(key: np.uint64, iterations: np.ndarray, nu: int) -> np.ndarray:
    """Chi-square(nu) draws from the reserved variate band of each iteration.

    Marsaglia-Tsang rejection for Gamma(nu/2), doubled.  Sub-slot 0 of the
    band holds the shape-boost uniform (consumed only when nu == 1);
    attempt t reads sub-slots 1+2t and 2+2t.  The attempt budget fails
    with probability < 1e-40 per draw; exhausted lanes fall back to a
    fixed positive value so the function stays total.
    """
    a = 0.5 * nu
    boosted = a < 1.0
    d = (a + 1.0 if boosted else a) - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)

    n = iterations.size
    gamma = np.full(n, d)
    alive = np.arange(n)
    for t in range(CHI2_MAX_ATTEMPTS):
        its = iterations[alive]
        x = ppnd16(uniform_at(key, its, CHI2_BAND + np.uint64(1 + 2 * t)))
        u2 = uniform_at(key, its, CHI2_BAND + np.uint64(2 + 2 * t))
        tt = 1.0 + c * x
        v = tt * tt * tt
        vsafe = np.where(tt > 0.0, v, 1.0)
        ok = (tt > 0.0) & (np.log(u2) < 0.5 * x * x + d - d * vsafe + d * np.log(vsafe))
        gamma[alive[ok]] = d * v[ok]
        alive = alive[~ok]
        if alive.size == 0:
            break
    if boosted:
        u0 = uniform_at(key, iterations, CHI2_BAND)
        gamma = gamma * u0 ** (1.0 / a)
    return 2.0 * gamma


def binom_inverse(u: np.ndarray, m: int, p: np.ndarray) -> np.ndarray:
    """Per-lane Binomial(m, p) quantile at u via CDF inversion.

    Plain pmf recurrence while (1-p)^m stays normal; log-space recurrence
    otherwise, which is immune to zero-probability underflow at the low
    counts.  Scan order is identical in the numba backend.
    """
    n = u.size
    counts = np.zeros(n, dtype=np.int64)
    if m == 0:
        return counts
    p = np.minimum(np.maximum(p, 0.0), 1.0)
    counts[p >= 1.0] = m
    lq = m * np.log1p(-np.minimum(p, 1.0 - 1e-16))

    sel_plain = np.nonzero((p > 0.0) & (p < 1.0) & (lq > BINOM_LOG_SWITCH))[0]
    if sel_plain.size:
        up, pp = u[sel_plain], p[sel_plain]
        ratio = pp / (1.0 - pp)
        pmf = np.exp(lq[sel_plain])
        cdf = pmf.copy()
        alive = np.nonzero(up > cdf)[0]
        k = 0
        while alive.size and k < m:
            scale = (m - k) / (k + 1.0)
            step = pmf[alive] * (scale * ratio[alive])
            pmf[alive] = step
            cdf[alive] += step
            counts[sel_plain[alive]] = k + 1
            k += 1
            alive = alive[up[alive] > cdf[alive]]

    sel_log = np.nonzero((p > 0.0) & (p < 1.0) & (lq <= BINOM_LOG_SWITCH))[0]
    if sel_log.size:
        up, pp = u[sel_log], p[sel_log]
        lratio = np.log(pp) - np.log1p(-pp)
        logpmf = lq[sel_log].copy()
        cdf = np.exp(logpmf)
        alive = np.nonzero(up > cdf)[0]
        k = 0
        while alive.size and k < m:
            lscale = np.log((m - k) / (k + 1.0))
            logpmf[alive] += lscale + lratio[alive]
            cdf[alive] += np.exp(logpmf[alive])
            counts[sel_log[alive]] = k + 1
            k += 1
            alive = alive[up[alive] > cdf[alive]]

    return counts


def simulate_fast(key, n_iter, family, nu, m_arr, thr, sqr, s1r, unit, var_arr):
    """Portfolio losses via one binomial count per homogeneous block."""
    nblocks = m_arr.size
    losses = np.empty(n_iter)
    for c0 in range(0, n_iter, _CHUNK):
        c1 = min(c0 + _CHUNK, n_iter)
        its = np.arange(c0, c1, dtype=np.uint64)
        length = its.size
        if family == FAMILY_PRODUCT:
            y = np.zeros(length)
            scale = None
        else:
            y = ppnd16(uniform_at(key, its, 0))
            scale = None
        if family == FAMILY_T:
            v = chi2_draws(key, its, nu)
            scale = np.sqrt(v / nu)
        acc = np.zeros(length)
        for b in range(nblocks):
            if family == FAMILY_PRODUCT:
                zeta = np.full(length, thr[b])
            elif family == FAMILY_T:
                zeta = (thr[b] * scale - sqr[b] * y) / s1r[b]
            else:
                zeta = (thr[b] - sqr[b] * y) / s1r[b]
            pcond = normal_cdf(zeta)
            u = uniform_at(key, its, var_arr[b])
            acc += unit[b] * binom_inverse(u, int(m_arr[b]), pcond)
        losses[c0:c1] = acc
    return losses


def simulate_naive(key, n_iter, family, nu, thr, sqr, s1r, unit):
    """Portfolio losses with one latent variable per credit per iteration."""
    ncredits = thr.size
    losses = np.empty(n_iter)
    for c0 in range(0, n_iter, _CHUNK):
        c1 = min(c0 + _CHUNK, n_iter)
        its = np.arange(c0, c1, dtype=np.uint64)
        length = its.size
        if family == FAMILY_PRODUCT:
            y = np.zeros(length)
        else:
            y = ppnd16(uniform_at(key, its, 0))
        if family == FAMILY_T:
            v = chi2_draws(key, its, nu)
            scale = np.sqrt(v / nu)
        acc = np.zeros(length)
        for i in range(ncredits):
            if family == FAMILY_PRODUCT:
                zeta = np.full(length, thr[i])
            elif family == FAMILY_T:
                zeta = (thr[i] * scale - sqr[i] * y) / s1r[i]
            else:
                zeta = (thr[i] - sqr[i] * y) / s1r[i]
            z = ppnd16(uniform_at(key, its, 2 + i))
            acc += np.where(z < zeta, unit[i], 0.0)
        losses[c0:c1] = acc
    return losses
