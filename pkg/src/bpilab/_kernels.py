"""Low-level numeric kernels behind the pmf algebra.

The compounding kernel evaluates the count generating function
``G(z) = sum_k c_k z^k`` at the discrete-transform values of the
zero-padded summand pmf (one Horner sweep per frequency, fixed summation
order, so results do not depend on how frequencies are scheduled across
threads).  numba is used when available; a blocked pure-numpy fallback
keeps everything working (slower) without it.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap

    prange = range

# Frequencies per Horner lane block; small enough to live in registers/L1,
# wide enough for the compiler to vectorize across lanes.
_LANES = 16


@njit(parallel=True, cache=True)
def _horner_at_points(coeffs, zre, zim, out_re, out_im):  # pragma: no cover - jit
    """out = sum_k coeffs[k] * z**k, Horner order within each point."""
    deg = coeffs.shape[0] - 1
    n = zre.shape[0]
    nblocks = (n + _LANES - 1) // _LANES
    for b in prange(nblocks):
        lo = b * _LANES
        hi = min(lo + _LANES, n)
        w = hi - lo
        xr = np.empty(_LANES)
        xi = np.empty(_LANES)
        ar = np.empty(_LANES)
        ai = np.empty(_LANES)
        for t in range(w):
            xr[t] = zre[lo + t]
            xi[t] = zim[lo + t]
            ar[t] = coeffs[deg]
            ai[t] = 0.0
        for k in range(deg - 1, -1, -1):
            ck = coeffs[k]
            for t in range(w):
                tr = ar[t] * xr[t] - ai[t] * xi[t] + ck
                ai[t] = ar[t] * xi[t] + ai[t] * xr[t]
                ar[t] = tr
        for t in range(w):
            out_re[lo + t] = ar[t]
            out_im[lo + t] = ai[t]


def _horner_at_points_numpy(coeffs, z):
    """Blocked numpy Horner fallback (identical summation order)."""
    out = np.empty_like(z)
    block = 8192
    for lo in range(0, z.shape[0], block):
        zb = z[lo : lo + block]
        acc = np.full_like(zb, coeffs[-1])
        for k in range(coeffs.shape[0] - 2, -1, -1):
            acc *= zb
            acc += coeffs[k]
        out[lo : lo + block] = acc
    return out


def count_pgf_at(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Evaluate the polynomial with real coefficients ``coeffs`` at complex ``z``.

    Coefficients are a (sub)probability vector, so with |z| <= 1 the Horner
    recursion is backward stable with error ~ eps * sum(k * c_k).
    """
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    if coeffs.shape[0] == 0:
        return np.zeros_like(z)
    if not HAVE_NUMBA:
        return _horner_at_points_numpy(coeffs, z)
    zre = np.ascontiguousarray(z.real)
    zim = np.ascontiguousarray(z.imag)
    out_re = np.empty_like(zre)
    out_im = np.empty_like(zim)
    _horner_at_points(coeffs, zre, zim, out_re, out_im)
    return out_re + 1j * out_im


@njit(cache=True)
def binomial_thinning_rows(count_masses, q, keep, n_out, out):  # pragma: no cover - jit
    """Accumulate sum_c count[c] * keep^c * Binomial(c, q)[m] into out[0..n_out].

    Each count atom c spreads over a band around c*q; band entries below
    ``peak * 1e-21`` are dropped (the lost mass stays in the caller's
    escape bookkeeping).  Serial on purpose: deterministic accumulation order.
    """
    nc = count_masses.shape[0]
    kept = 0.0
    if count_masses[0] > 0.0:
        out[0] += count_masses[0]
        kept += count_masses[0]
    logq = np.log(q)
    log1q = np.log1p(-q)
    logkeep = np.log(keep) if keep < 1.0 else 0.0
    ratio = q / (1.0 - q)
    inv_ratio = (1.0 - q) / q
    recip = np.empty(nc + 1)
    recip[0] = 0.0
    for m in range(1, nc + 1):
        recip[m] = 1.0 / m
    for c in range(1, nc):
        cc = count_masses[c]
        if cc <= 0.0:
            continue
        m0 = int(c * q)
        if m0 > c:
            m0 = c
        lpeak = (
            math.lgamma(c + 1.0)
            - math.lgamma(m0 + 1.0)
            - math.lgamma(c - m0 + 1.0)
            + m0 * logq
            + (c - m0) * log1q
            + c * logkeep
        )
        peak = np.exp(lpeak)
        floor_val = peak * 1e-21
        v = peak
        m = m0
        while m <= c and v > floor_val:
            if m <= n_out:
                contrib = cc * v
                out[m] += contrib
                kept += contrib
            m += 1
            if m > c:
                break
            v = v * ratio * ((c - m + 1.0) * recip[m])
        m = m0 - 1
        v = peak * inv_ratio * (m0 * (1.0 / (c - m0 + 1.0)))
        while m >= 0 and v > floor_val:
            if m <= n_out:
                contrib = cc * v
                out[m] += contrib
                kept += contrib
            v = v * inv_ratio * (m * (1.0 / (c - m + 1.0)))
            m -= 1
    return kept


def warm_up() -> None:
    """Trigger jit compilation of the hot kernels on tiny inputs."""
    if not HAVE_NUMBA:
        return
    c = np.array([0.5, 0.5])
    z = np.array([0.1 + 0.2j, 0.3 - 0.1j])
    count_pgf_at(c, z)
    out = np.zeros(8)
    binomial_thinning_rows(np.array([0.25, 0.5, 0.25]), 0.5, 1.0, 7, out)
