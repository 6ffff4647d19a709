"""Exact truncated laws of the process functionals.

Everything here is built from the pmf algebra: the single-ancestor
generation sizes Z_n, the truncated and full family-tree sizes T_n and T,
the population X_n and its stationary limit, the running total S_n through
its independent-term decomposition, and the residual compound S_inf.  The
module also carries two independent oracles (a joint dynamic program over
(X_m, S_m) and the cycle-lemma identity for T) used to cross-check the
transform pipeline.
"""

from __future__ import annotations

import math

import numpy as np

from .laws import Law
from .params import ModelParams
from .pmf import Pmf, compound, convolve, shift

__all__ = [
    "ConvergenceError",
    "pmf_Zn",
    "pmf_Tn",
    "pmf_T",
    "pmf_Sn",
    "pmf_Xn",
    "pmf_X_stationary",
    "pmf_Sn2_limit",
    "joint_state_sum",
    "dwass_total_progeny",
]

_MAX_ITER = 10_000

# the joint DP is quadratic in the window; keep it at oracle scale
_DP_MAX_CUTOFF = 2048


class ConvergenceError(RuntimeError):
    pass


def pmf_Zn(offspring: Law, n: int, cutoff: int) -> Pmf:
    """Law of the n-th generation size from a single ancestor."""
    if n < 0:
        raise ValueError("n must be >= 0")
    xi = Pmf.from_law(offspring, cutoff)
    z = Pmf.point(1, cutoff)
    for _ in range(n):
        z = compound(z, xi)
    return z


def _tn_step(xi: Pmf, t: Pmf) -> Pmf:
    # branching recursion: T_{j+1} = 1 + sum of xi independent copies of T_j
    return shift(compound(xi, t), 1)


def pmf_Tn(offspring: Law, n: int, cutoff: int) -> Pmf:
    """Law of the family-tree size truncated at generation n (T_0 = 1)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    xi = Pmf.from_law(offspring, cutoff)
    t = Pmf.point(1, cutoff)
    for _ in range(n):
        t = _tn_step(xi, t)
    return t


def pmf_T(offspring: Law, cutoff: int, tol: float = 1e-10, max_iter: int = _MAX_ITER) -> Pmf:
    """Law of the full family-tree size, by iterating the truncated recursion.

    Stops when consecutive iterates agree to total variation < tol on the
    window.  Subcritical offspring makes the convergence geometric.
    """
    alpha = offspring.mean()
    if not alpha < 1:
        raise ValueError(f"total progeny needs subcritical offspring, E xi = {alpha}")
    xi = Pmf.from_law(offspring, cutoff)
    t = Pmf.point(1, cutoff)
    for _ in range(max_iter):
        nxt = _tn_step(xi, t)
        dist = nxt.tv_window(t)
        t = nxt
        if dist < tol:
            return t
    raise ConvergenceError(
        f"total-progeny recursion: tv {dist:.3e} after {max_iter} iterations (tol {tol:.1e})"
    )


def pmf_Sn(
    params: ModelParams,
    n: int,
    cutoff: int,
    *,
    count_degree_cap: int | None = None,
) -> Pmf:
    """Law of S_n = X_1 + ... + X_n through the independent-term decomposition.

    The i-th immigration wave contributes a compound of the immigration law
    with the tree-size law at horizon n - i; the waves are independent, so
    S_n is their convolution.  ``count_degree_cap`` is forwarded to the
    compounding step (window masses at or below the cap stay exact because
    tree sizes are >= 1).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    xi = Pmf.from_law(params.offspring, cutoff)
    imm = Pmf.from_law(params.immigration, cutoff)
    t = Pmf.point(1, cutoff)
    acc = compound(imm, t, count_degree_cap=count_degree_cap)  # horizon 0: the wave is eta itself
    for _ in range(1, n):
        t = _tn_step(xi, t)
        acc = convolve(acc, compound(imm, t, count_degree_cap=count_degree_cap))
    return acc


def _xn_step(x: Pmf, xi: Pmf, imm: Pmf) -> Pmf:
    return convolve(compound(x, xi), imm)


def pmf_Xn(params: ModelParams, n: int, cutoff: int) -> Pmf:
    """Law of X_n from X_0 = 0."""
    if n < 0:
        raise ValueError("n must be >= 0")
    xi = Pmf.from_law(params.offspring, cutoff)
    imm = Pmf.from_law(params.immigration, cutoff)
    x = Pmf.point(0, cutoff)
    for _ in range(n):
        x = _xn_step(x, xi, imm)
    return x


def pmf_X_stationary(
    params: ModelParams, cutoff: int, tol: float = 1e-10, max_iter: int = _MAX_ITER
) -> Pmf:
    """Stationary law of the population recursion, to window TV < tol.

    The window masses contract geometrically (rate ~ alpha) down to a floor
    set by the per-iteration escape flow, roughly P(immigration > cutoff):
    with heavy immigration that flow never returns to the window, so the
    iteration stops either below tol or at that resolution floor, whichever
    comes first.  tail_mass collects the accumulated escape and therefore
    overstates the true beyond-window mass by about iterations * floor;
    pick the cutoff with that in mind.
    """
    if not params.alpha < 1:
        raise ValueError(f"stationarity needs subcritical offspring, E xi = {params.alpha}")
    xi = Pmf.from_law(params.offspring, cutoff)
    imm = Pmf.from_law(params.immigration, cutoff)
    x = Pmf.point(0, cutoff)
    prev = math.inf
    for _ in range(max_iter):
        nxt = _xn_step(x, xi, imm)
        dist = nxt.tv_window(x)
        x = nxt
        if dist < tol:
            return x
        if dist < 1e-6 and dist > 0.9995 * prev:
            # geometric contraction has bottomed out at the escape floor
            return x
        prev = dist
    raise ConvergenceError(
        f"stationary recursion: tv {dist:.3e} after {max_iter} iterations (tol {tol:.1e})"
    )


def pmf_Sn2_limit(
    params: ModelParams,
    cutoff: int,
    tol: float = 1e-10,
    n: int | None = None,
) -> Pmf:
    """Law of the residual compound: total progeny of the offspring of X.

    With n given, X_n replaces the stationary X (the finite-horizon variant);
    otherwise the stationary law is used.
    """
    if n is None:
        x = pmf_X_stationary(params, cutoff, tol)
    else:
        x = pmf_Xn(params, n, cutoff)
    xi = Pmf.from_law(params.offspring, cutoff)
    theta_x = compound(x, xi)
    t = pmf_T(params.offspring, cutoff, tol)
    return compound(theta_x, t)


# ---------------------------------------------------------------------------
# independent oracles


def joint_state_sum(offspring: Law, immigration: Law, n: int, cutoff: int) -> Pmf:
    """Law of S_n by a brute-force dynamic program over the pair (X_m, S_m).

    Direct-summation transitions only (no transforms); this is the
    independent route the decomposition pipeline is checked against.
    States with X or S beyond the window are dropped into tail_mass.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if cutoff > _DP_MAX_CUTOFF:
        raise ValueError(f"joint DP is meant for oracle windows <= {_DP_MAX_CUTOFF}")
    nn = cutoff + 1
    xi = Pmf.from_law(offspring, cutoff).masses
    eta = Pmf.from_law(immigration, cutoff).masses

    # law of (offspring of i parents) + immigration, windowed, for each i
    step = np.zeros((nn, nn))
    pow_i = np.zeros(nn)
    pow_i[0] = 1.0
    step[0] = np.convolve(pow_i, eta)[:nn]
    for i in range(1, nn):
        pow_i = np.convolve(pow_i, xi)[:nn]
        step[i] = np.convolve(pow_i, eta)[:nn]

    state = np.zeros((nn, nn))  # state[i, s] = P(X_m = i, S_m = s)
    state[0, 0] = 1.0
    for _ in range(n):
        mixed = step.T @ state  # mixed[j, s] = P(X_{m+1} = j, S_m = s)
        nxt = np.zeros((nn, nn))
        for j in range(nn):
            nxt[j, j:] = mixed[j, : nn - j]
        state = nxt
    masses = state.sum(axis=0)
    return Pmf(masses, max(0.0, 1.0 - float(masses.sum())))


def dwass_total_progeny(offspring: Law, kmax: int) -> np.ndarray:
    """P(T = k) for k <= kmax via the cycle-lemma identity (1/k) P(xi*k = k-1).

    Uses direct convolution only; independent of the transform pipeline.
    """
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    xi = np.asarray(offspring.pmf(np.arange(kmax)), dtype=np.float64)
    out = np.zeros(kmax + 1)
    conv = np.array([1.0])
    for k in range(1, kmax + 1):
        conv = np.convolve(conv, xi)[:kmax]
        out[k] = conv[k - 1] / k
    return out
