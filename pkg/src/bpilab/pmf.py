"""Truncated pmf algebra with explicit tail-mass tracking.

A :class:`Pmf` stores exact masses on the window {0,...,N} plus the
probability that escaped beyond N.  Every operation routes mass it cannot
place inside the window (window escape, interactions with an input's
tail_mass, capped count degrees) into the output's ``tail_mass``, so window
masses are certified lower bounds of the true point probabilities and
``tail_of`` returns certified brackets for tail probabilities.

Compounding (the law of a random sum) evaluates the count generating
function at the discrete-transform values of the zero-padded summand pmf
and inverse-transforms, with special-cased Bernoulli counts and
{0,1}-supported summands (binomial thinning).  Padding at least doubles the
window; when the exact support of the compound fits the padded length the
transform is alias-free and the window is exact to round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .laws import Law

__all__ = ["Pmf", "PmfError", "convolve", "compound", "shift", "tail_of"]

# Clip window for transform round-off; anything more negative is a bug.
NEG_CLIP = 1e-14
MASS_SLACK = 1e-10

# Aliased mass in an inexact transform compound sits beyond this padding.
_MAX_EXACT_PAD = 1 << 18


class PmfError(ValueError):
    pass


def _next_pow2(n: int) -> int:
    return 1 << (int(n) - 1).bit_length()


@dataclass(frozen=True)
class Pmf:
    """Probability masses on {0..cutoff} plus explicit beyond-window mass."""

    masses: np.ndarray
    tail_mass: float

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=np.float64)
        if m.ndim != 1 or m.size == 0:
            raise PmfError("masses must be a nonempty 1-D vector")
        if not np.all(np.isfinite(m)):
            raise PmfError("masses must be finite")
        low = float(m.min())
        if low < -NEG_CLIP:
            raise PmfError(f"mass {low} below the -{NEG_CLIP} round-off clip")
        if low < 0.0:
            clipped = float(-m[m < 0.0].sum())
            m = np.maximum(m, 0.0)
            object.__setattr__(self, "tail_mass", max(0.0, self.tail_mass - clipped))
        if self.tail_mass < 0 or not math.isfinite(self.tail_mass):
            raise PmfError(f"tail_mass must be finite and >= 0, got {self.tail_mass}")
        total = float(m.sum()) + self.tail_mass
        if abs(total - 1.0) > MASS_SLACK:
            raise PmfError(f"masses + tail_mass = {total!r}, outside 1 +/- {MASS_SLACK}")
        m.flags.writeable = False
        object.__setattr__(self, "masses", m)

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_law(cls, law: Law, cutoff: int) -> "Pmf":
        """Window a law on {0..cutoff}; the analytic survival feeds tail_mass."""
        surv = np.asarray(law.survival_array(cutoff), dtype=np.float64)
        masses = np.empty(cutoff + 1)
        masses[0] = 1.0 - surv[0]
        masses[1:] = surv[:-1] - surv[1:]
        return cls(masses, float(surv[-1]))

    @classmethod
    def point(cls, k: int, cutoff: int) -> "Pmf":
        masses = np.zeros(cutoff + 1)
        if k <= cutoff:
            masses[k] = 1.0
            return cls(masses, 0.0)
        return cls(masses, 1.0)

    # -- basic queries -----------------------------------------------------

    @property
    def cutoff(self) -> int:
        return self.masses.size - 1

    @property
    def window_mass(self) -> float:
        return float(self.masses.sum())

    @property
    def mean_lower(self) -> float:
        """Mean of the truncated part (diagnostic; ignores tail_mass)."""
        return float(np.dot(np.arange(self.masses.size), self.masses))

    def tail_of(self, x: float) -> tuple[float, float]:
        """Certified bracket [lo, hi] for P(X > x)."""
        if x < 0:
            lo = self.window_mass
        else:
            k = int(math.floor(x))
            lo = float(self.masses[k + 1 :].sum()) if k < self.cutoff else 0.0
        return lo, min(1.0, lo + self.tail_mass)

    def cdf_of(self, x: float) -> tuple[float, float]:
        """Certified bracket for P(X <= x)."""
        if x < 0:
            return 0.0, min(1.0, self.tail_mass)
        k = min(int(math.floor(x)), self.cutoff)
        lo = float(self.masses[: k + 1].sum())
        return lo, min(1.0, lo + self.tail_mass)

    def tv_window(self, other: "Pmf") -> float:
        """Total-variation distance restricted to the shared window."""
        if other.cutoff != self.cutoff:
            raise PmfError("cutoff mismatch")
        return 0.5 * float(np.abs(self.masses - other.masses).sum())

    # -- serialization -----------------------------------------------------

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("k,mass\n")
            for k, m in enumerate(self.masses):
                fh.write(f"{k},{float(m)!r}\n")
            fh.write(f"# tail_mass={float(self.tail_mass)!r}\n")

    @classmethod
    def from_csv(cls, path) -> "Pmf":
        masses = []
        tail = None
        with open(path) as fh:
            header = fh.readline().strip()
            if header != "k,mass":
                raise PmfError(f"bad pmf csv header {header!r}")
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    key, _, val = line[1:].strip().partition("=")
                    if key.strip() == "tail_mass":
                        tail = float(val)
                    continue
                k_str, _, m_str = line.partition(",")
                if int(k_str) != len(masses):
                    raise PmfError(f"non-contiguous index {k_str} in pmf csv")
                masses.append(float(m_str))
        if tail is None:
            raise PmfError("pmf csv missing '# tail_mass=' trailer")
        return cls(np.array(masses), tail)


def _check_pair(a: Pmf, b: Pmf) -> int:
    if a.cutoff != b.cutoff:
        raise PmfError(f"cutoff mismatch: {a.cutoff} vs {b.cutoff}")
    return a.cutoff


def convolve(a: Pmf, b: Pmf) -> Pmf:
    """Exact law of the independent sum on the shared window.

    Padding exceeds the combined support, so the transform is alias-free;
    mass escaping the window plus all tail interactions goes to tail_mass.
    """
    n = _check_pair(a, b)
    pad = _next_pow2(2 * (n + 1))
    fa = np.fft.rfft(a.masses, pad)
    fb = np.fft.rfft(b.masses, pad)
    full = np.fft.irfft(fa * fb, pad)
    kept = full[: n + 1].copy()
    total = (a.window_mass + a.tail_mass) * (b.window_mass + b.tail_mass)
    tail = max(0.0, total - float(kept.sum()))
    return Pmf(kept, tail)


def shift(a: Pmf, by: int) -> Pmf:
    """Law of X + by on the same window; displaced top mass joins the tail."""
    if by < 0:
        raise PmfError("shift must be nonnegative")
    if by == 0:
        return a
    n = a.cutoff
    kept = np.zeros(n + 1)
    if by <= n:
        kept[by:] = a.masses[: n + 1 - by]
    spill = float(a.masses[max(0, n + 1 - by) :].sum())
    return Pmf(kept, a.tail_mass + spill)


def compound(count: Pmf, summand: Pmf, *, count_degree_cap: int | None = None) -> Pmf:
    """Law of sum_{i=1}^{C} W_i with C ~ count and W_i iid ~ summand.

    ``count_degree_cap`` truncates the count polynomial at the given degree
    and routes the remaining count mass to tail_mass; it is honoured only
    when the summand has no mass at 0 (then count atoms above the cap can
    only produce values above the cap, so window masses at or below the cap
    stay exact).
    """
    n = _check_pair(count, summand)
    c = count.masses
    s = summand.masses
    count_total = count.window_mass + count.tail_mass

    nz_s = np.flatnonzero(s)
    # degenerate summand windows
    if nz_s.size == 0:
        kept = np.zeros(n + 1)
        kept[0] = c[0]
        return Pmf(kept, max(0.0, count_total - c[0]))
    if nz_s.size == 1:
        return _compound_point_summand(c, count_total, int(nz_s[0]), float(s[nz_s[0]]), n)

    nz_c = np.flatnonzero(c)
    top_c = int(nz_c[-1]) if nz_c.size else 0
    if top_c <= 1:
        # Bernoulli count: closed-form mixture (binomial thinning of one draw)
        kept = c[1] * s
        kept = kept.copy()
        kept[0] += c[0]
        return Pmf(kept, max(0.0, count_total - float(kept.sum())))

    if count_degree_cap is not None and int(nz_s[0]) >= 1:
        top_c = min(top_c, int(count_degree_cap))

    if nz_s[-1] <= 1:
        # {0,1}-supported summand: banded binomial thinning, transform-free
        keep = float(s[: 2].sum())
        q = float(s[1]) / keep
        kept = np.zeros(n + 1)
        _kernels.binomial_thinning_rows(
            np.ascontiguousarray(c[: top_c + 1]), q, keep, n, kept
        )
        return Pmf(kept, max(0.0, count_total - float(kept.sum())))

    # general transform route: pad at least twice the window; when the exact
    # support spills past the padding AND either input still carries weight
    # out at its window edge, pad further (up to 32x the window, capped) so
    # the cyclic wrap-back sits below ~pad^-(kappa+1) per mass
    pad = _next_pow2(2 * (n + 1))
    exact_support = top_c * int(nz_s[-1])
    if exact_support + 1 > pad and (_tail_alive(count) or _tail_alive(summand)):
        want = _next_pow2(min(exact_support + 1, 32 * (n + 1)))
        pad = max(pad, min(_MAX_EXACT_PAD, want))
    sh = np.fft.rfft(s, pad)
    gh = _kernels.count_pgf_at(c[: top_c + 1], sh)
    full = np.fft.irfft(gh, pad)
    kept = full[: n + 1].copy()
    return Pmf(kept, max(0.0, count_total - float(kept.sum())))


def _tail_alive(p: Pmf) -> bool:
    # genuine beyond-window leakage sits far above the ~1e-16 round-off
    # floor that exact bookkeeping leaves in tail_mass
    return p.tail_mass > 1e-12 or float(p.masses[-8:].sum()) > 1e-22


def _compound_point_summand(c, count_total, a, pa, n) -> Pmf:
    """Summand concentrated at one window atom: strided count placement."""
    kept = np.zeros(n + 1)
    if a == 0:
        ks = np.arange(c.size)
        kept[0] = float(np.dot(c, pa**ks))
    else:
        kmax = min(n // a, c.size - 1)
        ks = np.arange(kmax + 1)
        kept[ks * a] = c[: kmax + 1] * pa**ks
    return Pmf(kept, max(0.0, count_total - float(kept.sum())))


def tail_of(pmf: Pmf, x: float) -> tuple[float, float]:
    """Certified bracket for P(> x); free-function alias of Pmf.tail_of."""
    return pmf.tail_of(x)
