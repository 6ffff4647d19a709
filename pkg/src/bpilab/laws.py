"""Nonnegative integer-valued laws with regularly varying or light tails.

Heavy variants (``DiscretePareto``, ``LogPareto``, ``ZeroInflatedPareto``)
expose closed-form survival functions so tail probabilities far below the
float underflow threshold remain available in log space.  Every law also
supports deterministic inverse-transform sampling through the survival
function: ``sample_u(law, u)`` returns ``min{k : P(X > k) < u}``, which has
exactly the law's distribution when ``u`` is uniform on (0, 1).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special as sc
from scipy import stats

__all__ = [
    "Law",
    "DiscretePareto",
    "LogPareto",
    "ZeroInflatedPareto",
    "Bernoulli",
    "Geometric",
    "Poisson",
    "PointMass",
    "FiniteLaw",
    "PotterReport",
    "potter_check",
    "parse_law",
]

# Integer sampling saturates here; anything larger is astronomically outside
# every window this package works with.
SAMPLE_SATURATION = 2**62

_E = math.e


def _check_x(x) -> float:
    x = float(x)
    if x < 0:
        raise ValueError(f"tail argument must be >= 0, got {x}")
    return x


def _check_u(u) -> float:
    u = float(u)
    if not 0.0 < u < 1.0:
        raise ValueError(f"uniform variate must lie in (0,1), got {u}")
    return u


class Law:
    """Base class: a probability law on the nonnegative integers."""

    #: smallest support point
    support_min: int = 0
    #: regular-variation index kappa, or None for light-tailed laws
    tail_index: float | None = None

    # -- survival / pmf -------------------------------------------------

    def tail(self, x) -> float:
        """P(X > x) for real x >= 0."""
        raise NotImplementedError

    def log_tail(self, x) -> float:
        """log P(X > x); -inf where the survival vanishes."""
        t = self.tail(x)
        return math.log(t) if t > 0 else -math.inf

    def pmf(self, k):
        """P(X = k) for integer k (vectorized over arrays)."""
        raise NotImplementedError

    def pmf_array(self, n: int) -> np.ndarray:
        """Masses at 0..n as a vector (the window of a truncated pmf)."""
        return np.asarray(self.pmf(np.arange(n + 1)), dtype=np.float64)

    def survival_array(self, n: int) -> np.ndarray:
        """P(X > k) for k = 0..n."""
        out = np.empty(n + 1)
        for k in range(n + 1):
            out[k] = self.tail(k)
        return out

    # -- moments ---------------------------------------------------------

    def mean(self) -> float:
        """EX, possibly math.inf."""
        raise NotImplementedError

    def truncated_moment(self, power: float, x: float) -> float:
        """E(X^power ; X <= x) by direct summation over the support."""
        if power <= 0:
            raise ValueError("power must be positive")
        x = float(x)
        if x < 0:
            raise ValueError("truncation point must be >= 0")
        top = int(math.floor(x))
        total = 0.0
        chunk = 1 << 20
        for lo in range(max(self.support_min, 1), top + 1, chunk):
            hi = min(lo + chunk - 1, top)
            ks = np.arange(lo, hi + 1, dtype=np.float64)
            total += float(np.dot(ks**power, self.pmf(np.arange(lo, hi + 1))))
        return total

    def log_plus_moment(self) -> float:
        """E log^+ X = sum_{k>=2} log(k) P(X=k), with tail remainder control."""
        raise NotImplementedError

    # -- sampling ---------------------------------------------------------

    def sample_u(self, u) -> int:
        """Deterministic inverse-transform sample from a uniform(0,1) variate."""
        u = _check_u(u)
        v = float(self.sample_survival(np.array([u]))[0])
        if not np.isfinite(v) or v > SAMPLE_SATURATION:
            raise OverflowError("sample exceeds the 64-bit saturation bound")
        return int(v)

    def sample_survival(self, y: np.ndarray) -> np.ndarray:
        """Vectorized survival inversion, y in (0,1]; float64 output.

        Values beyond the integer-exact float range may be approximate; they
        are far past any finite window and callers treat them as saturated.
        """
        raise NotImplementedError

    # -- representation ----------------------------------------------------

    def to_spec(self) -> str:
        """Canonical grammar string; parse_law(law.to_spec()) == law."""
        raise NotImplementedError

    def __repr__(self) -> str:
        return self.to_spec()

    # internal: (coefficient, kappa, log_exponent) with
    # P(X > x) ~ coefficient * x^(-kappa) * (log x)^log_exponent
    def _rv_profile(self):
        return None


def _pareto_floor_pow(x, kappa):
    return (np.floor(x) + 1.0) ** (-kappa)


@dataclass(frozen=True, repr=False)
class DiscretePareto(Law):
    """Support {1,2,...} with P(X >= k) = k^(-kappa)."""

    kappa: float

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be > 0")
        object.__setattr__(self, "support_min", 1)
        object.__setattr__(self, "tail_index", float(self.kappa))

    def tail(self, x) -> float:
        x = _check_x(x)
        return float(_pareto_floor_pow(x, self.kappa))

    def log_tail(self, x) -> float:
        x = _check_x(x)
        return -self.kappa * math.log(math.floor(x) + 1.0)

    def pmf(self, k):
        k = np.asarray(k, dtype=np.float64)
        kk = np.where(k >= 1, k, 1.0)
        out = np.where(k >= 1, kk ** (-self.kappa) - (kk + 1.0) ** (-self.kappa), 0.0)
        return out if out.ndim else float(out)

    def survival_array(self, n: int) -> np.ndarray:
        return (np.arange(n + 1, dtype=np.float64) + 1.0) ** (-self.kappa)

    def mean(self) -> float:
        if self.kappa <= 1:
            return math.inf
        return float(sc.zeta(self.kappa, 1))

    def log_plus_moment(self) -> float:
        return _pareto_log_plus(1.0, self.kappa, self.pmf)

    def sample_survival(self, y):
        return np.floor(np.asarray(y, dtype=np.float64) ** (-1.0 / self.kappa))

    def to_spec(self) -> str:
        return f"pareto(kappa={_fmt(self.kappa)})"

    def _rv_profile(self):
        return (1.0, self.kappa, 0.0)


@dataclass(frozen=True, repr=False)
class ZeroInflatedPareto(Law):
    """P(X=0) = 1-w and P(X=k) = w (k^(-kappa) - (k+1)^(-kappa)) for k >= 1.

    The canonical subcritical heavy law: mean w*zeta(kappa) can sit below 1
    while the tail index stays at kappa.
    """

    w: float
    kappa: float

    def __post_init__(self):
        if not 0.0 < self.w < 1.0:
            raise ValueError("w must lie in (0,1)")
        if not self.kappa > 1:
            raise ValueError("kappa must be > 1")
        object.__setattr__(self, "tail_index", float(self.kappa))

    def tail(self, x) -> float:
        x = _check_x(x)
        return float(self.w * _pareto_floor_pow(x, self.kappa))

    def log_tail(self, x) -> float:
        x = _check_x(x)
        return math.log(self.w) - self.kappa * math.log(math.floor(x) + 1.0)

    def pmf(self, k):
        k = np.asarray(k, dtype=np.float64)
        heavy = self.w * (
            np.where(k >= 1, k, 1.0) ** (-self.kappa)
            - (np.where(k >= 1, k, 1.0) + 1.0) ** (-self.kappa)
        )
        out = np.where(k >= 1, heavy, 1.0 - self.w)
        return out if out.ndim else float(out)

    def survival_array(self, n: int) -> np.ndarray:
        return self.w * (np.arange(n + 1, dtype=np.float64) + 1.0) ** (-self.kappa)

    def mean(self) -> float:
        return float(self.w * sc.zeta(self.kappa, 1))

    def log_plus_moment(self) -> float:
        return _pareto_log_plus(self.w, self.kappa, self.pmf)

    def sample_survival(self, y):
        y = np.asarray(y, dtype=np.float64)
        heavy = np.floor((y / self.w) ** (-1.0 / self.kappa))
        return np.where(y > self.w, 0.0, heavy)

    def to_spec(self) -> str:
        return f"zpareto(w={_fmt(self.w)},kappa={_fmt(self.kappa)})"

    def _rv_profile(self):
        return (self.w, self.kappa, 0.0)


@dataclass(frozen=True, repr=False)
class LogPareto(Law):
    """Support {1,2,...}; survival carries a genuinely slowly varying factor.

    P(X > x) = (floor(x)+1)^(-kappa) * log(e + floor(x) + 1)^gamma / Z with
    Z = log(e+1)^gamma, so P(X > 0) = 1.  gamma is restricted to [-2, 2] and
    to the region where the survival is nonincreasing.
    """

    kappa: float
    gamma: float

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be > 0")
        if not -2.0 <= self.gamma <= 2.0:
            raise ValueError("gamma must lie in [-2, 2]")
        # survival monotone iff kappa*(e+t)log(e+t) >= gamma*t for all t >= 1;
        # the left side over t dips to ~3.145*t near t = 6
        t = np.arange(1.0, 2000.0)
        if np.any(self.kappa * (_E + t) * np.log(_E + t) < self.gamma * t):
            raise ValueError("gamma too large for kappa: survival not monotone")
        object.__setattr__(self, "support_min", 1)
        object.__setattr__(self, "tail_index", float(self.kappa))

    def _log_surv_int(self, m):
        """log P(X > m) for integer m >= 0 (vectorized)."""
        m = np.asarray(m, dtype=np.float64)
        return (
            -self.kappa * np.log(m + 1.0)
            + self.gamma * np.log(np.log(_E + m + 1.0))
            - self.gamma * math.log(math.log(_E + 1.0))
        )

    def tail(self, x) -> float:
        x = _check_x(x)
        return float(np.exp(self._log_surv_int(math.floor(x))))

    def log_tail(self, x) -> float:
        x = _check_x(x)
        return float(self._log_surv_int(math.floor(x)))

    def pmf(self, k):
        k = np.asarray(k, dtype=np.float64)
        km = np.where(k >= 1, k, 1.0)
        upper = np.exp(self._log_surv_int(km - 1.0))
        lower = np.exp(self._log_surv_int(km))
        out = np.where(k >= 1, upper - lower, 0.0)
        return out if out.ndim else float(out)

    def survival_array(self, n: int) -> np.ndarray:
        return np.exp(self._log_surv_int(np.arange(n + 1, dtype=np.float64)))

    def mean(self) -> float:
        if self.kappa <= 1:
            return math.inf
        # EX = sum_{k>=0} P(X>k); direct part plus an integral bracket
        top = 1 << 20
        ks = np.arange(top + 1, dtype=np.float64)
        main = float(np.exp(self._log_surv_int(ks)).sum())
        from scipy.integrate import quad

        z = math.log(_E + 1.0) ** self.gamma

        def env(t):
            return (t + 1.0) ** (-self.kappa) * math.log(_E + t + 1.0) ** self.gamma / z

        rem_hi, _ = quad(env, top, np.inf)
        rem_lo, _ = quad(env, top + 1, np.inf)
        return main + 0.5 * (rem_hi + rem_lo)

    def log_plus_moment(self) -> float:
        top = 1 << 20
        ks = np.arange(2, top + 1)
        main = float(np.dot(np.log(ks), self.pmf(ks)))
        from scipy.integrate import quad

        z = math.log(_E + 1.0) ** self.gamma

        def env(t):  # survival envelope / t, the Abel-summation tail term
            return (t + 1.0) ** (-self.kappa) * math.log(_E + t + 1.0) ** self.gamma / (z * t)

        rem, _ = quad(env, top, np.inf)
        return main + self.tail(top) * math.log(top + 1.0) + rem

    def sample_survival(self, y):
        # integer bisection for min k with log_surv(k) < log y; the answer is
        # >= 1 because log_surv(0) = 0, and y small enough to push the answer
        # past 2^62 converges onto the saturation bound itself
        y = np.asarray(y, dtype=np.float64)
        logy = np.log(y)
        lo = np.ones_like(y)
        hi = np.full_like(y, 2.0**62)
        for _ in range(64):
            converged = lo >= hi
            mid = np.floor((lo + hi) / 2.0)
            below = self._log_surv_int(mid) < logy
            hi = np.where(converged, hi, np.where(below, mid, hi))
            lo = np.where(converged, lo, np.where(below, lo, mid + 1.0))
        return lo

    def to_spec(self) -> str:
        return f"logpareto(kappa={_fmt(self.kappa)},gamma={_fmt(self.gamma)})"

    def _rv_profile(self):
        return (math.log(_E + 1.0) ** (-self.gamma), self.kappa, self.gamma)


@dataclass(frozen=True, repr=False)
class Bernoulli(Law):
    """P(X=1) = q, P(X=0) = 1-q."""

    q: float

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("q must lie in [0,1]")

    def tail(self, x) -> float:
        x = _check_x(x)
        return self.q if x < 1 else 0.0

    def survival_array(self, n: int) -> np.ndarray:
        out = np.zeros(n + 1)
        out[0] = self.q
        return out

    def pmf(self, k):
        k = np.asarray(k)
        out = np.where(k == 0, 1.0 - self.q, np.where(k == 1, self.q, 0.0))
        return out if out.ndim else float(out)

    def mean(self) -> float:
        return self.q

    def log_plus_moment(self) -> float:
        return 0.0

    def sample_survival(self, y):
        y = np.asarray(y, dtype=np.float64)
        return np.where(y > self.q, 0.0, 1.0)

    def to_spec(self) -> str:
        return f"bernoulli(q={_fmt(self.q)})"


@dataclass(frozen=True, repr=False)
class Geometric(Law):
    """P(X=k) = q (1-q)^k on {0,1,2,...}."""

    q: float

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise ValueError("q must lie in (0,1)")

    def tail(self, x) -> float:
        x = _check_x(x)
        return (1.0 - self.q) ** (math.floor(x) + 1.0)

    def log_tail(self, x) -> float:
        x = _check_x(x)
        return (math.floor(x) + 1.0) * math.log1p(-self.q)

    def survival_array(self, n: int) -> np.ndarray:
        return (1.0 - self.q) ** (np.arange(n + 1, dtype=np.float64) + 1.0)

    def pmf(self, k):
        k = np.asarray(k, dtype=np.float64)
        out = np.where(k >= 0, self.q * (1.0 - self.q) ** k, 0.0)
        return out if out.ndim else float(out)

    def mean(self) -> float:
        return (1.0 - self.q) / self.q

    def log_plus_moment(self) -> float:
        # sum until the geometric tail is negligible even against log k <= k
        top = max(64, int(50.0 / -math.log1p(-self.q)) + 64)
        ks = np.arange(2, top + 1)
        return float(np.dot(np.log(ks), self.pmf(ks)))

    def sample_survival(self, y):
        y = np.asarray(y, dtype=np.float64)
        return np.floor(np.log(y) / math.log1p(-self.q))

    def to_spec(self) -> str:
        return f"geom(q={_fmt(self.q)})"


@dataclass(frozen=True, repr=False)
class Poisson(Law):
    """Poisson with mean lam."""

    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be > 0")

    def _table_top(self) -> int:
        return int(self.lam + 40.0 * math.sqrt(self.lam) + 40.0)

    @property
    def _survival_table(self) -> np.ndarray:
        return _poisson_survival_table(self.lam, self._table_top())

    def tail(self, x) -> float:
        x = _check_x(x)
        return float(stats.poisson.sf(math.floor(x), self.lam))

    def log_tail(self, x) -> float:
        x = _check_x(x)
        return float(stats.poisson.logsf(math.floor(x), self.lam))

    def survival_array(self, n: int) -> np.ndarray:
        return stats.poisson.sf(np.arange(n + 1), self.lam)

    def pmf(self, k):
        out = stats.poisson.pmf(np.asarray(k), self.lam)
        return out if np.ndim(out) else float(out)

    def mean(self) -> float:
        return self.lam

    def log_plus_moment(self) -> float:
        top = self._table_top()
        ks = np.arange(2, top + 1)
        return float(np.dot(np.log(ks), stats.poisson.pmf(ks, self.lam)))

    def sample_survival(self, y):
        table = self._survival_table
        y = np.asarray(y, dtype=np.float64)
        # count of k with table[k] >= y; table is nonincreasing
        return np.searchsorted(-table, -y, side="right").astype(np.float64)

    def to_spec(self) -> str:
        return f"poisson(lambda={_fmt(self.lam)})"


@lru_cache(maxsize=64)
def _poisson_survival_table(lam: float, top: int) -> np.ndarray:
    return stats.poisson.sf(np.arange(top + 1), lam)


@dataclass(frozen=True, repr=False)
class PointMass(Law):
    """Degenerate law at a fixed nonnegative integer."""

    k: int

    def __post_init__(self):
        if self.k < 0 or int(self.k) != self.k:
            raise ValueError("point mass location must be a nonnegative integer")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "support_min", int(self.k))

    def tail(self, x) -> float:
        x = _check_x(x)
        return 1.0 if x < self.k else 0.0

    def survival_array(self, n: int) -> np.ndarray:
        return np.where(np.arange(n + 1) < self.k, 1.0, 0.0)

    def pmf(self, j):
        j = np.asarray(j)
        out = np.where(j == self.k, 1.0, 0.0)
        return out if out.ndim else float(out)

    def mean(self) -> float:
        return float(self.k)

    def log_plus_moment(self) -> float:
        return math.log(self.k) if self.k >= 1 else 0.0

    def sample_survival(self, y):
        return np.full_like(np.asarray(y, dtype=np.float64), float(self.k))

    def to_spec(self) -> str:
        return f"point({self.k})"


@dataclass(frozen=True, repr=False)
class FiniteLaw(Law):
    """Law given by an explicit finite table of atoms."""

    points: tuple  # ((k, p), ...) sorted by k

    def __init__(self, table):
        items = sorted((int(k), float(p)) for k, p in dict(table).items())
        if not items:
            raise ValueError("finite law needs at least one atom")
        if any(k < 0 for k, _ in items):
            raise ValueError("support must be nonnegative")
        if any(p < 0 for _, p in items):
            raise ValueError("masses must be nonnegative")
        total = math.fsum(p for _, p in items)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"masses must sum to 1, got {total!r}")
        object.__setattr__(self, "points", tuple(items))
        object.__setattr__(self, "support_min", items[0][0])

    @property
    def _ks(self):
        return np.array([k for k, _ in self.points])

    @property
    def _ps(self):
        return np.array([p for _, p in self.points])

    def tail(self, x) -> float:
        x = _check_x(x)
        return float(self._ps[self._ks > x].sum())

    def survival_array(self, n: int) -> np.ndarray:
        grid = np.arange(n + 1)[:, None]
        return (self._ps[None, :] * (self._ks[None, :] > grid)).sum(axis=1)

    def pmf(self, k):
        k = np.asarray(k)
        out = np.zeros(k.shape if k.ndim else (1,))
        flat = np.atleast_1d(k)
        for kk, pp in self.points:
            out[flat == kk] = pp
        return out if k.ndim else float(out[0])

    def mean(self) -> float:
        return float(np.dot(self._ks, self._ps))

    def log_plus_moment(self) -> float:
        ks = self._ks
        mask = ks >= 2
        return float(np.dot(np.log(ks[mask]), self._ps[mask]))

    def sample_survival(self, y):
        ks = self._ks
        surv = 1.0 - np.cumsum(self._ps)  # P(X > ks[i])
        y = np.asarray(y, dtype=np.float64)
        idx = np.searchsorted(-surv, -y, side="right")
        idx = np.minimum(idx, len(ks) - 1)
        return ks[idx].astype(np.float64)

    def to_spec(self) -> str:
        inner = ",".join(f"{k}:{_fmt(p)}" for k, p in self.points)
        return f"finite({inner})"


# ---------------------------------------------------------------------------
# shared helpers


def _fmt(v: float) -> str:
    """Shortest round-trip decimal."""
    return repr(float(v))


def _pareto_log_plus(coef: float, kappa: float, pmf) -> float:
    """E log^+ X for survival coef*(floor(x)+1)^(-kappa).

    Direct sum to 2^20 plus the Abel remainder
    log(K+1) P(X>K) + sum_{k>K} P(X>k) log((k+1)/k), the latter evaluated by
    its integral form coef * K^(-kappa) * (1/kappa) up to O(K^(-kappa-1)).
    """
    top = 1 << 20
    total = 0.0
    chunk = 1 << 19
    for lo in range(2, top + 1, chunk):
        hi = min(lo + chunk - 1, top)
        ks = np.arange(lo, hi + 1)
        total += float(np.dot(np.log(ks), pmf(ks)))
    surv_top = coef * (top + 1.0) ** (-kappa)
    remainder = surv_top * math.log(top + 1.0) + coef * (top + 0.5) ** (-kappa) / kappa
    return total + remainder


@dataclass(frozen=True)
class PotterReport:
    """Outcome of a Potter-bound grid check."""

    passed: bool
    max_log_excess: float
    worst_pair: tuple | None

    def __bool__(self) -> bool:
        return self.passed


def potter_check(law: Law, A: float, delta: float, X0: float, grid) -> PotterReport:
    """Verify P(X>y)/P(X>x) <= A*max((y/x)^(-k+d), (y/x)^(-k-d)) on a grid.

    A failed bound is a legitimate negative result (it usually means X0 is
    too small for the chosen A and delta).
    """
    if law.tail_index is None:
        raise ValueError("Potter bound applies to regularly varying laws only")
    if not A > 1:
        raise ValueError("A must exceed 1")
    if not delta > 0:
        raise ValueError("delta must be positive")
    pairs = list(grid)
    if not pairs:
        raise ValueError("grid must be nonempty")
    kappa = law.tail_index
    worst = -math.inf
    worst_pair = None
    for x, y in pairs:
        if x < X0 or y < X0:
            raise ValueError(f"grid point ({x},{y}) below X0={X0}")
        lr = law.log_tail(y) - law.log_tail(x)
        t = math.log(y / x)
        log_bound = math.log(A) + max((-kappa + delta) * t, (-kappa - delta) * t)
        excess = lr - log_bound
        if excess > worst:
            worst = excess
            worst_pair = (x, y)
    return PotterReport(passed=worst <= 1e-12, max_log_excess=worst, worst_pair=worst_pair)


# ---------------------------------------------------------------------------
# law grammar
#
#   pareto(kappa=2)  zpareto(w=0.3,kappa=2)  logpareto(kappa=2,gamma=1)
#   bernoulli(q=0.5)  geom(q=0.5)  poisson(lambda=0.7)  point(3)
#   finite(0:0.6,1:0.2,2:0.2)
#
# Whitespace-insensitive; keys are case-sensitive.

_GRAMMAR = re.compile(r"^([a-z]+)\((.*)\)$")


class LawParseError(ValueError):
    pass


def _kwargs(body: str, spec: str) -> dict:
    out = {}
    if not body:
        return out
    for part in body.split(","):
        if "=" not in part:
            raise LawParseError(f"expected key=value in {spec!r}, got {part!r}")
        key, _, val = part.partition("=")
        try:
            out[key] = float(val)
        except ValueError:
            raise LawParseError(f"bad numeric value {val!r} in {spec!r}") from None
    return out


def parse_law(spec: str) -> Law:
    """Parse a law grammar string into a Law instance."""
    compact = re.sub(r"\s+", "", spec)
    m = _GRAMMAR.match(compact)
    if not m:
        raise LawParseError(f"cannot parse law spec {spec!r}")
    name, body = m.group(1), m.group(2)
    try:
        if name == "pareto":
            kw = _kwargs(body, spec)
            return DiscretePareto(kappa=kw.pop("kappa"))
        if name == "zpareto":
            kw = _kwargs(body, spec)
            return ZeroInflatedPareto(w=kw.pop("w"), kappa=kw.pop("kappa"))
        if name == "logpareto":
            kw = _kwargs(body, spec)
            return LogPareto(kappa=kw.pop("kappa"), gamma=kw.pop("gamma"))
        if name == "bernoulli":
            kw = _kwargs(body, spec)
            return Bernoulli(q=kw.pop("q"))
        if name == "geom":
            kw = _kwargs(body, spec)
            return Geometric(q=kw.pop("q"))
        if name == "poisson":
            kw = _kwargs(body, spec)
            return Poisson(lam=kw.pop("lambda"))
        if name == "point":
            try:
                return PointMass(k=int(body))
            except ValueError:
                raise LawParseError(f"point() takes one integer, got {body!r}") from None
        if name == "finite":
            table = {}
            for part in body.split(","):
                if ":" not in part:
                    raise LawParseError(f"finite() entries are k:p, got {part!r}")
                k, _, p = part.partition(":")
                table[int(k)] = float(p)
            return FiniteLaw(table)
    except KeyError as exc:
        raise LawParseError(f"missing parameter {exc} in {spec!r}") from None
    except LawParseError:
        raise
    except ValueError as exc:
        raise LawParseError(f"invalid parameters in {spec!r}: {exc}") from None
    raise LawParseError(f"unknown law name {name!r} in {spec!r}")
