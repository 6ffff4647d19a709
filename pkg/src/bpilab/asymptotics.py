"""Closed-form limit constants, centerings, and threshold sequences.

Each constant is the limit of a tail ratio P(object > x) / P(driver > x)
as x grows, where the driver is the immigration law (model A) or the
offspring law (model B).  Values come with a provenance string spelling
out the defining limit, so reports are self-describing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "AsymptoticConstant",
    "ThresholdSpec",
    "CenteringSpec",
    "IidReference",
    "const_underlying",
    "const_stationary",
    "const_Sn_fixed",
    "const_ld",
    "const_sinf",
    "compound_tail_constant",
    "centering",
    "expected_Xn",
    "expected_Sn",
    "threshold",
    "iid_ld_reference",
]


@dataclass(frozen=True)
class AsymptoticConstant:
    value: float
    name: str
    provenance: str

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value >= 0):
            raise ValueError(f"constant {self.name} must be finite and >= 0, got {self.value}")

    def __float__(self) -> float:
        return self.value


def _need_finite_kappa(kappa: float) -> float:
    kappa = float(kappa)
    if not math.isfinite(kappa):
        raise ValueError("this constant needs a regularly varying driver (finite kappa)")
    return kappa


def _need_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0,1), got {alpha}")
    return alpha


def const_underlying(alpha: float, kappa: float, kind: str, n: int | None = None) -> AsymptoticConstant:
    """Tail-ratio limits for the single-ancestor objects against P(xi > x).

    kind 'Zn': generation size, (a^n - a^(kn)) / (a - a^k); the removable
    singularity at kappa = 1 is evaluated by its analytic limit n * a^(n-1).
    kind 'Tn': truncated tree size, sum_{i<n} a^i ((1-a^(n-i))/(1-a))^k.
    kind 'T': full tree size, (1-a)^(-k-1).
    """
    alpha = _need_alpha(alpha)
    kappa = _need_finite_kappa(kappa)
    if kappa <= 1:
        raise ValueError("underlying tail ratios need kappa > 1")
    if kind in ("Zn", "Tn"):
        if n is None or n < 1:
            raise ValueError(f"kind {kind!r} needs n >= 1")
    if kind == "Zn":
        if kappa - 1 < 1e-8:
            value = n * alpha ** (n - 1)
        else:
            value = (alpha**n - alpha ** (kappa * n)) / (alpha - alpha**kappa)
        return AsymptoticConstant(
            value,
            f"generation_{n}_tail_ratio",
            "lim P(Z_n>x)/P(xi>x) = (a^n - a^(k n))/(a - a^k)",
        )
    if kind == "Tn":
        value = math.fsum(
            alpha**i * ((1.0 - alpha ** (n - i)) / (1.0 - alpha)) ** kappa for i in range(n)
        )
        return AsymptoticConstant(
            value,
            f"tree_{n}_tail_ratio",
            "lim P(T_n>x)/P(xi>x) = sum_{i<n} a^i ((1-a^(n-i))/(1-a))^k",
        )
    if kind == "T":
        value = (1.0 - alpha) ** (-kappa - 1.0)
        return AsymptoticConstant(
            value,
            "tree_tail_ratio",
            "lim P(T>x)/P(xi>x) = (1-a)^(-k-1)",
        )
    raise ValueError(f"unknown kind {kind!r}; expected 'Zn', 'Tn' or 'T'")


def const_stationary(params) -> AsymptoticConstant:
    """Tail-ratio limit of the stationary population against the driver."""
    alpha = _need_alpha(params.alpha)
    kappa = _need_finite_kappa(params.kappa)
    if params.model_tag == "A":
        value = 1.0 / (1.0 - alpha**kappa)
        return AsymptoticConstant(
            value,
            "stationary_tail_ratio",
            "lim P(X>x)/P(eta>x) = 1/(1-a^k)",
        )
    value = (params.beta / (1.0 - alpha) + params.p) / (1.0 - alpha**kappa)
    return AsymptoticConstant(
        value,
        "stationary_tail_ratio",
        "lim P(X>x)/P(xi>x) = (b/(1-a) + p)/(1-a^k)",
    )


def const_Sn_fixed(params, n: int) -> AsymptoticConstant:
    """Fixed-n tail-ratio limit of S_n against the driver."""
    if n < 1:
        raise ValueError("n must be >= 1")
    alpha = _need_alpha(params.alpha)
    kappa = _need_finite_kappa(params.kappa)
    heavy_terms = [((1.0 - alpha**i) / (1.0 - alpha)) ** kappa for i in range(1, n + 1)]
    if params.model_tag == "A":
        return AsymptoticConstant(
            math.fsum(heavy_terms),
            f"total_{n}_tail_ratio",
            "lim P(S_n>x)/P(eta>x) = sum_{i<=n} ((1-a^i)/(1-a))^k",
        )
    # model B: beta * sum_i sum_{m<=i-2} a^m ((1-a^(i-1-m))/(1-a))^k + p * (A-terms)
    tree_terms = []
    u = 0.0  # u_i = sum_{t=1}^{i-1} a^(i-1-t) ((1-a^t)/(1-a))^k, built recursively
    for i in range(1, n + 1):
        tree_terms.append(u)
        u = alpha * u + ((1.0 - alpha**i) / (1.0 - alpha)) ** kappa
    value = params.beta * math.fsum(tree_terms) + params.p * math.fsum(heavy_terms)
    return AsymptoticConstant(
        value,
        f"total_{n}_tail_ratio",
        "lim P(S_n>x)/P(xi>x) = b sum_i sum_{m<=i-2} a^m ((1-a^(i-1-m))/(1-a))^k"
        " + p sum_i ((1-a^i)/(1-a))^k",
    )


def const_ld(params) -> AsymptoticConstant:
    """The uniform large-deviation constant: lim P(S_n - d_n > x)/(n P(driver > x))."""
    alpha = _need_alpha(params.alpha)
    kappa = _need_finite_kappa(params.kappa)
    if params.model_tag == "A":
        return AsymptoticConstant(
            (1.0 - alpha) ** (-kappa),
            "large_deviation_ratio",
            "uniform lim P(S_n-d_n>x)/(n P(eta>x)) = (1-a)^(-k)",
        )
    value = (params.beta + params.p * (1.0 - alpha)) / (1.0 - alpha) ** (kappa + 1.0)
    return AsymptoticConstant(
        value,
        "large_deviation_ratio",
        "uniform lim P(S_n-ES_n>x)/(n P(xi>x)) = (b + p(1-a))/(1-a)^(k+1)",
    )


def const_sinf(params) -> AsymptoticConstant:
    """Tail-ratio limit of the residual compound S_inf against the driver."""
    alpha = _need_alpha(params.alpha)
    kappa = _need_finite_kappa(params.kappa)
    if params.model_tag == "A":
        value = alpha**kappa / ((1.0 - alpha) ** kappa * (1.0 - alpha**kappa))
        return AsymptoticConstant(
            value,
            "residual_tail_ratio",
            "lim P(S_inf>x)/P(eta>x) = a^k/((1-a)^k (1-a^k))",
        )
    value = params.beta * alpha / (1.0 - alpha) ** (kappa + 2.0) + (
        params.beta / (1.0 - alpha) + params.p * alpha**kappa
    ) / ((1.0 - alpha) ** kappa * (1.0 - alpha**kappa))
    return AsymptoticConstant(
        value,
        "residual_tail_ratio",
        "lim P(S_inf>x)/P(xi>x) = b a/(1-a)^(k+2)"
        " + (b/(1-a) + p a^k)/((1-a)^k (1-a^k))",
    )


def compound_tail_constant(
    regime: str,
    *,
    mean_summand: float | None = None,
    mean_count: float | None = None,
    kappa: float | None = None,
    c: float = 0.0,
) -> AsymptoticConstant:
    """Random-sum tail prefactors for sum_{i=1}^{C} W_i.

    regime 'heavy_count'  : count regularly varying, light summands;
                            prefactor (E W)^kappa against P(C > x).
    regime 'heavy_summand': heavy summands, light count;
                            prefactor E C against P(W > x).
    regime 'comparable'   : both tails comparable, P(C>x) ~ c P(W>x);
                            prefactor E C + c (E W)^kappa against P(W > x).
    """
    if regime == "heavy_count":
        if mean_summand is None or kappa is None:
            raise ValueError("heavy_count regime needs mean_summand and kappa")
        return AsymptoticConstant(
            mean_summand ** _need_finite_kappa(kappa),
            "compound_tail_heavy_count",
            "P(sum_{i<=C} W_i > x) ~ (EW)^k P(C>x)",
        )
    if regime == "heavy_summand":
        if mean_count is None:
            raise ValueError("heavy_summand regime needs mean_count")
        return AsymptoticConstant(
            float(mean_count),
            "compound_tail_heavy_summand",
            "P(sum_{i<=C} W_i > x) ~ EC P(W>x)",
        )
    if regime == "comparable":
        if mean_summand is None or mean_count is None or kappa is None:
            raise ValueError("comparable regime needs mean_summand, mean_count and kappa")
        if c < 0:
            raise ValueError("comparability constant c must be >= 0")
        return AsymptoticConstant(
            float(mean_count) + c * mean_summand ** _need_finite_kappa(kappa),
            "compound_tail_comparable",
            "P(sum_{i<=C} W_i > x) ~ (EC + c (EW)^k) P(W>x)",
        )
    raise ValueError(f"unknown regime {regime!r}")


# ---------------------------------------------------------------------------
# centering and thresholds


def expected_Xn(params, m: int) -> float:
    """EX_m = b (1 - a^m)/(1 - a), or b m at the critical mean."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if not math.isfinite(params.beta):
        raise ValueError("mean immigration is infinite")
    if params.alpha == 1.0:
        return params.beta * m
    return params.beta * (1.0 - params.alpha**m) / (1.0 - params.alpha)


def expected_Sn(params, n: int) -> float:
    """ES_n = (b/(1-a)) (n - a (1-a^n)/(1-a)), by linearity over EX_m."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not math.isfinite(params.beta):
        raise ValueError("mean immigration is infinite")
    a = params.alpha
    if a == 1.0:
        return params.beta * n * (n + 1) / 2.0
    return params.beta / (1.0 - a) * (n - a * (1.0 - a**n) / (1.0 - a))


def centering(params, n: int) -> float:
    """d_n: zero when kappa <= 1, ES_n when kappa > 1 (light laws count as kappa = inf)."""
    if params.kappa <= 1.0:
        return 0.0
    return expected_Sn(params, n)


@dataclass(frozen=True)
class CenteringSpec:
    """Which centering rule a tail index implies."""

    kappa: float

    @property
    def rule(self) -> str:
        return "zero" if self.kappa <= 1.0 else "mean"


@dataclass(frozen=True)
class ThresholdSpec:
    """Admissible threshold sequence x_n for the uniform large-deviation ratio.

    kappa <= 2 ('power' regime): x_n = n^(delta + 1/kappa), any delta > 0.
    kappa > 2  ('sqrtlog' regime): x_n = sqrt(a n log n), any a > kappa - 2.
    """

    kappa: float
    delta_or_a: float

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be > 0")
        if self.regime == "power":
            if not self.delta_or_a > 0:
                raise ValueError("power regime needs delta > 0")
        elif not self.delta_or_a > self.kappa - 2.0:
            raise ValueError("sqrtlog regime needs a > kappa - 2")

    @property
    def regime(self) -> str:
        return "power" if self.kappa <= 2.0 else "sqrtlog"


def threshold(spec: ThresholdSpec, n: int) -> float:
    """Evaluate x_n for the given spec."""
    if spec.regime == "power":
        if n < 1:
            raise ValueError("n must be >= 1")
        return float(n) ** (spec.delta_or_a + 1.0 / spec.kappa)
    if n < 2:
        raise ValueError("sqrtlog thresholds need n >= 2")
    return math.sqrt(spec.delta_or_a * n * math.log(n))


@dataclass(frozen=True)
class IidReference:
    """Reference limits for centered iid sums with regularly varying terms.

    P(sum - d_n > x) / (n P(|X| > x)) -> p and the mirrored ratio -> q,
    uniformly over x >= x_n, with the same centering and threshold rules as
    the process results.
    """

    kappa: float
    p_pos: float
    q_neg: float

    @property
    def centering_rule(self) -> str:
        return CenteringSpec(self.kappa).rule

    def threshold_spec(self, delta_or_a: float) -> ThresholdSpec:
        return ThresholdSpec(self.kappa, delta_or_a)


def iid_ld_reference(kappa: float, p_pos: float, q_neg: float) -> IidReference:
    if abs(p_pos + q_neg - 1.0) > 1e-12:
        raise ValueError("tail weights must satisfy p + q = 1")
    if p_pos < 0 or q_neg < 0:
        raise ValueError("tail weights must be nonnegative")
    return IidReference(kappa=float(kappa), p_pos=float(p_pos), q_neg=float(q_neg))
