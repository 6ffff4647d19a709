"""Monte Carlo estimation of P(S_n - d_n > x) with rigorous error reporting.

Two estimators are available:

* ``plain``   -- empirical frequency over independent trajectories.
* ``bigjump`` -- a defensive-mixture importance sampler built on the
  single-big-jump principle: with probability ``w`` one designated draw
  (an immigration slot in model A, the first first-generation offspring
  draw of one immigrant line in model B) is sampled conditioned to exceed
  a pivot, and every path is reweighted by the exact mixture likelihood
  ratio, which keeps the estimator unbiased for any w in (0,1) and bounds
  the weights by 1/(1-w).

Trajectories are simulated in fixed-size blocks; each (block, generation,
purpose) triple addresses its own counter-based stream, so results depend
only on (seed, budget), not on how blocks are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .asymptotics import ThresholdSpec, centering, const_ld, threshold
from .params import ModelParams
from .simulate import MAX_THETA_DRAWS

__all__ = [
    "Estimate",
    "ScanRow",
    "estimate_tail",
    "ld_ratio_scan",
    "lower_deviation_scan",
    "write_scan_csv",
    "SCAN_CSV_HEADER",
]

#: trajectories per stream block (fixed: results must not depend on scheduling)
BLOCK = 4096

#: defensive mixture weight
DEFAULT_W = 0.5

# values beyond here lose integer exactness in float64; treated as saturated,
# which classifies every finite threshold correctly
_FLOAT_SAFE = 2.0**53

_PURPOSE_OFFSPRING = 0
_PURPOSE_IMMIGRATION = 1
_PURPOSE_MIXTURE = 3


@dataclass(frozen=True)
class Estimate:
    """Point estimate with standard error and 95% confidence interval."""

    value: float
    stderr: float
    ci95: tuple
    budget: int
    seed: int
    method: str
    hits: int
    low_confidence: bool = False

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError("estimate must be a probability")
        if not self.ci95[0] <= self.value <= self.ci95[1]:
            raise ValueError("ci95 must contain the point estimate")


@dataclass(frozen=True)
class _BigJump:
    w: float
    pivot: float
    surv_pivot: float
    n: int
    model_tag: str


def _stream(seed: int, block: int, gen: int, purpose: int) -> np.random.Generator:
    bitgen = np.random.Philox(
        key=np.array([seed, block], dtype=np.uint64),
        counter=np.array([0, 0, gen, purpose], dtype=np.uint64),
    )
    return np.random.Generator(bitgen)


def _survival_uniforms(rng, size):
    return 1.0 - rng.random(size)


def _simulate_block(params: ModelParams, n: int, seed: int, block: int, size: int, bj):
    """One block of S_n samples; returns (s, lr) with lr = None for plain runs."""
    offspring = params.offspring
    immigration = params.immigration
    x = np.zeros(size)
    s = np.zeros(size)
    rsum = np.zeros(size)
    eta_prev = np.zeros(size)

    if bj is not None:
        rng = _stream(seed, block, 0, _PURPOSE_MIXTURE)
        tilted = rng.random(size) < bj.w
        slot = rng.integers(1, n + 1, size=size)

    model_b_jump = bj is not None and bj.model_tag == "B"

    for gen in range(1, n + 1):
        counts = x.astype(np.int64)
        monster = counts > MAX_THETA_DRAWS
        if np.any(monster):
            # such a path already has S_n >= 2^20, far above any certified
            # query level, so it is a certain hit; skip its offspring draws.
            # Model-B big-jump weights involve designated offspring draws,
            # so the shortcut is only exact for plain runs and model A.
            if bj is not None and bj.model_tag == "B":
                raise ValueError(
                    "a path outgrew the reproduction cap during a model-B "
                    "big-jump run; lower x or use method='plain'"
                )
            s = np.where(monster, np.inf, s)
            counts = np.where(monster, 0, counts)
        total = int(counts.sum())
        born = np.zeros(size)
        # the designated draw of mixture component gen-1 (model B) is the first
        # offspring draw of that generation's immigrants, placed last in each
        # path's segment
        des_ok = (eta_prev >= 1) & (counts >= 1) if (model_b_jump and gen >= 2) else None
        if total > 0:
            y = _survival_uniforms(_stream(seed, block, gen, _PURPOSE_OFFSPRING), total)
            if des_ok is not None and np.any(des_ok):
                starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
                des_idx = np.zeros(size, dtype=np.int64)
                des_idx[des_ok] = starts[des_ok] + counts[des_ok] - eta_prev[des_ok].astype(np.int64)
                tilt_here = des_ok & tilted & (slot == gen - 1)
                idx = des_idx[tilt_here]
                y[idx] = y[idx] * bj.surv_pivot
                vals = offspring.sample_survival(y)
                des_hit = np.zeros(size)
                des_hit[des_ok] = (vals[des_idx[des_ok]] > bj.pivot) / bj.surv_pivot
                rsum += np.where(des_ok, des_hit, 1.0)
                des_ok = None
            else:
                vals = offspring.sample_survival(y)
            seg = np.repeat(np.arange(size), counts)
            born = np.bincount(seg, weights=vals, minlength=size)
        if des_ok is not None:
            # no designated draw exists for any path: all components nominal
            rsum += 1.0

        y2 = _survival_uniforms(_stream(seed, block, gen, _PURPOSE_IMMIGRATION), size)
        if bj is not None and bj.model_tag == "A":
            tilt_here = tilted & (slot == gen)
            y2 = np.where(tilt_here, y2 * bj.surv_pivot, y2)
        eta = immigration.sample_survival(y2)
        if bj is not None and bj.model_tag == "A":
            rsum += (eta > bj.pivot) / bj.surv_pivot

        x_new = born + eta
        saturated = ~np.isfinite(x_new) | (x_new > _FLOAT_SAFE)
        s = s + np.where(saturated, np.inf, x_new)
        x = np.where(saturated | ~np.isfinite(s), 0.0, x_new)
        eta_prev = eta

    if bj is None:
        return s, None
    if model_b_jump:
        rsum += 1.0  # component n never has a first-generation draw inside the horizon
    lr = 1.0 / ((1.0 - bj.w) + bj.w / bj.n * rsum)
    return s, lr


def _pivot(params: ModelParams, x: float) -> float:
    # model A: a big immigrant grows by about 1/(1-alpha) through its progeny
    if params.model_tag == "A":
        return x * (1.0 - params.alpha) / 2.0
    return x / 2.0


def _clopper_pearson(hits: int, budget: int) -> tuple:
    lo = 0.0 if hits == 0 else float(stats.beta.ppf(0.025, hits, budget - hits + 1))
    hi = 1.0 if hits == budget else float(stats.beta.ppf(0.975, hits + 1, budget - hits))
    return lo, hi


def estimate_tail(
    params: ModelParams,
    n: int,
    x: float,
    budget: int,
    seed: int,
    method: str = "plain",
    w: float = DEFAULT_W,
) -> Estimate:
    """Unbiased estimate of P(S_n - d_n > x)."""
    if budget < 1000:
        raise ValueError("budget must be at least 1000")
    if x < 0:
        raise ValueError("x must be >= 0")
    if n < 1:
        raise ValueError("n must be >= 1")
    if method not in ("plain", "bigjump"):
        raise ValueError(f"unknown method {method!r}")

    d_n = centering(params, n)
    level = x + d_n
    if level >= MAX_THETA_DRAWS:
        raise ValueError(
            f"x + d_n = {level} is beyond the engine's certified range {MAX_THETA_DRAWS}"
        )

    bj = None
    if method == "bigjump":
        if not 0.0 < w < 1.0:
            raise ValueError("mixture weight w must lie in (0,1)")
        pivot = _pivot(params, x)
        surv = params.driver.tail(pivot)
        if surv <= 0.0:
            raise ValueError(
                "big-jump pivot lies beyond the driver's support; use method='plain'"
            )
        bj = _BigJump(w=w, pivot=pivot, surv_pivot=surv, n=n, model_tag=params.model_tag)

    sum_w = 0.0
    sum_w2 = 0.0
    hits = 0
    done = 0
    block = 0
    while done < budget:
        size = min(BLOCK, budget - done)
        s, lr = _simulate_block(params, n, seed, block, size, bj)
        ind = s > level
        contrib = ind.astype(np.float64) if lr is None else lr * ind
        sum_w += float(contrib.sum())
        sum_w2 += float(np.dot(contrib, contrib))
        hits += int(ind.sum())
        done += size
        block += 1

    value = sum_w / budget
    if hits == 0:
        bound = 3.0 / budget if bj is None else 3.0 / (budget * (1.0 - w))
        return Estimate(0.0, bound, (0.0, bound), budget, seed, method, 0, low_confidence=True)

    var = max(0.0, (sum_w2 - budget * value * value) / (budget - 1))
    stderr = math.sqrt(var / budget)
    if bj is None:
        if hits >= 30:
            ci = (max(0.0, value - 1.96 * stderr), min(1.0, value + 1.96 * stderr))
        else:
            ci = _clopper_pearson(hits, budget)
        return Estimate(value, stderr, ci, budget, seed, method, hits, low_confidence=hits < 30)

    if hits >= 30:
        ci = (max(0.0, value - 1.96 * stderr), min(1.0, value + 1.96 * stderr))
        low = False
    else:
        # conservative: scale the exact binomial bracket by the weight bound
        lo, hi = _clopper_pearson(hits, budget)
        ci = (0.0, min(1.0, hi / (1.0 - w)))
        low = True
    return Estimate(value, stderr, ci, budget, seed, method, hits, low_confidence=low)


# ---------------------------------------------------------------------------
# ratio scans

SCAN_CSV_HEADER = "model,n,x,method,estimate,stderr,ci_lo,ci_hi,theory_denominator,ratio,const_ld"


@dataclass(frozen=True)
class ScanRow:
    model: str
    n: int
    x: float
    method: str
    estimate: float
    stderr: float
    ci_lo: float
    ci_hi: float
    theory_denominator: float
    ratio: float
    const_ld: float

    def csv_line(self) -> str:
        return ",".join(
            [
                self.model,
                str(self.n),
                repr(self.x),
                self.method,
                repr(self.estimate),
                repr(self.stderr),
                repr(self.ci_lo),
                repr(self.ci_hi),
                repr(self.theory_denominator),
                repr(self.ratio),
                repr(self.const_ld),
            ]
        )


def write_scan_csv(rows, path) -> None:
    with open(path, "w") as fh:
        fh.write(SCAN_CSV_HEADER + "\n")
        for row in rows:
            fh.write(row.csv_line() + "\n")


def _x_grid(params, spec: ThresholdSpec | None, multipliers, x_values, n: int):
    if x_values is not None:
        return [float(v) for v in x_values]
    if spec is None:
        raise ValueError("either a ThresholdSpec with multipliers or absolute x values")
    x_n = threshold(spec, n)
    grid = []
    for m in multipliers:
        if m < 1.0:
            raise ValueError("multipliers must be >= 1 so that x >= x_n")
        grid.append(m * x_n)
    return grid


def ld_ratio_scan(
    params: ModelParams,
    n_list,
    budget: int,
    seed: int,
    method: str = "plain",
    spec: ThresholdSpec | None = None,
    multipliers=(1.0,),
    x_values=None,
) -> list:
    """Empirical P(S_n - d_n > x)/(n P(driver > x)) rows across (n, x).

    Rows share the seed, so trajectories at equal n act as common random
    numbers across the x grid.
    """
    c_ld = const_ld(params).value if params.heavy else math.nan
    rows = []
    for n in n_list:
        for x in _x_grid(params, spec, multipliers, x_values, n):
            est = estimate_tail(params, n, x, budget, seed, method)
            denom = n * params.driver.tail(x)
            rows.append(
                ScanRow(
                    model=params.model_tag,
                    n=n,
                    x=x,
                    method=method,
                    estimate=est.value,
                    stderr=est.stderr,
                    ci_lo=est.ci95[0],
                    ci_hi=est.ci95[1],
                    theory_denominator=denom,
                    ratio=est.value / denom if denom > 0 else math.nan,
                    const_ld=c_ld,
                )
            )
    return rows


def lower_deviation_scan(
    params: ModelParams,
    n_list,
    x_values,
    budget: int,
    seed: int,
) -> list:
    """Empirical P(S_n - d_n <= -x)/(n P(driver > x)) rows; expected to sink to 0.

    With kappa <= 1 the centering is zero and S_n >= 0, so the event is
    empty and the rows are exact zeros without simulation; the same applies
    whenever d_n - x < 0.
    """
    c_ld = const_ld(params).value if params.heavy else math.nan
    rows = []
    for n in n_list:
        d_n = centering(params, n)
        for x in x_values:
            x = float(x)
            if x < 0:
                raise ValueError("x must be >= 0")
            denom = n * params.driver.tail(x)
            level = d_n - x
            if params.kappa <= 1.0 or level < 0:
                est_val, stderr, ci, hits = 0.0, 0.0, (0.0, 0.0), 0
            else:
                hits = 0
                done = 0
                block = 0
                while done < budget:
                    size = min(BLOCK, budget - done)
                    s, _ = _simulate_block(params, n, seed, block, size, None)
                    hits += int((s <= level).sum())
                    done += size
                    block += 1
                est_val = hits / budget
                stderr = math.sqrt(est_val * (1.0 - est_val) / budget)
                ci = (
                    _clopper_pearson(hits, budget)
                    if hits < 30
                    else (max(0.0, est_val - 1.96 * stderr), min(1.0, est_val + 1.96 * stderr))
                )
            rows.append(
                ScanRow(
                    model=params.model_tag,
                    n=n,
                    x=x,
                    method="plain",
                    estimate=est_val,
                    stderr=stderr,
                    ci_lo=ci[0],
                    ci_hi=ci[1],
                    theory_denominator=denom,
                    ratio=est_val / denom if denom > 0 else math.nan,
                    const_ld=c_ld,
                )
            )
    return rows
