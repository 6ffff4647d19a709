"""Acceptance criteria, one test per criterion, at the stated tolerances.

Each check prints one PASS/FAIL line (run with ``pytest -s`` to see them
live).  The heavy shared artifact -- the exact laws of S_n at cutoff 2^17
for the canonical heavy-immigration instance -- is built once per session.

Criterion 6 carries a deliberate expected failure in its final-value band:
see the test docstring for the measured numbers and the cross-checks.
"""

import math
import time

import numpy as np
import pytest

from bpilab import (
    Bernoulli,
    DiscretePareto,
    FiniteLaw,
    Geometric,
    ModelParams,
    PointMass,
    Pmf,
    Poisson,
    ThresholdSpec,
    ZeroInflatedPareto,
    centering,
    const_ld,
    const_Sn_fixed,
    const_stationary,
    const_underlying,
    convolve,
    dwass_total_progeny,
    estimate_tail,
    joint_state_sum,
    lower_deviation_scan,
    pmf_Sn,
    pmf_T,
    pmf_Tn,
    pmf_X_stationary,
    pmf_Zn,
    threshold,
)

MODEL_A = ModelParams.make(Bernoulli(0.5), DiscretePareto(2.0))
MODEL_B = ModelParams.make(ZeroInflatedPareto(0.3, 2.0), FiniteLaw({0: 0.5, 1: 0.5}))
MODEL_SMALL = ModelParams.make(Bernoulli(0.5), FiniteLaw({0: 0.5, 1: 0.5}))

BIG_CUTOFF = 1 << 17


def _report(criterion: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    print(f"ACCEPTANCE {criterion}: {status}" + (f"  [{detail}]" if detail else ""))


@pytest.fixture(scope="session")
def sn_big():
    """Exact S_n laws for the heavy model-A instance at cutoff 2^17."""
    return {n: pmf_Sn(MODEL_A, n, BIG_CUTOFF) for n in (4, 8, 16)}


def test_criterion_01_decomposition_equivalence():
    """12 finite-support fixtures: decomposition vs joint DP, Linf <= 1e-10."""
    started = time.time()
    offsprings = [
        Bernoulli(0.5),
        Bernoulli(0.3),
        FiniteLaw({0: 0.6, 1: 0.2, 2: 0.2}),
        FiniteLaw({0: 0.7, 2: 0.3}),
    ]
    immigrations = [
        PointMass(1),
        FiniteLaw({0: 0.5, 1: 0.5}),
        FiniteLaw({0: 0.3, 1: 0.4, 3: 0.3}),
    ]
    ns = [2, 3, 4, 5, 6, 3, 4, 2, 6, 5, 3, 4]
    worst = 0.0
    cases = [(o, i) for o in offsprings for i in immigrations]
    assert len(cases) == 12
    for (off, imm), n in zip(cases, ns):
        params = ModelParams.make(off, imm)
        a = pmf_Sn(params, n, 64)
        b = joint_state_sum(off, imm, n, 64)
        worst = max(worst, float(np.abs(a.masses - b.masses).max()))
    elapsed = time.time() - started
    ok = worst <= 1e-10 and elapsed < 10.0
    _report("1 decomposition-equivalence", ok, f"Linf {worst:.2e}, {elapsed:.1f}s")
    assert worst <= 1e-10
    assert elapsed < 10.0


def test_criterion_02_dwass_cross_check():
    """Recursion vs cycle-lemma identity, k <= 50, five offspring laws."""
    started = time.time()
    laws = [
        FiniteLaw({0: 0.6, 1: 0.2, 2: 0.2}),
        Bernoulli(0.4),
        Geometric(0.6),
        Poisson(0.7),
        ZeroInflatedPareto(0.3, 2.0),
    ]
    worst = 0.0
    for law in laws:
        t = pmf_T(law, 1024, tol=1e-12)
        dw = dwass_total_progeny(law, 50)
        worst = max(worst, float(np.abs(t.masses[1:51] - dw[1:51]).max()))
    elapsed = time.time() - started
    ok = worst <= 1e-10 and elapsed < 5.0
    _report("2 dwass-cross-check", ok, f"Linf {worst:.2e}, {elapsed:.1f}s")
    assert worst <= 1e-10
    assert elapsed < 5.0


def test_criterion_03_underlying_tail_ratios():
    """Z_2, T_2, T tail ratios against P(xi > x) for heavy offspring."""
    started = time.time()
    xi = ZeroInflatedPareto(0.3, 2.0)
    alpha = xi.mean()
    cutoff = 1 << 15
    targets = [
        ("Z2", pmf_Zn(xi, 2, cutoff), const_underlying(alpha, 2.0, "Zn", 2).value),
        ("T2", pmf_Tn(xi, 2, cutoff), const_underlying(alpha, 2.0, "Tn", 2).value),
        ("T", pmf_T(xi, cutoff, tol=1e-10), const_underlying(alpha, 2.0, "T").value),
    ]
    all_ok = True
    details = []
    for name, pmf, const in targets:
        errs = [abs(pmf.tail_of(x)[1] / xi.tail(x) - const) for x in (2**8, 2**10, 2**12)]
        ok = errs[0] >= errs[1] >= errs[2] and errs[2] <= 0.15 * const
        details.append(f"{name} rel {errs[2] / const:.3%}")
        all_ok = all_ok and ok
    elapsed = time.time() - started
    all_ok = all_ok and elapsed < 300.0
    _report("3 underlying-tail-ratios", all_ok, ", ".join(details) + f", {elapsed:.0f}s")
    assert all_ok


def test_criterion_04_stationary_tail_ratio():
    """Stationary population tail against immigration tail, model A.

    The ratio uses the certified lower bound: the iteration's tail_mass
    accumulates escape flow that cannot re-enter the window, so the upper
    bound drifts high while the window masses are the converged law.
    """
    started = time.time()
    x_st = pmf_X_stationary(MODEL_A, BIG_CUTOFF, tol=1e-10)
    const = const_stationary(MODEL_A).value  # 4/3
    errs = [abs(x_st.tail_of(x)[0] / MODEL_A.immigration.tail(x) - const) for x in (2**8, 2**10, 2**12)]
    elapsed = time.time() - started
    ok = errs[0] >= errs[1] >= errs[2] and errs[2] <= 0.10 * const and elapsed < 120.0
    _report("4 stationary-tail-ratio", ok, f"rel err {errs[2] / const:.3%}, {elapsed:.0f}s")
    assert errs[0] >= errs[1] >= errs[2]
    assert errs[2] <= 0.10 * const
    assert elapsed < 120.0


def test_criterion_05_fixed_n_ratios():
    """Fixed-n total-population tail ratios, both models."""
    started = time.time()
    cutoff = 1 << 15
    # model A, n = 3, against the immigration tail
    s3 = pmf_Sn(MODEL_A, 3, cutoff)
    c_a = const_Sn_fixed(MODEL_A, 3).value  # 6.3125
    errs_a = [abs(s3.tail_of(x)[1] / MODEL_A.immigration.tail(x) - c_a) for x in (2**8, 2**10, 2**12)]
    ok_a = errs_a[0] >= errs_a[1] >= errs_a[2] and errs_a[2] <= 0.10 * c_a
    # model B, n = 2, against the offspring tail; asserted as a normalized
    # ratio (the limit itself is beta * 1 = 0.5 for this immigration law)
    s2 = pmf_Sn(MODEL_B, 2, cutoff)
    c_b = const_Sn_fixed(MODEL_B, 2).value
    ratio_b = s2.tail_of(2**12)[1] / MODEL_B.offspring.tail(2**12)
    ok_b = abs(ratio_b / c_b - 1.0) <= 0.15
    elapsed = time.time() - started
    ok = ok_a and ok_b and elapsed < 600.0
    _report(
        "5 fixed-n-ratios",
        ok,
        f"A rel {errs_a[2] / c_a:.3%}, B normalized {ratio_b / c_b:.4f}, {elapsed:.0f}s",
    )
    assert ok_a
    assert ok_b
    assert elapsed < 600.0


def test_criterion_06_large_deviation_trend(sn_big):
    """Centered large-deviation ratio drifts toward (1-a)^-kappa = 4."""
    started = time.time()
    spec = ThresholdSpec(2.0, 0.1)
    gaps = []
    ratios = []
    for n in (4, 8, 16):
        x = 4.0 * threshold(spec, n)
        d_n = centering(MODEL_A, n)
        ratio = sn_big[n].tail_of(x + d_n)[1] / (n * MODEL_A.immigration.tail(x))
        ratios.append(ratio)
        gaps.append(abs(ratio - 4.0))
    elapsed = time.time() - started
    trend_ok = gaps[0] >= gaps[1] >= gaps[2]
    _report(
        "6 large-deviation-trend",
        trend_ok and elapsed < 1200.0,
        f"ratios {[round(r, 3) for r in ratios]}, gaps {[round(g, 3) for g in gaps]}, {elapsed:.0f}s",
    )
    assert trend_ok
    assert elapsed < 1200.0


def test_criterion_06b_large_deviation_final_band(sn_big):
    """Final ratio claimed to land in [2.8, 5.2]: fails as specified.

    At n = 16, x = 4 * 16^0.6 = 21.11, d_16 = ES_16 = 49.35, the exact
    ratio is 0.086553 / (16 * 22^-2) = 2.618, confirmed independently by
    the joint dynamic program (2.6182) and plain Monte Carlo at 4e5 paths
    (2.618 +/- 0.013).  The stated band starts at 2.8 and is reached only
    for x around 6 x_n and beyond at this n; with the pinned parameters
    the band cannot be met by a correct implementation, so this check is
    expected to stay red.
    """
    spec = ThresholdSpec(2.0, 0.1)
    x = 4.0 * threshold(spec, 16)
    d = centering(MODEL_A, 16)
    ratio = sn_big[16].tail_of(x + d)[1] / (16 * MODEL_A.immigration.tail(x))
    ok = 2.8 <= ratio <= 5.2
    _report("6b large-deviation-final-band", ok, f"final ratio {ratio:.4f} vs [2.8, 5.2]")
    assert 2.8 <= ratio <= 5.2, (
        f"final ratio {ratio:.4f} lies outside the stated band [2.8, 5.2]; "
        "verified against the joint DP and Monte Carlo (see docstring)"
    )


def test_criterion_07_iid_reference():
    """Centered 4-fold convolution of a regularly varying law: ratio -> 1."""
    started = time.time()
    law = DiscretePareto(2.5)
    base = Pmf.from_law(law, 1 << 15)
    conv = base
    for _ in range(3):
        conv = convolve(conv, base)
    d = 4 * law.mean()
    x = 2**12
    ratio = conv.tail_of(x + d)[1] / (4 * law.tail(x))
    elapsed = time.time() - started
    ok = abs(ratio - 1.0) <= 0.10 and elapsed < 60.0
    _report("7 iid-reference", ok, f"ratio {ratio:.4f}, {elapsed:.0f}s")
    assert abs(ratio - 1.0) <= 0.10
    assert elapsed < 60.0


def test_criterion_08_monte_carlo_coverage():
    """95% intervals cover the exact value in >= 90 of 100 seeds, per method."""
    started = time.time()
    n, x = 3, 2.0
    target = pmf_Sn(MODEL_SMALL, n, 64).tail_of(x + centering(MODEL_SMALL, n))[0]
    counts = {}
    for method in ("plain", "bigjump"):
        cover = 0
        for seed in range(100):
            est = estimate_tail(MODEL_SMALL, n, x, budget=20_000, seed=seed, method=method)
            cover += est.ci95[0] <= target <= est.ci95[1]
        counts[method] = cover
    elapsed = time.time() - started
    ok = all(v >= 90 for v in counts.values()) and elapsed < 600.0
    _report("8 monte-carlo-coverage", ok, f"{counts}, {elapsed:.0f}s")
    assert counts["plain"] >= 90
    assert counts["bigjump"] >= 90
    assert elapsed < 600.0


def test_criterion_09_bigjump_efficiency(sn_big):
    """At an exactly known probability <= 1e-6, bigjump beats plain 9/10 seeds."""
    started = time.time()
    n, x = 4, 6000.0
    exact_lo, exact_hi = sn_big[n].tail_of(x + centering(MODEL_A, n))
    assert exact_hi <= 1e-6
    wins = 0
    for seed in range(10):
        plain = estimate_tail(MODEL_A, n, x, budget=100_000, seed=seed, method="plain")
        bigjump = estimate_tail(MODEL_A, n, x, budget=100_000, seed=seed, method="bigjump")
        wins += bigjump.stderr <= plain.stderr
    elapsed = time.time() - started
    ok = wins >= 9 and elapsed < 300.0
    _report("9 bigjump-efficiency", ok, f"wins {wins}/10, target {exact_hi:.2e}, {elapsed:.0f}s")
    assert wins >= 9
    assert elapsed < 300.0


def test_criterion_10_cesaro_identities():
    """|const_Sn_fixed(n)/n - const_ld| below 2% at n = 10^4, both models."""

    class _Stub:
        def __init__(self, tag, alpha, kappa, beta=1.0, p=0.0):
            self.model_tag, self.alpha, self.kappa, self.beta, self.p = tag, alpha, kappa, beta, p

    started = time.time()
    worst = 0.0
    for alpha in (0.3, 0.5, 0.7):
        for kappa in (1.5, 2.0, 3.0):
            stubs = [
                _Stub("A", alpha, kappa),
                _Stub("B", alpha, kappa, beta=1.0, p=0.0),
                _Stub("B", alpha, kappa, beta=1.0, p=0.5),
            ]
            for stub in stubs:
                c = const_ld(stub).value
                gap = abs(const_Sn_fixed(stub, 10**4).value / 10**4 - c) / c
                worst = max(worst, gap)
    elapsed = time.time() - started
    ok = worst < 0.02 and elapsed < 1.0
    _report("10 cesaro-identities", ok, f"max rel gap {worst:.2e}, {elapsed:.2f}s")
    assert worst < 0.02
    assert elapsed < 1.0


def test_criterion_11_lower_deviations(sn_big):
    """Left deviations: exact zeros for kappa <= 1, vanishing ratios at kappa = 2.

    The criterion leaves the threshold exponent free; delta = 0.75 is the
    documented choice (nontrivial nonzero rows that still sit inside the
    bound; smaller exponents probe a regime the limit theorem does not
    control at these n).
    """
    started = time.time()
    # kappa <= 1: the event {S_n - 0 <= -x} is empty
    p_light = ModelParams.make(Bernoulli(0.5), DiscretePareto(0.8), model_tag="A")
    rows = lower_deviation_scan(p_light, [4, 8], [1.0, 4.0], budget=1000, seed=1)
    zeros_ok = all(r.estimate == 0.0 and r.stderr == 0.0 for r in rows)

    spec = ThresholdSpec(2.0, 0.75)
    bound = 0.1 * const_ld(MODEL_A).value
    ratios = []
    for n in (4, 8, 16):
        x = threshold(spec, n)
        d_n = centering(MODEL_A, n)
        num = sn_big[n].cdf_of(d_n - x)[1]
        ratios.append(num / (n * MODEL_A.immigration.tail(x)))
    trend_ok = ratios[0] >= ratios[1] >= ratios[2]
    below_ok = all(r < bound for r in ratios)
    elapsed = time.time() - started
    ok = zeros_ok and trend_ok and below_ok and elapsed < 600.0
    _report(
        "11 lower-deviations",
        ok,
        f"ratios {[f'{r:.2e}' for r in ratios]} < {bound}, {elapsed:.0f}s",
    )
    assert zeros_ok
    assert trend_ok
    assert below_ok
    assert elapsed < 600.0
