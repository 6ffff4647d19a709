"""Property-verification suites behind the ``verify`` subcommand.

Each suite exercises the invariants of one module at desk scale and
returns structured results; the CLI renders them one line per check.
The full acceptance criteria live in the pytest suite and run the same
machinery at larger windows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import asymptotics as asy
from . import exact, montecarlo
from .laws import (
    Bernoulli,
    DiscretePareto,
    FiniteLaw,
    Geometric,
    LogPareto,
    PointMass,
    Poisson,
    ZeroInflatedPareto,
)
from .params import ModelParams
from .pmf import Pmf, compound, convolve
from .simulate import simulate_path, simulate_total_progeny

__all__ = ["CheckResult", "SUITES", "run_suite"]


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str


def _check(results, suite, name, passed, detail=""):
    results.append(CheckResult(suite, name, bool(passed), detail))


def _laws_under_test():
    return [
        DiscretePareto(2.0),
        DiscretePareto(1.2),
        ZeroInflatedPareto(0.3, 2.0),
        LogPareto(2.0, 1.0),
        Bernoulli(0.5),
        Geometric(0.6),
        Poisson(0.7),
        PointMass(3),
        FiniteLaw({0: 0.6, 1: 0.2, 2: 0.2}),
    ]


def verify_regvar() -> list:
    out = []
    # mass conservation over a window grid
    worst = 0.0
    for law in _laws_under_test():
        for n in (0, 1, 17, 1000):
            pm = Pmf.from_law(law, n)
            worst = max(worst, abs(pm.window_mass + pm.tail_mass - 1.0))
    _check(out, "regvar", "mass_conservation", worst <= 1e-12, f"max drift {worst:.1e}")

    # empirical survival of inversion samples against the analytic tail
    rng = np.random.Generator(np.random.Philox(key=np.array([7, 0], dtype=np.uint64)))
    m = 1_000_000
    for law in (DiscretePareto(2.0), ZeroInflatedPareto(0.3, 2.0)):
        y = 1.0 - rng.random(m)
        vals = law.sample_survival(y)
        ok = True
        worst_z = 0.0
        for x in 2.0 ** np.arange(0, 11):
            p = law.tail(x)
            se = math.sqrt(p * (1.0 - p) / m)
            z = abs(float((vals > x).mean()) - p) / se
            worst_z = max(worst_z, z)
            ok = ok and z <= 4.0
        _check(out, "regvar", f"sampler_law[{law.to_spec()}]", ok, f"max z {worst_z:.2f}")

    # tail-index recovery on far-out grid
    ok = True
    for law in (DiscretePareto(2.0), ZeroInflatedPareto(0.3, 2.0), LogPareto(2.0, 1.0), DiscretePareto(3.0)):
        k = law.tail_index
        for x in (1e4, 1e5, 1e6):
            est = -law.log_tail(x) / math.log(x)
            ok = ok and (k - 0.1 <= est <= k + 0.1)
    _check(out, "regvar", "tail_index_recovery", ok)

    # truncated-moment ratio converges for every heavy variant and power > kappa
    ok = True
    for law in (DiscretePareto(2.0), ZeroInflatedPareto(0.3, 2.0), LogPareto(2.0, 1.0)):
        k = law.tail_index
        for power in (k + 0.5, k + 1.0):
            target = k / (power - k)
            errs = [
                abs(law.truncated_moment(power, x) / (x**power * law.tail(x)) - target)
                for x in (2.0**8, 2.0**12, 2.0**16)
            ]
            ok = ok and errs[0] >= errs[1] >= errs[2]
    _check(out, "regvar", "karamata_ratio_trend", ok)
    return out


def verify_process() -> list:
    out = []
    params = ModelParams.make(Bernoulli(0.5), FiniteLaw({0: 0.5, 1: 0.5}))
    a = simulate_path(params, 12, seed=5)
    b = simulate_path(params, 12, seed=5)
    _check(out, "process", "determinism", a == b)

    coupled = all(
        simulate_path(params, n, seed=9).s_value <= simulate_path(params, n + 1, seed=9).s_value
        for n in range(1, 10)
    )
    _check(out, "process", "monotone_coupling", coupled)

    # empirical law of X_2 against the exact window, 4 binomial SE per atom
    m = 40_000
    counts = np.zeros(8)
    for i in range(m):
        x2 = simulate_path(params, 2, seed=11, path_index=i).x_values[1]
        if x2 < 8:
            counts[x2] += 1
    exact_x2 = exact.pmf_Xn(params, 2, 64).masses[:8]
    zmax = 0.0
    for k in range(8):
        se = math.sqrt(max(exact_x2[k] * (1 - exact_x2[k]) / m, 1e-12))
        zmax = max(zmax, abs(counts[k] / m - exact_x2[k]) / se)
    _check(out, "process", "x2_empirical_law", zmax <= 4.0, f"max z {zmax:.2f}")

    # one generation of progeny from a finite law: chi-square at the 1% level
    law = FiniteLaw({0: 0.6, 1: 0.2, 2: 0.2})
    m = 30_000
    obs = np.zeros(3)
    for i in range(m):
        t = simulate_total_progeny(law, 1, seed=3, path_index=i)
        obs[t - 1] += 1
    expected = np.array([0.6, 0.2, 0.2]) * m
    chi2 = float(((obs - expected) ** 2 / expected).sum())
    _check(out, "process", "one_generation_chisq", chi2 <= 9.21, f"chi2 {chi2:.2f} df2 @1%")
    return out


def verify_exact() -> list:
    out = []
    s = Pmf(np.array([0.3, 0.3, 0.2, 0.2] + [0.0] * 28), 0.0)
    worst = 0.0
    ref = Pmf.point(0, s.cutoff)
    for k in range(1, 9):
        ref = convolve(ref, s)
        mix = compound(Pmf.point(k, s.cutoff), s)
        worst = max(worst, float(np.abs(mix.masses - ref.masses).max()))
    _check(out, "exact", "compound_point_count", worst <= 1e-12, f"Linf {worst:.1e}")

    ident = convolve(s, Pmf.point(0, s.cutoff))
    _check(out, "exact", "convolve_identity", float(np.abs(ident.masses - s.masses).max()) <= 1e-15)

    worst = 0.0
    for law in (FiniteLaw({0: 0.6, 1: 0.2, 2: 0.2}), Bernoulli(0.4)):
        t = exact.pmf_T(law, 2048, tol=1e-12)
        dw = exact.dwass_total_progeny(law, 50)
        worst = max(worst, float(np.abs(t.masses[1:51] - dw[1:51]).max()))
    _check(out, "exact", "dwass_identity", worst <= 1e-10, f"Linf {worst:.1e}")

    worst = 0.0
    fixtures = [
        (Bernoulli(0.5), FiniteLaw({0: 0.5, 1: 0.5}), 3),
        (FiniteLaw({0: 0.6, 1: 0.2, 2: 0.2}), PointMass(1), 4),
        (Bernoulli(0.3), FiniteLaw({0: 0.3, 1: 0.4, 3: 0.3}), 2),
    ]
    for off, imm, n in fixtures:
        p = ModelParams.make(off, imm)
        a = exact.pmf_Sn(p, n, 64)
        b = exact.joint_state_sum(off, imm, n, 64)
        worst = max(worst, float(np.abs(a.masses - b.masses).max()))
    _check(out, "exact", "decomposition_equivalence", worst <= 1e-10, f"Linf {worst:.1e}")

    p = ModelParams.make(Bernoulli(0.5), FiniteLaw({0: 0.5, 1: 0.5}))
    s6 = exact.pmf_Sn(p, 6, 512)
    esn = asy.expected_Sn(p, 6)
    rel = abs(s6.mean_lower - esn) / esn
    _check(out, "exact", "mean_identity_Sn", rel <= 1e-8, f"rel {rel:.1e}")
    t = exact.pmf_T(Bernoulli(0.5), 512, 1e-13)
    _check(out, "exact", "mean_identity_T", abs(t.mean_lower - 2.0) <= 1e-8)

    # truncated moments of T_n nondecreasing in n and bounded by T's
    ok = True
    tn_pmfs = [exact.pmf_Tn(Bernoulli(0.5), n, 512) for n in range(1, 7)]
    for h in (1.5, 2.0, 2.5):
        ks = np.arange(513, dtype=np.float64) ** h
        vals = [float(np.dot(ks, q.masses)) for q in tn_pmfs]
        top = float(np.dot(ks, t.masses))
        ok = ok and all(vals[i] <= vals[i + 1] + 1e-12 for i in range(len(vals) - 1))
        ok = ok and vals[-1] <= top + 1e-12
    _check(out, "exact", "moment_monotonicity", ok)

    _check(out, "exact", "sandwich_bracketing", _sandwich_ok(), "model A, n=4, eps in {0.1,0.2}")
    return out


def _sandwich_ok(cutoff: int = 4096) -> bool:
    """Certified set-algebra bracket: I1 - I3 <= P(S_n - d_n > x) <= I2 + I4."""
    params = ModelParams.make(Bernoulli(0.5), DiscretePareto(2.0))
    n = 4
    sn = exact.pmf_Sn(params, n, cutoff)
    d_n = asy.centering(params, n)
    # one immigration wave of full trees, convolved n times
    y_inf = compound(Pmf.from_law(params.immigration, cutoff), exact.pmf_T(params.offspring, cutoff))
    sn1 = y_inf
    for _ in range(n - 1):
        sn1 = convolve(sn1, y_inf)
    sn2 = exact.pmf_Sn2_limit(params, cutoff, n=n)
    d1 = n * params.beta / (1.0 - params.alpha)
    d2 = params.alpha * asy.expected_Xn(params, n) / (1.0 - params.alpha)
    for eps in (0.1, 0.2):
        for x in (64.0, 256.0, 1024.0):
            i1 = sn1.tail_of((1 + eps) * x + d1)
            i2 = sn1.tail_of((1 - eps) * x + d1)
            i3 = sn2.tail_of(eps * x + d2)
            i4 = sn2.cdf_of(d2 - eps * x)
            p = sn.tail_of(x + d_n)
            if i1[0] - i3[1] > p[1] + 1e-12:
                return False
            if p[0] > i2[1] + i4[1] + 1e-12:
                return False
    return True


def verify_asymptotics() -> list:
    out = []

    class _P:
        def __init__(self, tag, alpha, kappa, beta=1.0, p=0.0):
            self.model_tag, self.alpha, self.kappa, self.beta, self.p = tag, alpha, kappa, beta, p

    ok = True
    for alpha in (0.3, 0.5, 0.7):
        for kappa in (1.5, 2.0, 3.0):
            ok = ok and asy.const_Sn_fixed(_P("A", alpha, kappa), 1).value == 1.0
            for p in (0.0, 0.5):
                b1 = asy.const_Sn_fixed(_P("B", alpha, kappa, p=p), 1).value
                ok = ok and abs(b1 - p) <= 1e-15
    _check(out, "asymptotics", "boundary_coherence_n1", ok)

    ok = True
    worst = 0.0
    for alpha in (0.3, 0.5, 0.7):
        for kappa in (1.5, 2.0, 3.0):
            for params in (_P("A", alpha, kappa), _P("B", alpha, kappa, p=0.0), _P("B", alpha, kappa, p=0.5)):
                c = asy.const_ld(params).value
                gap4 = abs(asy.const_Sn_fixed(params, 10**4).value / 10**4 - c)
                gap3 = abs(asy.const_Sn_fixed(params, 10**3).value / 10**3 - c)
                worst = max(worst, gap4 / c)
                ok = ok and gap4 < 0.02 * c and gap4 < gap3
    _check(out, "asymptotics", "cesaro_consistency", ok, f"max rel gap {worst:.1e}")

    ok = True
    for alpha in (0.3, 0.5, 0.7):
        for n in (1, 2, 5):
            lim = asy.const_underlying(alpha, 1 + 1e-10, "Zn", n).value
            ref = asy.const_underlying(alpha, 1 + 1e-9, "Zn", n).value
            ok = ok and abs(lim - ref) <= 1e-6 * ref
    _check(out, "asymptotics", "generation_ratio_kappa1_branch", ok)

    a5 = asy.compound_tail_constant("heavy_summand", mean_count=2.0).value
    a6_c0 = asy.compound_tail_constant("comparable", mean_count=2.0, mean_summand=0.5, kappa=2.0, c=0.0).value
    a4 = asy.compound_tail_constant("heavy_count", mean_summand=0.5, kappa=2.0).value
    a6_nocount = asy.compound_tail_constant("comparable", mean_count=0.0, mean_summand=0.5, kappa=2.0, c=1.0).value
    _check(out, "asymptotics", "compound_constant_coherence", a6_c0 == a5 and a6_nocount == a4)
    return out


def verify_montecarlo() -> list:
    out = []
    params = ModelParams.make(Bernoulli(0.5), FiniteLaw({0: 0.5, 1: 0.5}))
    n, x = 3, 2.0
    target = exact.pmf_Sn(params, n, 64).tail_of(x + asy.centering(params, n))[0]

    e1 = montecarlo.estimate_tail(params, n, x, 50_000, seed=21, method="plain")
    e2 = montecarlo.estimate_tail(params, n, x, 50_000, seed=21, method="plain")
    _check(out, "montecarlo", "determinism", e1 == e2)

    zp = abs(e1.value - target) / e1.stderr
    eb = montecarlo.estimate_tail(params, n, x, 50_000, seed=22, method="bigjump")
    zb = abs(eb.value - target) / eb.stderr
    zc = abs(e1.value - eb.value) / math.hypot(e1.stderr, eb.stderr)
    _check(out, "montecarlo", "unbiasedness_vs_exact", zp <= 4 and zb <= 4 and zc <= 4,
           f"z plain {zp:.2f}, bigjump {zb:.2f}, cross {zc:.2f}")

    ez = montecarlo.estimate_tail(params, n, 40.0, 2000, seed=1, method="plain")
    _check(out, "montecarlo", "zero_hit_reporting",
           ez.value == 0.0 and ez.low_confidence and ez.ci95 == (0.0, 3.0 / 2000))

    cover = 0
    for seed in range(30):
        e = montecarlo.estimate_tail(params, n, x, 20_000, seed=seed, method="plain")
        cover += e.ci95[0] <= target <= e.ci95[1]
    _check(out, "montecarlo", "coverage_mini", cover >= 25, f"{cover}/30 intervals cover")
    return out


SUITES = {
    "regvar": verify_regvar,
    "process": verify_process,
    "exact": verify_exact,
    "asymptotics": verify_asymptotics,
    "montecarlo": verify_montecarlo,
}


def run_suite(name: str) -> list:
    """Run one suite or 'ALL'; returns the flat list of check results."""
    if name == "ALL":
        results = []
        for fn in SUITES.values():
            results.extend(fn())
        return results
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; options: {', '.join(SUITES)} or ALL")
    return SUITES[name]()
