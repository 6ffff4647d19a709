"""Closed-form constants, centerings, thresholds: hand values and coherence."""

import math

import pytest

from bpilab import (
    Bernoulli,
    CenteringSpec,
    DiscretePareto,
    ModelParams,
    PointMass,
    ThresholdSpec,
    centering,
    compound_tail_constant,
    const_ld,
    const_sinf,
    const_Sn_fixed,
    const_stationary,
    const_underlying,
    expected_Sn,
    iid_ld_reference,
    threshold,
)


class _Stub:
    """Bare parameter bundle for formula-level checks."""

    def __init__(self, tag, alpha, kappa, beta=1.0, p=0.0):
        self.model_tag = tag
        self.alpha = alpha
        self.kappa = kappa
        self.beta = beta
        self.p = p


class TestUnderlying:
    def test_generation_one_is_offspring(self):
        assert const_underlying(0.5, 2.0, "Zn", 1).value == pytest.approx(1.0)

    def test_generation_two(self):
        assert const_underlying(0.5, 2.0, "Zn", 2).value == pytest.approx(0.75)

    def test_tree_values(self):
        assert const_underlying(0.5, 2.0, "Tn", 2).value == pytest.approx(2.75)
        assert const_underlying(0.5, 2.0, "T").value == pytest.approx(8.0)

    def test_kappa_at_most_one_rejected(self):
        with pytest.raises(ValueError):
            const_underlying(0.5, 1.0, "Zn", 2)
        with pytest.raises(ValueError):
            const_underlying(0.5, 0.8, "T")

    def test_removable_singularity_branch(self):
        # analytic limit n * alpha^(n-1) against the nearby direct evaluation
        for alpha in (0.3, 0.5, 0.7):
            for n in (1, 2, 5, 9):
                lim = const_underlying(alpha, 1 + 1e-10, "Zn", n).value
                direct = const_underlying(alpha, 1 + 1e-9, "Zn", n).value
                assert lim == pytest.approx(n * alpha ** (n - 1), rel=1e-12)
                assert lim == pytest.approx(direct, rel=1e-6)


class TestStationary:
    def test_model_a(self):
        assert const_stationary(_Stub("A", 0.5, 2.0)).value == pytest.approx(4 / 3)

    def test_model_b(self):
        assert const_stationary(_Stub("B", 0.5, 2.0, beta=1.0, p=0.0)).value == pytest.approx(8 / 3)
        assert const_stationary(_Stub("B", 0.5, 2.0, beta=1.0, p=1.0)).value == pytest.approx(4.0)

    def test_light_driver_rejected(self):
        p = ModelParams.make(Bernoulli(0.5), PointMass(1))
        with pytest.raises(ValueError):
            const_stationary(p)


class TestFixedN:
    def test_model_a_values(self):
        assert const_Sn_fixed(_Stub("A", 0.5, 2.0), 1).value == 1.0
        assert const_Sn_fixed(_Stub("A", 0.5, 2.0), 3).value == pytest.approx(6.3125)

    def test_model_b_small_n(self):
        # only the i=2, m=0 term survives at n=2
        assert const_Sn_fixed(_Stub("B", 0.5, 2.0, beta=1.0, p=0.0), 2).value == pytest.approx(1.0)
        assert const_Sn_fixed(_Stub("B", 0.5, 2.0, beta=1.0, p=0.25), 1).value == pytest.approx(0.25)

    def test_boundary_coherence(self):
        for alpha in (0.3, 0.5, 0.7):
            for kappa in (1.5, 2.0, 3.0):
                assert const_Sn_fixed(_Stub("A", alpha, kappa), 1).value == 1.0
                for p in (0.0, 0.5):
                    b = const_Sn_fixed(_Stub("B", alpha, kappa, p=p), 1).value
                    assert b == pytest.approx(p, abs=1e-15)

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
    @pytest.mark.parametrize("kappa", [1.5, 2.0, 3.0])
    def test_cesaro_consistency(self, alpha, kappa):
        stubs = [
            _Stub("A", alpha, kappa),
            _Stub("B", alpha, kappa, beta=1.0, p=0.0),
            _Stub("B", alpha, kappa, beta=1.0, p=0.5),
        ]
        for stub in stubs:
            c = const_ld(stub).value
            gap4 = abs(const_Sn_fixed(stub, 10**4).value / 10**4 - c)
            gap3 = abs(const_Sn_fixed(stub, 10**3).value / 10**3 - c)
            assert gap4 < 0.02 * c
            assert gap4 < gap3


class TestLargeDeviationConstant:
    def test_values(self):
        assert const_ld(_Stub("A", 0.5, 2.0)).value == pytest.approx(4.0)
        assert const_ld(_Stub("B", 0.5, 2.0, beta=1.0, p=0.0)).value == pytest.approx(8.0)
        assert const_ld(_Stub("B", 0.5, 2.0, beta=1.0, p=0.5)).value == pytest.approx(10.0)


class TestResidual:
    def test_model_a(self):
        assert const_sinf(_Stub("A", 0.5, 2.0)).value == pytest.approx(4 / 3)

    def test_model_b(self):
        val = const_sinf(_Stub("B", 0.5, 2.0, beta=1.0, p=0.0)).value
        assert val == pytest.approx(8.0 + 32.0 / 3.0)

    def test_vanishes_with_alpha(self):
        assert const_sinf(_Stub("A", 1e-9, 2.0)).value == pytest.approx(0.0, abs=1e-17)


class TestCompoundConstants:
    def test_values(self):
        assert compound_tail_constant("heavy_count", mean_summand=0.5, kappa=2.0).value == 0.25
        assert compound_tail_constant("heavy_summand", mean_count=2.0).value == 2.0
        assert compound_tail_constant(
            "comparable", mean_count=2.0, mean_summand=0.5, kappa=2.0, c=1.0
        ).value == 2.25

    def test_coherence(self):
        a5 = compound_tail_constant("heavy_summand", mean_count=2.0).value
        a6 = compound_tail_constant("comparable", mean_count=2.0, mean_summand=0.5, kappa=2.0, c=0.0).value
        assert a6 == a5
        a4 = compound_tail_constant("heavy_count", mean_summand=0.5, kappa=2.0).value
        a6b = compound_tail_constant("comparable", mean_count=0.0, mean_summand=0.5, kappa=2.0, c=1.0).value
        assert a6b == a4


class TestCentering:
    def test_zero_rule_below_one(self):
        p = ModelParams.make(Bernoulli(0.5), DiscretePareto(0.8))
        for n in (1, 5, 50):
            assert centering(p, n) == 0.0
        assert CenteringSpec(0.8).rule == "zero"
        assert CenteringSpec(2.0).rule == "mean"

    def test_mean_rule(self):
        p = ModelParams.make(Bernoulli(0.5), PointMass(1))
        assert centering(p, 2) == pytest.approx(2.5)

    def test_expected_sn_against_exact_means(self, model_a_small):
        from bpilab import pmf_Sn

        for n in (1, 2, 4, 8):
            s = pmf_Sn(model_a_small, n, 1024)
            assert expected_Sn(model_a_small, n) == pytest.approx(s.mean_lower, rel=1e-9)

    def test_linear_growth_bounded_gap(self):
        p = ModelParams.make(Bernoulli(0.5), PointMass(1))
        # ES_n - 2n approaches -2 * alpha/(1-alpha) * ... : stays bounded
        gaps = [expected_Sn(p, n) - 2 * n for n in (10, 20, 40)]
        assert all(abs(g) < 2.1 for g in gaps)
        assert abs(gaps[-1] - gaps[-2]) < 1e-5


class TestThreshold:
    def test_power_rule(self):
        assert threshold(ThresholdSpec(2.0, 0.1), 100) == pytest.approx(100**0.6)
        assert 15.84 < threshold(ThresholdSpec(2.0, 0.1), 100) < 15.85

    def test_sqrtlog_rule(self):
        val = threshold(ThresholdSpec(3.0, 1.5), 100)
        assert val == pytest.approx(math.sqrt(1.5 * 100 * math.log(100)))
        assert 26.2 < val < 26.3

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            ThresholdSpec(3.0, 0.5)  # a <= kappa - 2
        with pytest.raises(ValueError):
            ThresholdSpec(2.0, 0.0)  # delta must be positive
        with pytest.raises(ValueError):
            threshold(ThresholdSpec(3.0, 1.5), 1)  # sqrtlog needs n >= 2

    def test_regimes(self):
        assert ThresholdSpec(2.0, 0.3).regime == "power"
        assert ThresholdSpec(2.5, 1.0).regime == "sqrtlog"


class TestIidReference:
    def test_nonnegative_law(self):
        ref = iid_ld_reference(2.5, 1.0, 0.0)
        assert (ref.p_pos, ref.q_neg) == (1.0, 0.0)
        assert ref.centering_rule == "mean"
        assert ref.threshold_spec(1.0).regime == "sqrtlog"
        ref15 = iid_ld_reference(1.5, 1.0, 0.0)
        assert ref15.threshold_spec(0.1).regime == "power"

    def test_symmetric(self):
        ref = iid_ld_reference(1.5, 0.5, 0.5)
        assert ref.p_pos == ref.q_neg == 0.5

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            iid_ld_reference(2.0, 0.7, 0.2)
