"""Numerical laboratory for the total population of subcritical branching
processes with immigration under regularly varying offspring or immigration.

Exact transform-domain distribution pipelines, closed-form asymptotic
constants, reproducible parallel Monte Carlo (plain and single-big-jump
importance sampling), and a config-driven experiment runner.
"""

from .asymptotics import (
    AsymptoticConstant,
    CenteringSpec,
    IidReference,
    ThresholdSpec,
    centering,
    compound_tail_constant,
    const_ld,
    const_sinf,
    const_Sn_fixed,
    const_stationary,
    const_underlying,
    expected_Sn,
    expected_Xn,
    iid_ld_reference,
    threshold,
)
from .exact import (
    ConvergenceError,
    dwass_total_progeny,
    joint_state_sum,
    pmf_Sn,
    pmf_Sn2_limit,
    pmf_T,
    pmf_Tn,
    pmf_Xn,
    pmf_X_stationary,
    pmf_Zn,
)
from .laws import (
    Bernoulli,
    DiscretePareto,
    FiniteLaw,
    Geometric,
    Law,
    LogPareto,
    PointMass,
    Poisson,
    PotterReport,
    ZeroInflatedPareto,
    parse_law,
    potter_check,
)
from .montecarlo import (
    Estimate,
    ScanRow,
    estimate_tail,
    ld_ratio_scan,
    lower_deviation_scan,
    write_scan_csv,
)
from .params import ModelParams
from .pmf import Pmf, compound, convolve, shift, tail_of
from .simulate import (
    SaturationError,
    Trajectory,
    simulate_path,
    simulate_total_progeny,
    theta_apply,
)

__version__ = "0.1.0"
