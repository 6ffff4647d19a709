"""Forward simulation of the immigration recursion and the underlying trees.

Random streams are counter-based (Philox): a draw group is addressed by
(seed, path index, generation, purpose), so any generation of any path can
be regenerated without replaying the rest.  Accumulators saturate with an
explicit error instead of wrapping: heavy tails make astronomically large
samples possible and silent wraparound would corrupt tail estimates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .laws import Law
from .params import ModelParams

__all__ = [
    "SaturationError",
    "Trajectory",
    "stream",
    "theta_apply",
    "simulate_path",
    "simulate_total_progeny",
]

#: largest parent count a single reproduction step will draw for
MAX_THETA_DRAWS = 1 << 20

#: explicit 64-bit saturation bound for integer accumulators
INT_SATURATION = 2**63 - 1

_PURPOSE_OFFSPRING = 0
_PURPOSE_IMMIGRATION = 1
_PURPOSE_PROGENY = 2


class SaturationError(OverflowError):
    """An integer accumulator left the 64-bit safe range."""


def stream(seed: int, path_index: int, generation: int, purpose: int) -> np.random.Generator:
    """Counter-based stream addressed by (seed, path, generation, purpose)."""
    bitgen = np.random.Philox(
        key=np.array([seed, path_index], dtype=np.uint64),
        counter=np.array([0, 0, generation, purpose], dtype=np.uint64),
    )
    return np.random.Generator(bitgen)


def _survival_uniforms(rng: np.random.Generator, size: int) -> np.ndarray:
    # 1 - U is uniform on (0, 1]; survival inversion is well defined at 1
    return 1.0 - rng.random(size)


def theta_apply(offspring: Law, k: int, rng: np.random.Generator) -> int:
    """Sum of k independent offspring draws; k = 0 consumes no randomness."""
    if k < 0:
        raise ValueError("parent count must be >= 0")
    if k == 0:
        return 0
    if k > MAX_THETA_DRAWS:
        raise ValueError(
            f"parent count {k} exceeds the per-step draw bound {MAX_THETA_DRAWS}; "
            "this indicates a mis-scaled experiment"
        )
    vals = offspring.sample_survival(_survival_uniforms(rng, k))
    if not np.all(np.isfinite(vals)):
        raise SaturationError("offspring draw beyond the 64-bit range")
    total = float(vals.sum())
    if total >= 2**53:
        # float sum may be inexact up here; redo exactly
        total = sum(int(v) for v in vals)
    if total > INT_SATURATION:
        raise SaturationError("offspring sum beyond the 64-bit range")
    return int(total)


def _draw_immigration(immigration: Law, rng: np.random.Generator) -> int:
    val = float(immigration.sample_survival(_survival_uniforms(rng, 1))[0])
    if not np.isfinite(val) or val > INT_SATURATION:
        raise SaturationError("immigration draw beyond the 64-bit range")
    return int(val)


@dataclass(frozen=True)
class Trajectory:
    """One realized path X_1..X_n with its running total."""

    x_values: tuple
    s_value: int
    seed: int
    params_digest: str

    def __post_init__(self):
        if sum(self.x_values) != self.s_value:
            raise ValueError("s_value must equal the sum of x_values")


def simulate_path(params: ModelParams, n: int, seed: int, path_index: int = 0) -> Trajectory:
    """Run the immigration recursion from X_0 = 0 for n generations."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x = 0
    xs = []
    s = 0
    for gen in range(1, n + 1):
        born = theta_apply(params.offspring, x, stream(seed, path_index, gen, _PURPOSE_OFFSPRING))
        eta = _draw_immigration(params.immigration, stream(seed, path_index, gen, _PURPOSE_IMMIGRATION))
        x = born + eta
        s += x
        if x > INT_SATURATION or s > INT_SATURATION:
            raise SaturationError("population accumulator beyond the 64-bit range")
        xs.append(x)
    return Trajectory(tuple(xs), s, seed, params.digest())


def simulate_total_progeny(
    offspring: Law, generations: int, seed: int, path_index: int = 0
) -> int:
    """Sample the family-tree size of one ancestor truncated at `generations`."""
    if generations < 1:
        raise ValueError("generations must be >= 1")
    z = 1
    total = 1
    for gen in range(1, generations + 1):
        if z == 0:
            break
        z = theta_apply(offspring, z, stream(seed, path_index, gen, _PURPOSE_PROGENY))
        total += z
        if total > INT_SATURATION:
            raise SaturationError("progeny accumulator beyond the 64-bit range")
    return total
