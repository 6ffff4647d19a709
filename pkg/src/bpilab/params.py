"""Model parameter bundle for the branching-with-immigration process.

Two asymptotic regimes are distinguished by ``model_tag``:

* tag ``A`` -- heavy immigration, light offspring.  The tail driver is the
  immigration law and ``kappa`` is its regular-variation index.  Light
  immigration is also accepted under tag A (``kappa = inf``); exact and
  Monte Carlo machinery works unchanged, only the regularly-varying
  asymptotic constants become unavailable.
* tag ``B`` -- heavy offspring with ``kappa > 1``; immigration is either
  light (comparability constant ``p = 0``) or tail-comparable with the
  offspring law (``p`` = limit ratio of the two survivals).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

from .laws import Law, parse_law

__all__ = ["ModelParams"]


@dataclass(frozen=True)
class ModelParams:
    offspring: Law
    immigration: Law
    model_tag: str
    alpha: float  # mean offspring
    beta: float  # mean immigration
    kappa: float  # tail index of the driver; inf when both laws are light
    p: float  # tail-comparability constant (model B), 0 otherwise
    delta_moment: float  # recorded moment-gap parameter, validation only

    @classmethod
    def make(
        cls,
        offspring: Law | str,
        immigration: Law | str,
        model_tag: str | None = None,
        p: float | None = None,
        delta_moment: float = 1.0,
    ) -> "ModelParams":
        if isinstance(offspring, str):
            offspring = parse_law(offspring)
        if isinstance(immigration, str):
            immigration = parse_law(immigration)
        alpha = offspring.mean()
        beta = immigration.mean()
        # simulation and fixed-n exact laws are well defined for any mean
        # offspring; subcriticality (0 < alpha < 1) is enforced by the
        # consumers that need it (stationarity, total progeny, asymptotics)
        if not (math.isfinite(alpha) and alpha >= 0.0):
            raise ValueError(f"offspring mean must be finite, got {alpha}")
        if immigration.pmf(0) >= 1.0:
            raise ValueError("immigration must not be identically zero")
        if delta_moment <= 0:
            raise ValueError("delta_moment must be positive")

        k_off = offspring.tail_index
        k_imm = immigration.tail_index

        if model_tag is None:
            model_tag = "B" if k_off is not None else "A"
        if model_tag not in ("A", "B"):
            raise ValueError(f"model_tag must be 'A' or 'B', got {model_tag!r}")

        if model_tag == "A":
            if k_off is not None:
                raise ValueError("model A needs a light offspring law")
            kappa = k_imm if k_imm is not None else math.inf
            p_val = 0.0
            if p not in (None, 0, 0.0):
                raise ValueError("comparability constant p applies to model B only")
        else:
            if k_off is None:
                raise ValueError("model B needs a regularly varying offspring law")
            if k_off <= 1:
                raise ValueError("model B needs offspring tail index kappa > 1")
            kappa = k_off
            p_val = _comparability(offspring, immigration, p)
            if not math.isfinite(beta):
                raise ValueError("model B needs finite mean immigration")

        return cls(
            offspring=offspring,
            immigration=immigration,
            model_tag=model_tag,
            alpha=float(alpha),
            beta=float(beta),
            kappa=float(kappa),
            p=float(p_val),
            delta_moment=float(delta_moment),
        )

    @property
    def driver(self) -> Law:
        """Law whose tail normalizes the asymptotic ratios."""
        return self.immigration if self.model_tag == "A" else self.offspring

    @property
    def heavy(self) -> bool:
        return math.isfinite(self.kappa)

    def digest(self) -> str:
        """Stable checksum of the parameter set."""
        text = "|".join(
            [
                self.offspring.to_spec(),
                self.immigration.to_spec(),
                self.model_tag,
                repr(self.p),
                repr(self.delta_moment),
            ]
        )
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def _comparability(offspring: Law, immigration: Law, p_given: float | None) -> float:
    """Tail-comparability constant of immigration against offspring."""
    k_imm = immigration.tail_index
    if k_imm is None:
        return 0.0 if p_given is None else _check_p(p_given, expect_zero=True)
    k_off = offspring.tail_index
    if k_imm > k_off:
        # immigration tail strictly lighter: moment condition holds with p = 0
        return 0.0 if p_given is None else _check_p(p_given, expect_zero=True)
    if k_imm < k_off:
        raise ValueError("immigration tail heavier than offspring tail: not model B")
    prof_i = immigration._rv_profile()
    prof_o = offspring._rv_profile()
    if prof_i is None or prof_o is None:
        if p_given is None:
            raise ValueError(
                "cannot derive the comparability constant for these laws; pass p explicitly"
            )
        return _check_p(p_given, expect_zero=False)
    if prof_i[2] != prof_o[2]:
        # equal power index but different slowly varying factors: the tail
        # ratio has no finite positive limit, so neither admissible regime holds
        raise ValueError(
            "immigration and offspring tails are not comparable (slowly varying "
            "factors differ); model B admits lighter immigration or a constant tail ratio"
        )
    derived = prof_i[0] / prof_o[0]
    if p_given is not None:
        if abs(p_given - derived) > 1e-9 * max(1.0, derived):
            raise ValueError(f"given p={p_given} conflicts with derived value {derived}")
        return float(p_given)
    return float(derived)


def _check_p(p: float, expect_zero: bool) -> float:
    p = float(p)
    if p < 0:
        raise ValueError("p must be >= 0")
    if expect_zero and p != 0.0:
        raise ValueError("immigration tail is lighter than offspring: p must be 0")
    if not expect_zero and p == 0.0:
        raise ValueError("tail-comparable immigration needs p > 0")
    return p
