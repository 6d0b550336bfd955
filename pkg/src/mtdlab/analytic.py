"""Closed-form survival model for a hunted application container.

A population of attackers random-walks over a network of V hosts looking
for one valuable container.  The model gives the probability that the
container is still alive at time t, for a container that stays put and
for one that relocates, with an optional detection stage that lets only a
fraction of attacker visits do damage.

All functions here are pure and deterministic; randomness lives in the
lattice simulation (:mod:`mtdlab.lattice`), which cross-validates these
formulas empirically.

Time is dimensionless: t and the detection time share one tick unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

__all__ = [
    "DomainError",
    "PopulationParams",
    "DetectionParams",
    "StaticGrowth",
    "ExponentialGrowth",
    "LogisticGrowth",
    "GrowthModel",
    "SurvivalCurve",
    "attackers_at",
    "distinct_sites_visited",
    "detection_success_fraction",
    "survival_static",
    "survival_mobile",
    "survival_curve",
    "SURVIVAL_MODES",
]


class DomainError(ValueError):
    """Raised when a time argument is outside a formula's domain."""


# ───────────────────────────────────────────────────────────────────────
# Parameter types
# ───────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class PopulationParams:
    """Attacker population against a host count.

    n_hacked may be real-valued (growth laws produce fractional counts)
    and may exceed v_total; it is clamped into [0, v_total] only when the
    density is formed, since a density above 1 has no physical meaning.
    """

    n_hacked: float
    v_total: int

    def __post_init__(self) -> None:
        if self.v_total < 1:
            raise ValueError(f"v_total must be >= 1, got {self.v_total}")
        if math.isnan(self.n_hacked):
            raise ValueError("n_hacked must not be NaN")

    @property
    def hacked_density(self) -> float:
        """Clamped attacker density: min(max(N, 0), V) / V."""
        return min(max(self.n_hacked, 0.0), float(self.v_total)) / self.v_total


@dataclass(frozen=True)
class DetectionParams:
    """Detection stage configuration.

    When enabled, only the fraction 1 - exp(-t_d) of attacker visits
    succeeds unnoticed; when disabled every visit counts (fraction 1),
    which reproduces the detection-free formulas.
    """

    t_d: float = 0.0
    enabled: bool = False

    def __post_init__(self) -> None:
        if not math.isfinite(self.t_d) or self.t_d < 0:
            raise ValueError(f"t_d must be finite and >= 0, got {self.t_d}")

    @classmethod
    def off(cls) -> "DetectionParams":
        return cls(0.0, False)

    @classmethod
    def at(cls, t_d: float) -> "DetectionParams":
        return cls(t_d, True)


# ───────────────────────────────────────────────────────────────────────
# Attacker growth laws
# ───────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class StaticGrowth:
    """Fixed attacker count: N(t) = n for all t."""

    n: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.n) or self.n < 0:
            raise ValueError(f"static population must be finite and >= 0, got {self.n}")

    def population_at(self, t: float) -> float:
        return self.n


@dataclass(frozen=True)
class ExponentialGrowth:
    """Unbounded compounding: N(t) = n0 * exp(k*t)."""

    n0: float
    k: float

    def __post_init__(self) -> None:
        if self.n0 <= 0:
            raise ValueError(f"n0 must be > 0, got {self.n0}")
        if self.k < 0:
            raise ValueError(f"k must be >= 0, got {self.k}")

    def population_at(self, t: float) -> float:
        try:
            return self.n0 * math.exp(self.k * t)
        except OverflowError:
            return math.inf


@dataclass(frozen=True)
class LogisticGrowth:
    """Saturating growth toward a carrying capacity.

    N(t) = mu * n0 * exp(k*t) / (n0 * exp(k*t) + mu - n0), which runs
    from n0 at t=0 to mu as t grows.  Evaluated via the equivalent
    mu / (1 + ((mu - n0) / n0) * exp(-k*t)) so large k*t cannot overflow.
    """

    n0: float
    k: float
    mu: float

    def __post_init__(self) -> None:
        if self.n0 <= 0:
            raise ValueError(f"n0 must be > 0, got {self.n0}")
        if self.k < 0:
            raise ValueError(f"k must be >= 0, got {self.k}")
        if self.mu < self.n0:
            raise ValueError(
                f"carrying capacity mu={self.mu} must be >= initial population n0={self.n0}"
            )

    def population_at(self, t: float) -> float:
        return self.mu / (1.0 + ((self.mu - self.n0) / self.n0) * math.exp(-self.k * t))


GrowthModel = Union[StaticGrowth, ExponentialGrowth, LogisticGrowth]


def attackers_at(model: GrowthModel, t: float) -> float:
    """Attacker population under a growth law at time t >= 0.

    The result is real-valued and not clamped to any host count; clamping
    happens where a density is formed.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    return model.population_at(t)


# ───────────────────────────────────────────────────────────────────────
# Survival formulas
# ───────────────────────────────────────────────────────────────────────

def distinct_sites_visited(t: float) -> float:
    """Expected distinct hosts one random walker has visited by time t.

    Uses the two-dimensional asymptotic law pi*t/ln(t), which is singular
    at t = 1 and meaningless below; the domain is therefore t > 1.
    """
    if t <= 1:
        raise DomainError(f"distinct_sites_visited requires t > 1, got t={t}")
    return math.pi * t / math.log(t)


def detection_success_fraction(detection: DetectionParams) -> float:
    """Fraction of attacker visits that succeed without being detected.

    1 - exp(-t_d) when detection is enabled; exactly 1 when disabled, so
    the detection-free formulas fall out of the same code path.
    """
    if not detection.enabled:
        return 1.0
    return 1.0 - math.exp(-detection.t_d)


def _log_survival_static(t: float, pop: PopulationParams, detection: DetectionParams) -> float:
    """ln of the static survival probability: -(N/V) * fraction * S(t)."""
    return -pop.hacked_density * detection_success_fraction(detection) * distinct_sites_visited(t)


def survival_static(t: float, pop: PopulationParams, detection: DetectionParams) -> float:
    """Probability a non-relocating container is still alive at time t.

    exp(-(N/V) * S_eff(t)) where S_eff is the visited-host count scaled
    by the undetected-visit fraction.
    """
    return math.exp(_log_survival_static(t, pop, detection))


def survival_mobile(t: float, pop: PopulationParams, detection: DetectionParams) -> float:
    """Probability a relocating container is still alive at time t.

    ln P_mobile = (N/V)^2 * ln P_static, evaluated in log space as
    exp(-(N/V)^3 * S_eff(t)) so deep-underflow of P_static cannot zero a
    representable mobile probability.  Always >= survival_static, with
    equality exactly when N = 0 or N = V.
    """
    rho = pop.hacked_density
    return math.exp(rho * rho * _log_survival_static(t, pop, detection))


@dataclass(frozen=True)
class SurvivalCurve:
    """Ordered (t, probability) series, the plottable model output."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        prev_t = -math.inf
        for t, p in self.points:
            if t <= prev_t:
                raise ValueError(f"curve times must be strictly increasing at t={t}")
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability {p} at t={t} outside [0, 1]")
            prev_t = t

    @property
    def times(self) -> tuple[float, ...]:
        return tuple(t for t, _ in self.points)

    @property
    def probabilities(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.points)


SURVIVAL_MODES = ("static", "mobile")


def survival_curve(
    mode: str,
    growth: GrowthModel,
    v_total: int,
    detection: DetectionParams,
    t_grid: Iterable[float],
) -> SurvivalCurve:
    """Evaluate a survival probability series over a time grid.

    The attacker count is taken from the growth law at each grid point
    and clamped into [0, v_total] when the density is formed.  The grid
    must be strictly increasing with every point > 1.
    """
    if mode not in SURVIVAL_MODES:
        raise ValueError(f"mode must be one of {SURVIVAL_MODES}, got {mode!r}")
    fn = survival_static if mode == "static" else survival_mobile
    points: list[tuple[float, float]] = []
    prev_t = -math.inf
    for t in t_grid:
        if t <= 1:
            raise DomainError(f"survival grid point t={t} is outside the domain t > 1")
        if t <= prev_t:
            raise ValueError(f"time grid must be strictly increasing at t={t}")
        pop = PopulationParams(n_hacked=attackers_at(growth, t), v_total=v_total)
        points.append((float(t), fn(t, pop, detection)))
        prev_t = t
    return SurvivalCurve(points=tuple(points))
