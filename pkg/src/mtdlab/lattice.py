"""Monte Carlo pursuit on a 2-D host lattice.

N attacker walkers hunt one prey container on a width x height torus of
hosts.  Each tick every attacker hops to a uniformly random 4-neighbor;
when one lands on the prey's host the encounter resolves: a static prey
is lost, a mobile prey wins the detection race with probability
exp(-t_d) and relocates to a random attacker-free host, otherwise it is
lost.  Attacker populations may also grow over time, new attackers
appearing next to existing ones.

Trials are reproducible: trial i of an experiment draws every random
number from a private stream derived from (experiment seed, i), so the
aggregate result is independent of trial execution order.  The
empirical survival curves produced here cross-validate the closed forms
in :mod:`mtdlab.analytic`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from typing import Iterable, Sequence

import numpy as np

from .analytic import GrowthModel, StaticGrowth, attackers_at

__all__ = [
    "LatticeConfigError",
    "lattice_dims",
    "SimConfig",
    "LatticeWorld",
    "Encounter",
    "TrialOutcome",
    "EmpiricalCurve",
    "init_world",
    "step",
    "resolve_encounter",
    "run_trial",
    "run_experiment",
    "empirical_curve",
]

PREY_MODES = ("static", "mobile")

Z95 = 1.959963984540054  # two-sided 95% normal quantile


class LatticeConfigError(ValueError):
    """Simulation configuration that cannot be realized on a lattice."""


def lattice_dims(v_total: int) -> tuple[int, int]:
    """Factor a host count into a near-square (width, height), width >= height.

    The most-square factorization is used and must have aspect ratio
    width/height <= 2; other host counts are rejected so the lattice
    stays honestly two-dimensional.
    """
    if v_total < 2:
        raise LatticeConfigError(f"need at least 2 hosts, got {v_total}")
    height = next(h for h in range(isqrt(v_total), 0, -1) if v_total % h == 0)
    width = v_total // height
    if width > 2 * height:
        raise LatticeConfigError(
            f"v_total={v_total} only factors as {width}x{height}"
            f" (aspect ratio > 2); choose a host count nearer a square"
        )
    return width, height


@dataclass(frozen=True)
class SimConfig:
    """One experiment: lattice size, attacker growth, prey behavior."""

    v_total: int
    growth: GrowthModel
    mode: str
    t_d: float
    t_max: int
    trials: int
    seed: int

    def __post_init__(self) -> None:
        lattice_dims(self.v_total)
        if self.mode not in PREY_MODES:
            raise LatticeConfigError(f"mode must be one of {PREY_MODES}, got {self.mode!r}")
        if not math.isfinite(self.t_d) or self.t_d < 0:
            raise LatticeConfigError(f"t_d must be finite and >= 0, got {self.t_d}")
        if self.t_max < 1:
            raise LatticeConfigError(f"t_max must be >= 1, got {self.t_max}")
        if self.trials < 1:
            raise LatticeConfigError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise LatticeConfigError(f"seed must fit in 64 unsigned bits, got {self.seed}")

    @property
    def escape_probability(self) -> float:
        """Chance a mobile prey wins the detection race at an encounter."""
        return math.exp(-self.t_d)


class Encounter(enum.Enum):
    NO_CONTACT = "no_contact"
    ESCAPED = "escaped"
    CAPTURED = "captured"


@lru_cache(maxsize=32)
def _neighbor_table(width: int, height: int) -> np.ndarray:
    """(V, 4) table of torus 4-neighbors for flat cell indices."""
    idx = np.arange(width * height)
    x = idx % width
    y = idx // width
    table = np.stack(
        [
            y * width + (x + 1) % width,
            y * width + (x - 1) % width,
            ((y + 1) % height) * width + x,
            ((y - 1) % height) * width + x,
        ],
        axis=1,
    )
    table.setflags(write=False)
    return table


class LatticeWorld:
    """Mutable state of one trial: prey cell, attacker cells, clock.

    Cells are flat indices into the width x height torus; (x, y) maps to
    y * width + x.  The world owns the private random stream it was
    created with, so stepping it is deterministic.
    """

    __slots__ = ("width", "height", "prey_host", "predators", "tick", "rng", "_neighbors")

    def __init__(
        self,
        width: int,
        height: int,
        prey_host: int,
        predators: np.ndarray,
        rng: np.random.Generator,
    ):
        self.width = width
        self.height = height
        self.prey_host = prey_host
        self.predators = predators
        self.tick = 0
        self.rng = rng
        self._neighbors = _neighbor_table(width, height)

    @property
    def v_total(self) -> int:
        return self.width * self.height

    def cell_xy(self, cell: int) -> tuple[int, int]:
        return cell % self.width, cell // self.width

    def predator_cells(self) -> set[int]:
        return set(int(c) for c in self.predators)


def _initial_count(config: SimConfig) -> int:
    n0 = attackers_at(config.growth, 0.0)
    return int(round(n0)) if math.isfinite(n0) else config.v_total


def _target_count(config: SimConfig, t: float) -> int:
    """Attacker head count the growth law asks for at time t, capped at V-1."""
    n = attackers_at(config.growth, t)
    if math.isinf(n):
        return config.v_total - 1
    return min(int(round(n)), config.v_total - 1)


def init_world(config: SimConfig, trial_seed: int | Sequence[int]) -> LatticeWorld:
    """Place the prey and round(N(0)) attackers uniformly at random.

    Attackers land on hosts other than the prey's (several may share a
    cell).  The same trial_seed always produces the same world.
    """
    width, height = lattice_dims(config.v_total)
    v = width * height
    n0 = _initial_count(config)
    if n0 >= v:
        raise LatticeConfigError(
            f"initial attacker count {n0} must be below the host count {v}"
        )
    rng = np.random.default_rng(trial_seed)
    prey = int(rng.integers(0, v))
    draws = rng.integers(0, v - 1, size=n0)
    predators = draws + (draws >= prey)  # uniform over the v-1 non-prey cells
    return LatticeWorld(width, height, prey, predators.astype(np.int64), rng)


def resolve_encounter(
    world: LatticeWorld, config: SimConfig, rng: np.random.Generator
) -> Encounter:
    """Resolve prey/attacker co-location, if any.

    Static prey: contact is capture.  Mobile prey: with probability
    exp(-t_d) detection outruns the attacker and the prey relocates to a
    uniformly random attacker-free cell; otherwise, or when no free cell
    remains, the attacker wins.
    """
    if not (world.predators == world.prey_host).any():
        return Encounter.NO_CONTACT
    if config.mode == "static":
        return Encounter.CAPTURED
    if rng.random() >= config.escape_probability:
        return Encounter.CAPTURED
    free = np.setdiff1d(np.arange(world.v_total), world.predators, assume_unique=False)
    if free.size == 0:
        return Encounter.CAPTURED
    world.prey_host = int(free[rng.integers(0, free.size)])
    return Encounter.ESCAPED


def _spawn(world: LatticeWorld, count: int) -> None:
    """Add attackers on random attacker-free neighbors of existing ones.

    With no attackers alive yet (a growth law starting below 0.5) the
    first spawn seeds uniformly on a non-prey cell.  Spawning stops
    early if no attacker has a free neighbor left.
    """
    for _ in range(count):
        if world.predators.size == 0:
            v = world.v_total
            draw = int(world.rng.integers(0, v - 1))
            cell = draw + (draw >= world.prey_host)
        else:
            occupied = np.unique(world.predators)
            adjacent = np.unique(world._neighbors[occupied].ravel())
            candidates = np.setdiff1d(adjacent, occupied, assume_unique=True)
            if candidates.size == 0:
                return
            cell = int(candidates[world.rng.integers(0, candidates.size)])
        world.predators = np.append(world.predators, np.int64(cell))


def step(world: LatticeWorld, config: SimConfig) -> Encounter:
    """Advance one tick: walk every attacker, grow the pack, resolve contact."""
    rng = world.rng
    if world.predators.size:
        directions = rng.integers(0, 4, size=world.predators.size)
        world.predators = world._neighbors[world.predators, directions]
    if not isinstance(config.growth, StaticGrowth):
        target = _target_count(config, world.tick + 1)
        deficit = target - world.predators.size
        if deficit > 0:
            _spawn(world, deficit)
    outcome = resolve_encounter(world, config, rng)
    world.tick += 1
    return outcome


@dataclass(frozen=True)
class TrialOutcome:
    survived: bool
    capture_tick: int | None
    migrations: int

    def __post_init__(self) -> None:
        if self.survived != (self.capture_tick is None):
            raise ValueError("capture_tick must be present exactly when captured")


def run_trial(config: SimConfig, trial_index: int) -> TrialOutcome:
    """Run one trial on the private stream derived from (seed, trial_index)."""
    world = init_world(config, (config.seed, trial_index))
    migrations = 0
    for _ in range(config.t_max):
        outcome = step(world, config)
        if outcome is Encounter.ESCAPED:
            migrations += 1
        elif outcome is Encounter.CAPTURED:
            return TrialOutcome(survived=False, capture_tick=world.tick, migrations=migrations)
    return TrialOutcome(survived=True, capture_tick=None, migrations=migrations)


@dataclass(frozen=True)
class EmpiricalCurve:
    """Per-tick surviving fraction with a 95% CI half-width."""

    points: tuple[tuple[int, float, float], ...]

    def __post_init__(self) -> None:
        prev = 1.0 + 1e-12
        for _, fraction, _ in self.points:
            if not 0.0 <= fraction <= 1.0:
                raise ValueError(f"surviving fraction {fraction} outside [0, 1]")
            if fraction > prev:
                raise ValueError("surviving fraction must be non-increasing")
            prev = fraction

    @property
    def ticks(self) -> tuple[int, ...]:
        return tuple(t for t, _, _ in self.points)

    @property
    def fractions(self) -> tuple[float, ...]:
        return tuple(f for _, f, _ in self.points)

    @property
    def half_widths(self) -> tuple[float, ...]:
        return tuple(w for _, _, w in self.points)

    @property
    def final_fraction(self) -> float:
        return self.points[-1][1]


def empirical_curve(outcomes: Iterable[TrialOutcome], t_max: int) -> EmpiricalCurve:
    """Aggregate trial outcomes into a survival curve over ticks 0..t_max."""
    capture_ticks = [
        o.capture_tick if o.capture_tick is not None else t_max + 1 for o in outcomes
    ]
    trials = len(capture_ticks)
    captured_at = np.bincount(capture_ticks, minlength=t_max + 2)
    captured_by = np.cumsum(captured_at)
    points = []
    for tick in range(t_max + 1):
        fraction = 1.0 - captured_by[tick] / trials
        half_width = Z95 * math.sqrt(fraction * (1.0 - fraction) / trials)
        points.append((tick, float(fraction), float(half_width)))
    return EmpiricalCurve(points=tuple(points))


def run_experiment(config: SimConfig) -> EmpiricalCurve:
    """Run config.trials independent trials and aggregate the curve.

    Every trial owns its own random stream, so the result does not
    depend on the order (or concurrency) in which trials execute.
    """
    outcomes = [run_trial(config, i) for i in range(config.trials)]
    return empirical_curve(outcomes, config.t_max)
