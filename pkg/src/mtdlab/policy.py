"""Container lifecycle policy: graded response to anomaly signals.

A stateful container answers repeated anomalies with cheap in-place
rollbacks (checkpoint + restore on the same host) and escalates to a
live migration once the rollback budget is spent, treating persistence
on one host as the signal that the execution environment itself is
compromised.  A stateless container restarts first and migrates only
when an anomaly recurs on the same host after a restart.

Everything here is a simulated state machine with a configurable cost
model; no container runtime is touched.  Costs are charged per action
and accumulated as downtime, with every transition appended to the
container's event log.
"""

from __future__ import annotations

import csv
import enum
import os
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence, Union

import numpy as np

__all__ = [
    "NoCandidateError",
    "InvalidTransitionError",
    "HostDescriptor",
    "ContainerState",
    "ContainerRecord",
    "PolicyConfig",
    "Rollback",
    "Migrate",
    "Restart",
    "NoOp",
    "Action",
    "ActionRecord",
    "SESSION_LOG_HEADER",
    "logical_distance",
    "select_destination",
    "on_anomaly",
    "apply_action",
    "run_policy_session",
    "load_hosts",
    "write_session_log",
]


class NoCandidateError(ValueError):
    """No destination host other than the current one is available."""


class InvalidTransitionError(ValueError):
    """Action applied to a container whose state cannot accept it."""


# ───────────────────────────────────────────────────────────────────────
# Types
# ───────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class HostDescriptor:
    host_id: str
    config_class: str
    network_zone: str
    datacenter: str


class ContainerState(enum.Enum):
    RUNNING = "Running"
    ROLLING_BACK = "RollingBack"
    MIGRATING = "Migrating"
    RESTARTING = "Restarting"
    FAILED = "Failed"


CONTAINER_KINDS = ("stateless", "stateful")

UNIFORM_RANDOM = "uniform_random"
MAX_LOGICAL_DISTANCE = "max_logical_distance"
DESTINATION_STRATEGIES = (UNIFORM_RANDOM, MAX_LOGICAL_DISTANCE)


@dataclass(frozen=True)
class PolicyConfig:
    """Response tuning and simulated costs.

    Time costs are toolkit defaults in milliseconds; the dump and image
    sizes document the payload a real migration would move and feed the
    session log metadata only.
    """

    rollback_limit: int = 3
    destination_strategy: str = UNIFORM_RANDOM
    checkpoint_cost_ms: float = 40.0
    restore_cost_ms: float = 60.0
    migration_downtime_ms: float = 500.0
    restart_cost_ms: float = 30.0
    memory_dump_mb: float = 10.0
    image_size_mb: float = 500.0

    def __post_init__(self) -> None:
        if self.rollback_limit < 1:
            raise ValueError(f"rollback_limit must be >= 1, got {self.rollback_limit}")
        if self.destination_strategy not in DESTINATION_STRATEGIES:
            raise ValueError(f"unknown destination strategy {self.destination_strategy!r}")
        for name in ("checkpoint_cost_ms", "restore_cost_ms", "migration_downtime_ms",
                     "restart_cost_ms", "memory_dump_mb", "image_size_mb"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class Rollback:
    pass


@dataclass(frozen=True)
class Migrate:
    destination: str


@dataclass(frozen=True)
class Restart:
    pass


@dataclass(frozen=True)
class NoOp:
    pass


Action = Union[Rollback, Migrate, Restart, NoOp]


@dataclass(frozen=True)
class ActionRecord:
    """One applied action, as written to the session log."""

    tick: int
    action: str
    source_host: str
    dest_host: str
    rollback_count: int
    downtime_ms: float


@dataclass
class ContainerRecord:
    container_id: str
    kind: str
    current_host: str
    state: ContainerState = ContainerState.RUNNING
    rollback_count: int = 0
    cumulative_downtime: float = 0.0
    event_log: list[ActionRecord] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.kind not in CONTAINER_KINDS:
            raise ValueError(f"kind must be one of {CONTAINER_KINDS}, got {self.kind!r}")


# ───────────────────────────────────────────────────────────────────────
# Destination selection
# ───────────────────────────────────────────────────────────────────────

def logical_distance(a: HostDescriptor, b: HostDescriptor) -> int:
    """Count of differing attributes among config class, zone, datacenter."""
    return (
        (a.config_class != b.config_class)
        + (a.network_zone != b.network_zone)
        + (a.datacenter != b.datacenter)
    )


def select_destination(
    current: HostDescriptor,
    hosts: Sequence[HostDescriptor],
    strategy: str,
    rng: np.random.Generator,
) -> str:
    """Pick a migration destination among hosts other than the current one.

    uniform_random draws uniformly; max_logical_distance takes the host
    most unlike the current one (ties broken by smallest host_id), which
    makes re-applying the same exploit on the destination least likely.
    """
    candidates = [h for h in hosts if h.host_id != current.host_id]
    if not candidates:
        raise NoCandidateError(f"no destination candidates besides {current.host_id!r}")
    if strategy == UNIFORM_RANDOM:
        return candidates[int(rng.integers(0, len(candidates)))].host_id
    if strategy == MAX_LOGICAL_DISTANCE:
        best = max(candidates, key=lambda h: (logical_distance(current, h), h.host_id))
        top = logical_distance(current, best)
        tied = [h.host_id for h in candidates if logical_distance(current, h) == top]
        return min(tied)
    raise ValueError(f"unknown destination strategy {strategy!r}")


# ───────────────────────────────────────────────────────────────────────
# Response rule and transitions
# ───────────────────────────────────────────────────────────────────────

def _restart_pending_on_current_host(record: ContainerRecord) -> bool:
    """True when a restart already happened on this host since arrival."""
    for entry in reversed(record.event_log):
        if entry.action == "Migrate":
            return False
        if entry.action == "Restart" and entry.source_host == record.current_host:
            return True
    return False


def on_anomaly(
    record: ContainerRecord,
    policy: PolicyConfig,
    hosts: Sequence[HostDescriptor],
    rng: np.random.Generator,
) -> Action:
    """Choose the graded response to one anomaly signal.

    Stateful: rollback while the budget lasts, then migrate.  Stateless:
    restart on the first anomaly at a host, migrate when the anomaly
    recurs there after a restart.
    """
    if record.state is not ContainerState.RUNNING:
        raise InvalidTransitionError(
            f"anomaly response requires a Running container, state is {record.state.value}"
        )
    host_by_id = {h.host_id: h for h in hosts}
    current = host_by_id.get(record.current_host)
    if current is None:
        raise ValueError(f"current host {record.current_host!r} not in host set")

    if record.kind == "stateful":
        if record.rollback_count < policy.rollback_limit:
            return Rollback()
        return Migrate(select_destination(current, hosts, policy.destination_strategy, rng))
    if _restart_pending_on_current_host(record):
        return Migrate(select_destination(current, hosts, policy.destination_strategy, rng))
    return Restart()


def apply_action(
    record: ContainerRecord,
    action: Action,
    policy: PolicyConfig,
    tick: int,
) -> ContainerRecord:
    """Run one action through the lifecycle machine.

    Charges the configured downtime, updates host and rollback counter,
    appends the log entry, and leaves the container Running again.
    """
    if record.state is not ContainerState.RUNNING:
        raise InvalidTransitionError(
            f"cannot apply {type(action).__name__} in state {record.state.value}"
        )
    source = record.current_host
    if isinstance(action, Rollback):
        record.state = ContainerState.ROLLING_BACK
        cost = policy.checkpoint_cost_ms + policy.restore_cost_ms
        record.rollback_count += 1
        dest = source
    elif isinstance(action, Migrate):
        if action.destination == source:
            raise InvalidTransitionError("migration destination equals current host")
        record.state = ContainerState.MIGRATING
        cost = policy.migration_downtime_ms
        record.current_host = action.destination
        record.rollback_count = 0
        dest = action.destination
    elif isinstance(action, Restart):
        record.state = ContainerState.RESTARTING
        cost = policy.restart_cost_ms
        dest = source
    elif isinstance(action, NoOp):
        cost = 0.0
        dest = source
    else:
        raise InvalidTransitionError(f"unknown action {action!r}")
    record.cumulative_downtime += cost
    record.event_log.append(
        ActionRecord(
            tick=tick,
            action=type(action).__name__,
            source_host=source,
            dest_host=dest,
            rollback_count=record.rollback_count,
            downtime_ms=cost,
        )
    )
    record.state = ContainerState.RUNNING
    return record


def run_policy_session(
    anomaly_epochs: Iterable[int],
    record: ContainerRecord,
    policy: PolicyConfig,
    hosts: Sequence[HostDescriptor],
    rng: np.random.Generator,
) -> ContainerRecord:
    """Drive the policy over an ordered anomaly-epoch list.

    Each anomalous epoch triggers one decide-and-apply round, the epoch
    index serving as the log tick.  Deterministic for a given rng seed.
    """
    for epoch in anomaly_epochs:
        action = on_anomaly(record, policy, hosts, rng)
        apply_action(record, action, policy, tick=epoch)
    return record


# ───────────────────────────────────────────────────────────────────────
# File interfaces
# ───────────────────────────────────────────────────────────────────────

SESSION_LOG_HEADER = (
    "tick,container_id,action,source_host,dest_host,rollback_count,downtime_ms"
)


def load_hosts(source: Union[IO[str], Iterable[str]]) -> list[HostDescriptor]:
    """Read a host set: one "host_id,config_class,network_zone,datacenter" per line.

    Blank lines and '#' comments are skipped; duplicate host ids are an
    error.
    """
    hosts: list[HostDescriptor] = []
    seen: set[str] = set()
    for line_no, raw in enumerate(source, start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = [f.strip() for f in stripped.split(",")]
        if len(fields) != 4 or not all(fields):
            raise ValueError(f"host file line {line_no}: expected 4 non-empty fields")
        if fields[0] in seen:
            raise ValueError(f"host file line {line_no}: duplicate host id {fields[0]!r}")
        seen.add(fields[0])
        hosts.append(HostDescriptor(*fields))
    return hosts


def write_session_log(record: ContainerRecord, destination: str | os.PathLike) -> None:
    """Write the event log as CSV with the documented header."""
    tmp = f"{os.fspath(destination)}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# container={record.container_id} kind={record.kind}"
                 f" final_host={record.current_host}"
                 f" cumulative_downtime_ms={record.cumulative_downtime:g}\n")
        fh.write(SESSION_LOG_HEADER + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        for entry in record.event_log:
            writer.writerow([
                entry.tick,
                record.container_id,
                entry.action,
                entry.source_host,
                entry.dest_host,
                entry.rollback_count,
                f"{entry.downtime_ms:g}",
            ])
    os.replace(tmp, destination)
