"""Scenario validation and dispatch: one spec in, artifact files out.

A ScenarioSpec names an engine and carries a flat parameter map; this
module checks the map against the engine's schema (required keys
present, unknown keys rejected), builds the engine inputs, runs the
engine, and writes the delimited artifacts.  The CLI is a thin argv
adapter over run_scenario.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import detector as det
from . import policy as pol
from .analytic import (
    DetectionParams,
    ExponentialGrowth,
    GrowthModel,
    LogisticGrowth,
    StaticGrowth,
    survival_curve,
)
from .figures import FIGURES, build_figure
from .lattice import SimConfig, run_experiment
from .plotting import plot_path_for, render_table
from .reporting import Table, write_csv
from .tracegen import generate_synthetic_trace, write_trace

__all__ = ["ScenarioError", "ScenarioSpec", "run_scenario", "ENGINES"]

ENGINES = ("analytic", "montecarlo", "detector", "policy", "figure")

# engine -> (required keys, optional keys)
_SCHEMAS: dict[str, tuple[set[str], set[str]]] = {
    "analytic": (
        {"mode", "v", "growth"},
        {"n", "n0", "k", "mu", "td", "t_start", "t_stop", "t_step", "plot"},
    ),
    "montecarlo": (
        {"mode", "v", "growth", "trials", "t_max"},
        {"n", "n0", "k", "mu", "td", "seed", "plot"},
    ),
    "detector": (
        {"mode", "traces", "db"},
        {"epoch_size", "threshold", "container", "append"},
    ),
    "policy": (
        {"kind", "hosts", "anomalies"},
        {"container_id", "start_host", "rollback_limit", "strategy",
         "checkpoint_ms", "restore_ms", "migration_ms", "restart_ms", "seed"},
    ),
    "figure": ({"which"}, {"plot"}),
}

_GROWTH_FIELDS = {"static": {"n"}, "exponential": {"n0", "k"}, "logistic": {"n0", "k", "mu"}}


class ScenarioError(ValueError):
    """Scenario that cannot be validated or dispatched."""


@dataclass
class ScenarioSpec:
    """A named engine invocation with its parameter map and output path."""

    name: str
    engine: str
    params: dict[str, Any] = field(default_factory=dict)
    out: Path | None = None

    def validate(self) -> None:
        if self.engine not in ENGINES:
            raise ScenarioError(f"unknown engine {self.engine!r}; choose one of {ENGINES}")
        required, optional = _SCHEMAS[self.engine]
        present = {k for k, v in self.params.items() if v is not None}
        missing = required - present
        if missing:
            raise ScenarioError(
                f"{self.engine} scenario missing required parameters: {sorted(missing)}"
            )
        unknown = present - required - optional
        if unknown:
            raise ScenarioError(
                f"{self.engine} scenario got unknown parameters: {sorted(unknown)}"
            )


def _build_growth(params: dict[str, Any]) -> GrowthModel:
    kind = params["growth"]
    if kind not in _GROWTH_FIELDS:
        raise ScenarioError(
            f"growth must be one of {sorted(_GROWTH_FIELDS)}, got {kind!r}"
        )
    needed = _GROWTH_FIELDS[kind]
    given = {k for k in ("n", "n0", "k", "mu") if params.get(k) is not None}
    if given != needed:
        raise ScenarioError(
            f"growth {kind!r} takes exactly {sorted(needed)}, got {sorted(given)}"
        )
    try:
        if kind == "static":
            return StaticGrowth(n=params["n"])
        if kind == "exponential":
            return ExponentialGrowth(n0=params["n0"], k=params["k"])
        return LogisticGrowth(n0=params["n0"], k=params["k"], mu=params["mu"])
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


def _build_detection(params: dict[str, Any]) -> DetectionParams:
    td = params.get("td")
    return DetectionParams.at(td) if td is not None else DetectionParams.off()


def _time_grid(params: dict[str, Any]) -> list[float]:
    start = params.get("t_start", 2.0)
    stop = params.get("t_stop", 100.0)
    step = params.get("t_step", 1.0)
    if step <= 0:
        raise ScenarioError(f"t_step must be > 0, got {step}")
    if stop < start:
        raise ScenarioError(f"t_stop {stop} must be >= t_start {start}")
    count = int((stop - start) / step + 1e-9) + 1
    return [start + i * step for i in range(count)]


def _require_out(spec: ScenarioSpec) -> Path:
    if spec.out is None:
        raise ScenarioError(f"scenario {spec.name!r} needs an output path")
    return spec.out


def _growth_comment(params: dict[str, Any]) -> str:
    fields = ", ".join(
        f"{k}={params[k]:g}" for k in ("n", "n0", "k", "mu") if params.get(k) is not None
    )
    return f"growth={params['growth']} ({fields})"


def _maybe_plot(table: Table, csv_path: Path, params: dict[str, Any],
                written: list[Path]) -> None:
    if params.get("plot"):
        png = Path(plot_path_for(csv_path))
        render_table(table, png)
        written.append(png)


def _run_analytic(spec: ScenarioSpec) -> list[Path]:
    out = _require_out(spec)
    params = spec.params
    growth = _build_growth(params)
    detection = _build_detection(params)
    grid = _time_grid(params)
    curve = survival_curve(params["mode"], growth, params["v"], detection, grid)
    detect_text = f"t_d={detection.t_d:g}" if detection.enabled else "detection disabled"
    table = Table(
        comments=(
            "engine: analytic",
            f"params: mode={params['mode']}, V={params['v']}, {_growth_comment(params)},"
            f" {detect_text}",
        ),
        header=("t", "p"),
        rows=tuple(curve.points),
    )
    write_csv(table, out)
    written = [out]
    _maybe_plot(table, out, params, written)
    return written


def _run_montecarlo(spec: ScenarioSpec) -> list[Path]:
    out = _require_out(spec)
    params = spec.params
    config = SimConfig(
        v_total=params["v"],
        growth=_build_growth(params),
        mode=params["mode"],
        t_d=params.get("td", 0.0),
        t_max=params["t_max"],
        trials=params["trials"],
        seed=params.get("seed", 0),
    )
    curve = run_experiment(config)
    table = Table(
        comments=(
            "engine: montecarlo",
            f"params: mode={params['mode']}, V={params['v']}, {_growth_comment(params)},"
            f" t_d={config.t_d:g}, t_max={config.t_max}, trials={config.trials},"
            f" seed={config.seed}",
        ),
        header=("tick", "surviving_fraction", "ci_half_width"),
        rows=tuple(curve.points),
    )
    write_csv(table, out)
    written = [out]
    _maybe_plot(table, out, params, written)
    return written


def _parse_traces(paths: list[str], container: str | None) -> list[list[det.SyscallEvent]]:
    parsed = []
    for path in paths:
        with open(path, "r", encoding="utf-8") as fh:
            parsed.append(det.parse_trace(fh, container_id=container))
    return parsed


def _run_detector(spec: ScenarioSpec) -> list[Path]:
    params = spec.params
    mode = params["mode"]
    traces = params["traces"]
    db_path = Path(params["db"])
    config = det.EpochConfig(
        epoch_size=params.get("epoch_size", 1000),
        threshold=params.get("threshold", 10),
    )
    container = params.get("container")
    if mode == "train":
        if params.get("append") and db_path.exists():
            db = det.load_db(db_path)
        else:
            db = det.NormalBehaviorDb.empty()
        for events in _parse_traces(traces, container):
            det.train(events, db, config)
        det.save_db(db, db_path)
        return [db_path]
    if mode == "run":
        if len(traces) != 1:
            raise ScenarioError("detector run takes exactly one trace")
        db = det.load_db(db_path)
        events = _parse_traces(traces, container)[0]
        report = det.detect(events, db, config)
        out = _require_out(spec)
        table = Table(
            comments=(
                "engine: detector",
                f"params: db={db_path}, epoch_size={config.epoch_size},"
                f" window_size={config.window_size}, threshold={config.threshold}",
                f"anomalous epochs: {det.emit_anomaly_signal(report)}",
            ),
            header=("epoch", "windows_evaluated", "mismatches", "anomalous"),
            rows=tuple(
                (e.epoch_index, e.windows_evaluated, e.mismatch_count, e.anomalous)
                for e in report.epochs
            ),
        )
        write_csv(table, out)
        return [out]
    raise ScenarioError(f"detector mode must be train or run, got {mode!r}")


def _run_policy(spec: ScenarioSpec) -> list[Path]:
    out = _require_out(spec)
    params = spec.params
    with open(params["hosts"], "r", encoding="utf-8") as fh:
        hosts = pol.load_hosts(fh)
    if not hosts:
        raise ScenarioError(f"host file {params['hosts']} lists no hosts")
    start = params.get("start_host") or hosts[0].host_id
    if start not in {h.host_id for h in hosts}:
        raise ScenarioError(f"start host {start!r} is not in the host set")
    policy = pol.PolicyConfig(
        rollback_limit=params.get("rollback_limit", 3),
        destination_strategy=params.get("strategy", pol.UNIFORM_RANDOM),
        checkpoint_cost_ms=params.get("checkpoint_ms", 40.0),
        restore_cost_ms=params.get("restore_ms", 60.0),
        migration_downtime_ms=params.get("migration_ms", 500.0),
        restart_cost_ms=params.get("restart_ms", 30.0),
    )
    record = pol.ContainerRecord(
        container_id=params.get("container_id", "c1"),
        kind=params["kind"],
        current_host=start,
    )
    rng = np.random.default_rng(params.get("seed", 0))
    pol.run_policy_session(params["anomalies"], record, policy, hosts, rng)
    pol.write_session_log(record, out)
    return [out]


def _run_figure(spec: ScenarioSpec) -> list[Path]:
    params = spec.params
    which = params["which"]
    if which not in FIGURES:
        raise ScenarioError(f"unknown figure {which!r}; choose one of {FIGURES}")
    out = spec.out if spec.out is not None else Path(f"{which}.csv")
    table = build_figure(which)
    write_csv(table, out)
    written = [out]
    _maybe_plot(table, out, params, written)
    return written


_RUNNERS = {
    "analytic": _run_analytic,
    "montecarlo": _run_montecarlo,
    "detector": _run_detector,
    "policy": _run_policy,
    "figure": _run_figure,
}


def run_scenario(spec: ScenarioSpec) -> list[Path]:
    """Validate a scenario and run its engine; returns the files written."""
    spec.validate()
    return _RUNNERS[spec.engine](spec)


def run_gen_trace(
    alphabet_size: int,
    length: int,
    seed: int,
    out: Path,
    inject_offset: int | None = None,
    inject_length: int = 0,
) -> list[Path]:
    """Generate a synthetic trace file (the gen-trace command body)."""
    names = generate_synthetic_trace(
        alphabet_size, length, seed=seed,
        inject_offset=inject_offset, inject_length=inject_length,
    )
    write_trace(names, out)
    return [out]
