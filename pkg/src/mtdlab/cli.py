"""Command-line front end wiring the engines together.

Subcommands: model-curve, simulate, detect train, detect run,
policy run, figure {fig5,fig6,fig8,fig9}, gen-trace.  Every value
option can also come from a "key = value" config file (--config),
with explicit flags taking precedence; config sections are named
after the command, e.g. [simulate] or [detect.run].

All failures print a diagnostic to stderr and exit nonzero; artifacts
are written atomically so a failed run leaves nothing behind.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path

from .figures import FIGURES
from .scenarios import ScenarioSpec, run_gen_trace, run_scenario

__all__ = ["main", "build_parser"]


def _int_list(text: str) -> list[int]:
    items = [piece.strip() for piece in text.split(",") if piece.strip()]
    return [int(piece) for piece in items]


def _path_list(text: str) -> list[str]:
    return [piece.strip() for piece in text.split(",") if piece.strip()]


def _add_common(parser: argparse.ArgumentParser, out: bool = True) -> None:
    parser.add_argument("--config", type=Path, default=None,
                        help="key = value config file supplying option defaults")
    if out:
        parser.add_argument("--out", type=Path, default=None, help="output file path")


def _add_growth_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--growth", choices=["static", "exponential", "logistic"],
                        default=None, help="attacker growth law")
    parser.add_argument("--n", type=float, default=None, help="attacker count (static growth)")
    parser.add_argument("--n0", type=float, default=None, help="initial attacker count")
    parser.add_argument("--k", type=float, default=None, help="growth rate constant")
    parser.add_argument("--mu", type=float, default=None, help="carrying capacity (logistic)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtdlab",
        description="Moving-target-defense lab: survival models, lattice pursuit "
                    "simulation, syscall anomaly detection, and evasion policy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("model-curve", help="closed-form survival curve as CSV")
    p.add_argument("--mode", choices=["static", "mobile"], default=None)
    p.add_argument("--v", type=int, default=None, help="total host count")
    _add_growth_options(p)
    p.add_argument("--td", type=float, default=None,
                   help="detection time; enables the detection stage when given")
    p.add_argument("--t-start", type=float, default=None, help="grid start (default 2)")
    p.add_argument("--t-stop", type=float, default=None, help="grid stop (default 100)")
    p.add_argument("--t-step", type=float, default=None, help="grid step (default 1)")
    p.add_argument("--plot", action="store_true", help="also render a PNG next to the CSV")
    _add_common(p)

    p = sub.add_parser("simulate", help="Monte Carlo lattice pursuit as CSV")
    p.add_argument("--mode", choices=["static", "mobile"], default=None,
                   help="prey behavior")
    p.add_argument("--v", type=int, default=None, help="total host count (near-square)")
    _add_growth_options(p)
    p.add_argument("--td", type=float, default=None,
                   help="detection time driving the per-encounter escape odds (default 0)")
    p.add_argument("--t-max", type=int, default=None, help="ticks per trial")
    p.add_argument("--trials", type=int, default=None, help="independent trials")
    p.add_argument("--seed", type=int, default=None, help="experiment seed (default 0)")
    p.add_argument("--plot", action="store_true", help="also render a PNG next to the CSV")
    _add_common(p)

    detect = sub.add_parser("detect", help="syscall behavior learning and scoring")
    detect_sub = detect.add_subparsers(dest="detect_command", required=True)

    p = detect_sub.add_parser("train", help="learn a normal-behavior database")
    p.add_argument("--trace", action="append", dest="traces", default=None,
                   help="trace file; repeat for several")
    p.add_argument("--db", type=Path, default=None, help="database file to write")
    p.add_argument("--epoch-size", type=int, default=None, help="calls per epoch (default 1000)")
    p.add_argument("--container", default=None, help="container id filter for 2-column traces")
    p.add_argument("--append", action="store_true",
                   help="extend an existing database instead of starting fresh")
    _add_common(p, out=False)

    p = detect_sub.add_parser("run", help="score a trace against a database")
    p.add_argument("--trace", action="append", dest="traces", default=None, help="trace file")
    p.add_argument("--db", type=Path, default=None, help="database file to read")
    p.add_argument("--epoch-size", type=int, default=None, help="calls per epoch (default 1000)")
    p.add_argument("--threshold", type=int, default=None,
                   help="mismatches per epoch that stay non-anomalous (default 10)")
    p.add_argument("--container", default=None, help="container id filter for 2-column traces")
    _add_common(p)

    policy = sub.add_parser("policy", help="container evasion policy session")
    policy_sub = policy.add_subparsers(dest="policy_command", required=True)

    p = policy_sub.add_parser("run", help="drive the policy over an anomaly-epoch list")
    p.add_argument("--hosts", default=None, help="host set file")
    p.add_argument("--kind", choices=["stateless", "stateful"], default=None)
    p.add_argument("--anomalies", type=_int_list, default=None,
                   help="comma-separated anomalous epoch indices, e.g. 0,3,4")
    p.add_argument("--container-id", default=None, help="container id for the log (default c1)")
    p.add_argument("--start-host", default=None, help="initial host (default: first in file)")
    p.add_argument("--rollback-limit", type=int, default=None,
                   help="rollbacks before escalating to migration (default 3)")
    p.add_argument("--strategy", choices=["uniform_random", "max_logical_distance"],
                   default=None, help="destination selection strategy")
    p.add_argument("--checkpoint-ms", type=float, default=None)
    p.add_argument("--restore-ms", type=float, default=None)
    p.add_argument("--migration-ms", type=float, default=None)
    p.add_argument("--restart-ms", type=float, default=None)
    p.add_argument("--seed", type=int, default=None, help="rng seed (default 0)")
    _add_common(p)

    p = sub.add_parser("figure", help="canned survival sweeps (plot-ready CSV)")
    p.add_argument("which", choices=list(FIGURES), help="which sweep to emit")
    p.add_argument("--plot", action="store_true", help="also render a PNG next to the CSV")
    _add_common(p)

    p = sub.add_parser("gen-trace", help="synthetic syscall trace file")
    p.add_argument("--alphabet", type=int, default=None, help="distinct baseline calls")
    p.add_argument("--length", type=int, default=None, help="total calls")
    p.add_argument("--seed", type=int, default=None, help="pattern seed (default 0)")
    p.add_argument("--inject-offset", type=int, default=None,
                   help="position where novel calls replace the baseline")
    p.add_argument("--inject-length", type=int, default=None,
                   help="how many novel calls to inject")
    _add_common(p)

    return parser


# ───────────────────────────────────────────────────────────────────────
# Config file support
# ───────────────────────────────────────────────────────────────────────

def _command_section(args: argparse.Namespace) -> str:
    if args.command == "detect":
        return f"detect.{args.detect_command}"
    if args.command == "policy":
        return f"policy.{args.policy_command}"
    return args.command


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    """Fill unset options from the command's config-file section."""
    if args.config is None:
        return
    reader = configparser.ConfigParser()
    if not reader.read(args.config):
        raise FileNotFoundError(f"config file {args.config} not found")
    section = _command_section(args)
    if section not in reader:
        return
    values = reader[section]
    for action in _actions_for(parser, args):
        dest = action.dest
        if dest in ("help", "config", "command", "detect_command", "policy_command"):
            continue
        key = dest.replace("_", "-")
        raw = values.get(key, values.get(dest))
        if raw is None:
            continue
        current = getattr(args, dest, None)
        if isinstance(action, argparse._StoreTrueAction):
            if current is False:
                setattr(args, dest, values.getboolean(key, fallback=values.getboolean(dest)))
            continue
        if current is not None:
            continue  # explicit flag wins
        if isinstance(action, argparse._AppendAction):
            setattr(args, dest, _path_list(raw))
        elif action.type is not None:
            setattr(args, dest, action.type(raw))
        else:
            setattr(args, dest, raw)


def _actions_for(parser: argparse.ArgumentParser, args: argparse.Namespace):
    """Actions of the subparser that actually handled this command."""
    def walk(p: argparse.ArgumentParser, names: list[str]):
        if not names:
            return p._actions
        for action in p._actions:
            if isinstance(action, argparse._SubParsersAction):
                chosen = action.choices.get(names[0])
                if chosen is not None:
                    return walk(chosen, names[1:])
        return p._actions

    names = [args.command]
    if args.command == "detect":
        names.append(args.detect_command)
    elif args.command == "policy":
        names.append(args.policy_command)
    return walk(parser, names)


# ───────────────────────────────────────────────────────────────────────
# Dispatch
# ───────────────────────────────────────────────────────────────────────

def _params(args: argparse.Namespace, mapping: dict[str, str]) -> dict:
    """Collect set options into a scenario parameter map."""
    out = {}
    for param, attr in mapping.items():
        value = getattr(args, attr, None)
        if value is not None and value is not False:
            out[param] = value
    return out


def _dispatch(args: argparse.Namespace) -> list[Path]:
    if args.command == "model-curve":
        spec = ScenarioSpec(
            name="model-curve",
            engine="analytic",
            params=_params(args, {
                "mode": "mode", "v": "v", "growth": "growth", "n": "n", "n0": "n0",
                "k": "k", "mu": "mu", "td": "td", "t_start": "t_start",
                "t_stop": "t_stop", "t_step": "t_step", "plot": "plot",
            }),
            out=args.out,
        )
        return run_scenario(spec)
    if args.command == "simulate":
        spec = ScenarioSpec(
            name="simulate",
            engine="montecarlo",
            params=_params(args, {
                "mode": "mode", "v": "v", "growth": "growth", "n": "n", "n0": "n0",
                "k": "k", "mu": "mu", "td": "td", "t_max": "t_max",
                "trials": "trials", "seed": "seed", "plot": "plot",
            }),
            out=args.out,
        )
        return run_scenario(spec)
    if args.command == "detect":
        mapping = {
            "traces": "traces", "db": "db", "epoch_size": "epoch_size",
            "container": "container",
        }
        if args.detect_command == "train":
            mapping["append"] = "append"
        else:
            mapping["threshold"] = "threshold"
        params = _params(args, mapping)
        params["mode"] = args.detect_command
        spec = ScenarioSpec(
            name=f"detect-{args.detect_command}",
            engine="detector",
            params=params,
            out=getattr(args, "out", None),
        )
        return run_scenario(spec)
    if args.command == "policy":
        spec = ScenarioSpec(
            name="policy-run",
            engine="policy",
            params=_params(args, {
                "hosts": "hosts", "kind": "kind", "anomalies": "anomalies",
                "container_id": "container_id", "start_host": "start_host",
                "rollback_limit": "rollback_limit", "strategy": "strategy",
                "checkpoint_ms": "checkpoint_ms", "restore_ms": "restore_ms",
                "migration_ms": "migration_ms", "restart_ms": "restart_ms",
                "seed": "seed",
            }),
            out=args.out,
        )
        return run_scenario(spec)
    if args.command == "figure":
        spec = ScenarioSpec(
            name=f"figure-{args.which}",
            engine="figure",
            params=_params(args, {"plot": "plot"}) | {"which": args.which},
            out=args.out,
        )
        return run_scenario(spec)
    if args.command == "gen-trace":
        if args.alphabet is None or args.length is None:
            raise ValueError("gen-trace requires --alphabet and --length")
        if args.out is None:
            raise ValueError("gen-trace requires --out")
        return run_gen_trace(
            alphabet_size=args.alphabet,
            length=args.length,
            seed=args.seed if args.seed is not None else 0,
            out=args.out,
            inject_offset=args.inject_offset,
            inject_length=args.inject_length if args.inject_length is not None else 0,
        )
    raise ValueError(f"unknown command {args.command!r}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args, parser)
        written = _dispatch(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
