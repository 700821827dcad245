"""Config ingestion and run orchestration: load a JSON run configuration,
execute simulate/analyze/equilibrium pipelines, and emit deterministic CSV
trajectories and JSON reports.

Exit code convention: 0 when every expectation attached to the run is met
(or there are none), 1 when an expectation fails, 2 on configuration or
runtime errors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import constraints as _constraints
from .analysis import classify_system
from .dynamics import IntegrationSpec, System, attach_channels, integrate, monitor_trajectory
from .equilibrium import solve_equilibrium
from .errors import (
    ConfigError,
    ParseError,
    TCConsensusError,
    ValidationError,
)
from .graph import build_digraph
from .scenarios import Scenario, builtin_scenarios, scenario_by_name

_TOP_LEVEL_KEYS = {
    "scenario",
    "system",
    "x0",
    "integration",
    "seed",
    "analysis",
    "output_dir",
}
_ANALYSIS_KEYS = {"classify", "rays", "equilibrium", "monitors"}
_INTEGRATION_KEYS = {"dt", "t_final", "method", "record_stride"}


@dataclass(frozen=True)
class RunConfig:
    """A validated run request: exactly one of a built-in scenario name or a
    custom system (matrix + per-edge constraint records)."""

    scenario: str | None = None
    system: System | None = None
    x0: tuple[float, ...] | None = None
    integration: IntegrationSpec | None = None
    seed: int = 0
    classify: bool = True
    rays: bool = True
    equilibrium: bool = False
    monitors: bool = True
    output_dir: str | None = None

    def __post_init__(self):
        if (self.scenario is None) == (self.system is None):
            raise ValidationError(
                "exactly one of 'scenario' and 'system' must be present"
            )
        if self.system is not None and self.x0 is None:
            raise ValidationError("a custom system requires an explicit 'x0'")
        if self.x0 is not None and self.system is not None:
            if len(self.x0) != self.system.n:
                raise ValidationError(
                    f"x0 has {len(self.x0)} entries for a {self.system.n}-agent system"
                )

    def to_dict(self) -> dict:
        out: dict = {"seed": self.seed}
        if self.scenario is not None:
            out["scenario"] = self.scenario
        if self.system is not None:
            out["system"] = system_to_dict(self.system)
        if self.x0 is not None:
            out["x0"] = list(self.x0)
        if self.integration is not None:
            spec = self.integration
            out["integration"] = {
                "dt": spec.dt,
                "t_final": spec.t_final,
                "method": spec.method,
                "record_stride": spec.record_stride,
            }
        out["analysis"] = {
            "classify": self.classify,
            "rays": self.rays,
            "equilibrium": self.equilibrium,
            "monitors": self.monitors,
        }
        if self.output_dir is not None:
            out["output_dir"] = self.output_dir
        return out


def system_to_dict(system: System) -> dict:
    return {
        "weights": [[float(v) for v in row] for row in system.graph.weights],
        "constraints": [
            {"sender": j, "receiver": i, "fn": fn.to_dict()}
            for (j, i), fn in sorted(system.constraints.items())
        ],
    }


def system_from_dict(record: dict) -> System:
    try:
        graph = build_digraph(record["weights"])
        cmap = {}
        for entry in record["constraints"]:
            key = (int(entry["sender"]), int(entry["receiver"]))
            cmap[key] = _constraints.from_dict(entry["fn"])
        return System(graph, cmap)
    except KeyError as err:
        raise ValidationError(f"system record missing field {err}") from err
    except (TypeError, ValueError) as err:
        raise ValidationError(str(err)) from err


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ValidationError("config root must be a JSON object")
    unknown = set(data) - _TOP_LEVEL_KEYS
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")

    system = None
    if "system" in data:
        system = system_from_dict(data["system"])

    integration = None
    if "integration" in data:
        rec = data["integration"]
        if not isinstance(rec, dict):
            raise ValidationError("'integration' must be an object")
        unknown = set(rec) - _INTEGRATION_KEYS
        if unknown:
            raise ValidationError(f"unknown integration keys: {sorted(unknown)}")
        if "dt" not in rec or "t_final" not in rec:
            raise ValidationError("'integration' requires 'dt' and 't_final'")
        try:
            integration = IntegrationSpec(
                dt=float(rec["dt"]),
                t_final=float(rec["t_final"]),
                method=rec.get("method", "rk4"),
                record_stride=rec.get("record_stride"),
            )
        except ValueError as err:
            raise ValidationError(str(err)) from err

    analysis = data.get("analysis", {})
    if not isinstance(analysis, dict):
        raise ValidationError("'analysis' must be an object")
    unknown = set(analysis) - _ANALYSIS_KEYS
    if unknown:
        raise ValidationError(f"unknown analysis keys: {sorted(unknown)}")

    x0 = data.get("x0")
    if x0 is not None:
        try:
            x0 = tuple(float(v) for v in x0)
        except (TypeError, ValueError) as err:
            raise ValidationError(f"x0 must be a list of numbers: {err}") from err
        if not all(math.isfinite(v) for v in x0):
            raise ValidationError("x0 must be finite")

    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ValidationError("seed must be an integer")

    return RunConfig(
        scenario=data.get("scenario"),
        system=system,
        x0=x0,
        integration=integration,
        seed=seed,
        classify=bool(analysis.get("classify", True)),
        rays=bool(analysis.get("rays", True)),
        equilibrium=bool(analysis.get("equilibrium", False)),
        monitors=bool(analysis.get("monitors", True)),
        output_dir=data.get("output_dir"),
    )


def load_config(path) -> RunConfig:
    """Parse and validate a JSON run configuration file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ParseError(f"{path}: {err.strerror or err}") from err
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"{path}:{err.lineno}:{err.colno}: {err.msg}") from err
    return config_from_dict(data)


# ---------------------------------------------------------------------------
# run pipeline


def _jsonify(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, frozenset):
        return sorted(obj)
    return obj


def _resolve(config: RunConfig) -> tuple[System, Scenario | None, IntegrationSpec, np.ndarray]:
    if config.scenario is not None:
        try:
            scn = scenario_by_name(config.scenario)
        except KeyError as err:
            raise ConfigError(str(err)) from err
        spec = config.integration or scn.integration
        if config.x0 is not None:
            x0 = np.asarray(config.x0, dtype=np.float64)
        else:
            x0 = scn.sample_x0(config.seed)[0]
        return scn.system, scn, spec, x0
    spec = config.integration
    if spec is None:
        raise ValidationError("a custom system requires an 'integration' section")
    return config.system, None, spec, np.asarray(config.x0, dtype=np.float64)


def build_report(config: RunConfig, mode: str = "simulate"):
    """Execute the pipeline for ``config`` and return
    ``(report_dict, trajectory_or_None, expectations_met)``.

    ``mode`` is one of ``simulate`` (integrate + monitors + analysis),
    ``analyze`` (no integration), ``equilibrium`` (solve only).
    """
    system, scn, spec, x0 = _resolve(config)
    hints = scn.ray_hints if scn is not None else ()
    report: dict = {
        "config": config.to_dict(),
        "mode": mode,
    }
    ok = True

    verdict = None
    if config.classify and mode in ("simulate", "analyze"):
        verdict = classify_system(system, hints=hints)
        report["verdict"] = verdict.to_dict()
        if scn is not None:
            verdict_ok = verdict.classification == scn.expected_class
            report["expected_class"] = scn.expected_class
            report["verdict_matches_expected"] = verdict_ok
            ok = ok and verdict_ok

    equilibrium = None
    needs_eq = config.equilibrium or mode == "equilibrium" or (
        scn is not None and "v_monotone" in scn.checks
    )
    if needs_eq:
        try:
            equilibrium = solve_equilibrium(system, x0)
            report["equilibrium"] = {
                "point": _jsonify(equilibrium.point),
                "residual": equilibrium.residual,
                "method": equilibrium.method,
                "iterations": equilibrium.iterations,
            }
        except TCConsensusError as err:
            report["equilibrium"] = {"error": str(err)}
            if mode == "equilibrium":
                raise

    traj = None
    if mode == "simulate":
        traj = integrate(system, x0, spec)
        report["final_state"] = _jsonify(traj.final_state())
        report["final_spread"] = float(traj.spread()[-1])
        if config.monitors and scn is not None and scn.checks:
            mon = monitor_trajectory(
                traj,
                system,
                scn.checks,
                box=scn.box_spec,
                equilibrium=None if equilibrium is None else equilibrium.point,
                eq_spec=scn.eq_spec,
                consensus_threshold=scn.consensus_threshold,
                decay_threshold=scn.decay_threshold,
            )
            report["monitors"] = {
                name: {"passed": r.passed, "value": r.value, "detail": r.detail}
                for name, r in mon.results.items()
            }
            failures = {name for name, r in mon.results.items() if not r.passed}
            expected = set(scn.expected_check_failures)
            report["expected_check_failures"] = sorted(expected)
            report["checks_match_expected"] = failures == expected
            ok = ok and failures == expected
        attach_channels(
            traj,
            box=scn.box_spec if scn is not None else None,
            equilibrium=None if equilibrium is None else equilibrium.point,
            eq_spec=scn.eq_spec if scn is not None else None,
        )

    report["expectations_met"] = ok
    return report, traj, ok


def render_report(report: dict) -> str:
    return json.dumps(_jsonify(report), indent=2, sort_keys=True) + "\n"


def run(config: RunConfig, mode: str = "simulate", out_dir=None) -> int:
    """Run the pipeline, write artifacts, and return the exit status."""
    import sys

    try:
        report, traj, ok = build_report(config, mode=mode)
    except TCConsensusError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    target = out_dir or config.output_dir
    if target is not None:
        try:
            target = Path(target)
            target.mkdir(parents=True, exist_ok=True)
            (target / "report.json").write_text(
                render_report(report), encoding="utf-8"
            )
            if traj is not None:
                (target / "trajectory.csv").write_text(
                    traj.to_csv(), encoding="utf-8"
                )
        except OSError as err:
            print(f"error: {target}: {err}", file=sys.stderr)
            return 2
    return 0 if ok else 1


def list_scenarios() -> list[dict]:
    return [
        {
            "name": s.name,
            "agents": s.system.n,
            "expected_class": s.expected_class,
            "description": s.description,
        }
        for s in builtin_scenarios()
    ]
