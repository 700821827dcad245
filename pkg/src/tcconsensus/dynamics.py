"""Network dynamics under per-edge transmission constraints.

The state of agent ``i`` evolves as the weighted sum over in-edges of
``a_ij * (f_ji(x_j) - x_i)``, where ``f_ji`` is the constraint attached to
the transmission from ``j`` to ``i``. Gated edges drop their whole
contribution while the sender state is outside the accepted interval.

Integration is deterministic fixed-step forward integration (RK4 by
default): identical inputs produce bit-identical trajectories. For
discontinuous constraints this selects one of the possibly many solutions;
there is no event detection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .constraints import ConstraintFn, GatedIdentity
from .errors import MissingWitnessError, NonFiniteStateError
from .graph import Digraph, row_stats
from .rays import (
    BoxRaySpec,
    EquilibriumRaySpec,
    distance_to_box,
    lyapunov_Y,
    lyapunov_V,
)


@dataclass(frozen=True)
class System:
    """A digraph plus one constraint per edge, keyed ``(sender, receiver)``."""

    graph: Digraph
    constraints: dict[tuple[int, int], ConstraintFn]

    def __post_init__(self):
        edges = set(self.graph.edges())
        keys = set(self.constraints)
        if keys != edges:
            missing = edges - keys
            extra = keys - edges
            raise ValueError(
                f"constraint map must cover the edge set exactly; "
                f"missing {sorted(missing)}, extra {sorted(extra)}"
            )
        # group edges by (sender, function) so the right-hand side needs one
        # function evaluation per group rather than per edge
        groups: list[tuple[int, ConstraintFn, np.ndarray, np.ndarray]] = []
        by_sender: dict[tuple[int, int], list[tuple[int, float]]] = {}
        fns: dict[int, ConstraintFn] = {}
        for (j, i), fn in sorted(self.constraints.items()):
            key = (j, id(fn))
            fns[id(fn)] = fn
            by_sender.setdefault(key, []).append((i, self.graph.weights[i, j]))
        for (j, fid), pairs in sorted(by_sender.items()):
            fn = fns[fid]
            recv = [int(p[0]) for p in pairs]
            w = [float(p[1]) for p in pairs]
            # piecewise-linear representations evaluate via a precomputed
            # slope/intercept table, the fastest path available
            rep = None if fn.is_gate else fn.pwl()
            evalf = rep.eval_array if rep is not None else fn.eval_array
            groups.append((j, fn, evalf, recv, w))
        object.__setattr__(self, "_groups", groups)
        # in-degree row sums over non-gated edges only (see rhs_batch)
        plain_alpha = np.zeros(self.graph.n)
        for j, fn, evalf, recv, w in groups:
            if not fn.is_gate:
                for r, wt in zip(recv, w):
                    plain_alpha[r] += wt
        object.__setattr__(self, "_plain_alpha", plain_alpha)

    @property
    def n(self) -> int:
        return self.graph.n

    def constraint_on(self, j: int, i: int) -> ConstraintFn:
        return self.constraints[(j, i)]


def rhs(system: System, x) -> NDArray[np.float64]:
    """Right-hand side at a single state vector."""
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise NonFiniteStateError("state vector has non-finite entries")
    return rhs_batch(system, x[None, :])[0]


def rhs_batch(system: System, X: NDArray[np.float64]) -> NDArray[np.float64]:
    """Right-hand side for a batch of states, shape ``(m, n)``.

    The ``-a_ij * x_i`` parts of the non-gated edges sum to ``-alpha_i x_i``
    and are applied once outside the edge loop; gated edges keep their whole
    term inside because their effective degree depends on the gate.
    """
    dx = np.zeros_like(X)
    for j, fn, evalf, recv, w in system._groups:
        xj = X[:, j]
        if fn.is_gate:
            active = fn.gate_mask(xj)
            for r, wt in zip(recv, w):
                dx[:, r] += wt * active * (xj - X[:, r])
        else:
            fj = evalf(xj)
            for r, wt in zip(recv, w):
                dx[:, r] += wt * fj
    return dx - X * system._plain_alpha


def default_dt(system: System) -> float:
    """Step size scaled by the largest row sum to keep RK4 well inside its
    stability region."""
    _, a_bar = row_stats(system.graph)
    if a_bar <= 0:
        return 1e-3
    return min(1e-3, 0.1 / a_bar)


@dataclass(frozen=True)
class IntegrationSpec:
    dt: float
    t_final: float
    method: str = "rk4"
    record_stride: int | None = None  # None: auto, about 1000 samples

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_final < 0:
            raise ValueError("t_final must be non-negative")
        if self.method not in ("rk4", "euler"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.record_stride is not None and self.record_stride < 1:
            raise ValueError("record_stride must be at least 1")

    def steps(self) -> int:
        return int(round(self.t_final / self.dt))

    def stride(self) -> int:
        if self.record_stride is not None:
            return self.record_stride
        return max(1, self.steps() // 1000)


@dataclass
class Trajectory:
    times: NDArray[np.float64]
    states: NDArray[np.float64]  # (samples, n)
    dt: float
    channels: dict[str, NDArray[np.float64]] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.states.shape[1]

    def final_state(self) -> NDArray[np.float64]:
        return self.states[-1]

    def spread(self) -> NDArray[np.float64]:
        return self.states.max(axis=1) - self.states.min(axis=1)

    def to_csv(self) -> str:
        cols = ["t"] + [f"x_{i + 1}" for i in range(self.n)]
        data = [self.times] + [self.states[:, i] for i in range(self.n)]
        for name in ("Y", "V", "dist", "xM", "xm"):
            if name in self.channels:
                cols.append(name)
                data.append(self.channels[name])
        lines = [",".join(cols)]
        arr = np.column_stack(data)
        for row in arr:
            lines.append(",".join(f"{v:.17g}" for v in row))
        return "\n".join(lines) + "\n"


@dataclass
class BatchTrajectory:
    """Shared-time trajectories for a batch of initial states, ``(k, m, n)``."""

    times: NDArray[np.float64]
    states: NDArray[np.float64]
    dt: float

    def single(self, run: int) -> Trajectory:
        return Trajectory(self.times, np.array(self.states[:, run, :]), self.dt)

    @property
    def runs(self) -> int:
        return self.states.shape[1]


_DIVERGENCE_LIMIT = 1e12


def integrate_batch(
    system: System, X0, spec: IntegrationSpec
) -> BatchTrajectory:
    """Fixed-step integration of many initial states in lockstep."""
    X = np.array(X0, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != system.n:
        raise ValueError(f"X0 must have shape (m, {system.n})")
    if not np.all(np.isfinite(X)):
        raise NonFiniteStateError("non-finite initial state")
    steps = spec.steps()
    stride = spec.stride()
    dt = spec.dt

    rec_times = [0.0]
    rec_states = [X.copy()]

    def partial() -> BatchTrajectory:
        return BatchTrajectory(
            np.array(rec_times), np.array(rec_states), dt
        )

    for k in range(1, steps + 1):
        if spec.method == "euler":
            X = X + dt * rhs_batch(system, X)
        else:
            k1 = rhs_batch(system, X)
            k2 = rhs_batch(system, X + 0.5 * dt * k1)
            k3 = rhs_batch(system, X + 0.5 * dt * k2)
            k4 = rhs_batch(system, X + dt * k3)
            X = X + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if k % stride == 0 or k == steps:
            if not np.all(np.isfinite(X)) or np.abs(X).max() > _DIVERGENCE_LIMIT:
                raise NonFiniteStateError(
                    f"divergence detected at t={k * dt:.6g}", partial=partial()
                )
            rec_times.append(k * dt)
            rec_states.append(X.copy())
    return partial()


def integrate(system: System, x0, spec: IntegrationSpec) -> Trajectory:
    x0 = np.asarray(x0, dtype=np.float64)
    try:
        batch = integrate_batch(system, x0[None, :], spec)
    except NonFiniteStateError as err:
        if err.partial is not None:
            err.partial = err.partial.single(0)
        raise
    return batch.single(0)


# ---------------------------------------------------------------------------
# monitors

MONOTONE_TOL_REL = 1e-9
MONOTONE_TOL_ABS = 1e-12


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    value: float | None = None
    detail: str = ""


@dataclass
class MonitorReport:
    results: dict[str, CheckResult]

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results.values())


def attach_channels(
    traj: Trajectory,
    box: BoxRaySpec | None = None,
    equilibrium=None,
    eq_spec: EquilibriumRaySpec | None = None,
) -> Trajectory:
    """Compute monitor channels at the stored samples, in place."""
    traj.channels["xM"] = traj.states.max(axis=1)
    traj.channels["xm"] = traj.states.min(axis=1)
    if box is not None:
        traj.channels["Y"] = np.array(
            [lyapunov_Y(s, box)[0] for s in traj.states]
        )
        traj.channels["dist"] = np.array(
            [distance_to_box(s, box.box_lo, box.box_hi) for s in traj.states]
        )
    if equilibrium is not None and eq_spec is not None:
        traj.channels["V"] = np.array(
            [lyapunov_V(s, equilibrium, eq_spec) for s in traj.states]
        )
    return traj


def _monotone(series, tol_rel, tol_abs):
    prev = series[0]
    for k in range(1, len(series)):
        if series[k] > prev * (1.0 + tol_rel) + tol_abs and series[k] > prev + tol_abs:
            return False, k
        prev = series[k]
    return True, None


def monitor_trajectory(
    traj: Trajectory,
    system: System,
    checks,
    box: BoxRaySpec | None = None,
    equilibrium=None,
    eq_spec: EquilibriumRaySpec | None = None,
    consensus_threshold: float = 1e-3,
    decay_threshold: float = 1e-3,
    tol_rel: float = MONOTONE_TOL_REL,
    tol_abs: float = MONOTONE_TOL_ABS,
) -> MonitorReport:
    """Run the selected per-trajectory checks and report pass/fail data.

    ``checks`` is an iterable drawn from ``{"box_invariance", "y_monotone",
    "v_monotone", "lemma6", "consensus", "distance_decay"}``. Checks that
    need a box/ray spec or an equilibrium raise ``MissingWitnessError`` when
    it was not supplied.
    """
    _, a_bar = row_stats(system.graph)
    box_tol = 10.0 * traj.dt * max(a_bar, 1.0)
    results: dict[str, CheckResult] = {}

    def need_box():
        if box is None:
            raise MissingWitnessError("check requires a BoxRaySpec")
        return box

    for check in checks:
        if check == "box_invariance":
            b = need_box()
            inside = (traj.states >= b.box_lo - 1e-12).all(axis=1) & (
                traj.states <= b.box_hi + 1e-12
            ).all(axis=1)
            first = np.argmax(inside) if inside.any() else None
            if first is None:
                results[check] = CheckResult(True, None, "never entered the box")
                continue
            tail = traj.states[first:]
            worst = float(
                np.maximum(b.box_lo - tail, tail - b.box_hi).max()
            )
            results[check] = CheckResult(
                worst <= box_tol, worst, f"max excursion after entry (tol {box_tol:g})"
            )
        elif check == "y_monotone":
            b = need_box()
            attach_channels(traj, box=b)
            ok, at = _monotone(traj.channels["Y"], tol_rel, tol_abs)
            results[check] = CheckResult(
                ok,
                float(traj.channels["Y"][-1]),
                "" if ok else f"increase at sample {at}",
            )
        elif check == "v_monotone":
            if equilibrium is None or eq_spec is None:
                raise MissingWitnessError(
                    "v_monotone requires an equilibrium and an EquilibriumRaySpec"
                )
            attach_channels(traj, equilibrium=equilibrium, eq_spec=eq_spec)
            ok, at = _monotone(traj.channels["V"], tol_rel, tol_abs)
            results[check] = CheckResult(
                ok,
                float(traj.channels["V"][-1]),
                "" if ok else f"increase at sample {at}",
            )
        elif check == "lemma6":
            b = need_box()
            results[check] = _lemma6_check(traj, b, box_tol)
        elif check == "consensus":
            spread = float(traj.spread()[-1])
            results[check] = CheckResult(
                spread < consensus_threshold,
                spread,
                f"final spread (limit {float(traj.states[-1].mean()):.6g})",
            )
        elif check == "distance_decay":
            b = need_box()
            attach_channels(traj, box=b)
            final = float(traj.channels["dist"][-1])
            results[check] = CheckResult(
                final <= decay_threshold, final, "final distance to box"
            )
        else:
            raise ValueError(f"unknown check {check!r}")
    return MonitorReport(results)


def _lemma6_check(traj: Trajectory, b: BoxRaySpec, tol: float) -> CheckResult:
    """Case-resolved trajectory bound keyed on the term attaining Y(t0)."""
    x0 = traj.states[0]
    _, term = lyapunov_Y(x0, b)
    xM = traj.states.max(axis=1)
    xm = traj.states.min(axis=1)
    if term == "box":
        worst = float(np.maximum(b.box_lo - xm, xM - b.box_hi).max())
        bound = "stay inside the box"
    elif term == "right_ray":
        floor = b.l2(float(x0.max()))
        worst = float((floor - xm).max())
        bound = f"x_min >= L2(x_max(0)) = {floor:.6g}"
    elif term == "left_ray":
        cap = b.l1(float(x0.min()))
        worst = float((xM - cap).max())
        bound = f"x_max <= L1(x_min(0)) = {cap:.6g}"
    elif term == "xM_minus_lo":
        floor = min(float(x0.min()), b.box_lo)
        worst = float((floor - xm).max())
        bound = f"x_min >= min(x_min(0), box_lo) = {floor:.6g}"
    else:  # hi_minus_xm
        cap = max(float(x0.max()), b.box_hi)
        worst = float((xM - cap).max())
        bound = f"x_max <= max(x_max(0), box_hi) = {cap:.6g}"
    return CheckResult(worst <= tol, worst, f"case {term}: {bound} (tol {tol:g})")
