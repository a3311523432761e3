"""Scenario configuration, the outer simulation loop, and run artifacts.

A scenario file is a small nested mapping (YAML). Unknown keys anywhere in
the tree are rejected so typos fail loudly. The loop advances the fleet one
optimization step at a time in one of four modes, verifies the runtime
invariants after every step, and logs one CSV row per step plus the full
state trajectory.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .adaptive import (
    AdaptivePolicy,
    UndefinedMeasureError,
    suboptimality,
    update_n,
)
from .distributed import (
    WorldState,
    algorithm1_step,
    build_neighborhoods,
    merge_weights,
)
from .dynamics import (
    AgentDynamics,
    InputPolytope,
    LiftedInput,
    LiftedState,
    collision_bound,
    invert_control,
    step,
    velocity_feasible_set,
)
from .graph import (
    Configuration,
    WeightParams,
    algebraic_connectivity,
    build_graph,
    delta_laplacian,
    linearize,
)
from .sdp import build_centralized_lti, build_centralized_si, solve

MODES = ("centralized-si", "centralized-lti", "distributed", "adaptive")

STEPS_HEADER = [
    "k",
    "lambda2_lin",
    "lambda2_actual",
    "gamma_min",
    "gamma_max",
    "min_d2",
    "mean_n",
    "statuses",
]


def octagon_polytope(scale: float = 1.0) -> InputPolytope:
    """Box with cut corners: |u1|<=s, |u2|<=s, |u1|+|u2|<=1.5s."""
    H = np.array(
        [
            [1.0, 0.0],
            [-1.0, 0.0],
            [0.0, 1.0],
            [0.0, -1.0],
            [1.0, 1.0],
            [1.0, -1.0],
            [-1.0, 1.0],
            [-1.0, -1.0],
        ]
    )
    h = scale * np.array([1.0, 1.0, 1.0, 1.0, 1.5, 1.5, 1.5, 1.5])
    return InputPolytope(H, h)


def box_polytope(scale: float, dim: int) -> InputPolytope:
    H = np.vstack([np.eye(dim), -np.eye(dim)])
    return InputPolytope(H, scale * np.ones(2 * dim))


# ---------------------------------------------------------------------------
# Scenario loading
# ---------------------------------------------------------------------------


def _require_keys(mapping: dict, allowed: set, where: str):
    unknown = set(mapping) - allowed
    if unknown:
        raise ValueError(f"unknown keys in {where}: {sorted(unknown)}")


def _as_matrix(value, dim: int, name: str) -> np.ndarray:
    if np.isscalar(value):
        return float(value) * np.eye(dim)
    arr = np.asarray(value, dtype=float)
    if arr.shape != (dim, dim):
        raise ValueError(f"{name} must be a scalar or a {dim}x{dim} matrix")
    return arr


def _parse_dynamics(spec: dict, dim: int) -> AgentDynamics:
    _require_keys(spec, {"a1", "a2", "b1"}, "dynamics")
    for key in ("a1", "a2", "b1"):
        if key not in spec:
            raise ValueError(f"dynamics requires {key}")
    return AgentDynamics(
        a1=_as_matrix(spec["a1"], dim, "a1"),
        a2=_as_matrix(spec["a2"], dim, "a2"),
        b1=float(spec["b1"]),
    )


def _parse_polytope(spec: dict, dim: int) -> InputPolytope:
    _require_keys(spec, {"kind", "scale", "rows", "bounds"}, "polytope")
    kind = spec.get("kind", "octagon")
    if kind == "octagon":
        if dim != 2:
            raise ValueError("the octagon input set is two-dimensional")
        return octagon_polytope(float(spec.get("scale", 1.0)))
    if kind == "box":
        return box_polytope(float(spec.get("scale", 1.0)), dim)
    if kind == "rows":
        if "rows" not in spec or "bounds" not in spec:
            raise ValueError("polytope kind 'rows' requires rows and bounds")
        return InputPolytope(
            np.asarray(spec["rows"], dtype=float),
            np.asarray(spec["bounds"], dtype=float),
        )
    raise ValueError(f"unknown polytope kind: {kind}")


@dataclass(frozen=True)
class InitSpec:
    kind: str
    positions: np.ndarray | None = None
    box: float = 4.0
    margin: float = 0.08


@dataclass
class Scenario:
    """Fully resolved run description."""

    n_agents: int
    dim: int
    steps: int
    ts: float
    seed: int
    mode: str
    params: WeightParams
    dynamics: list
    polytopes: list
    v_max: float
    alpha: np.ndarray | None
    n_init: np.ndarray
    policy: AdaptivePolicy
    init: InitSpec
    solver_options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if self.n_agents < 2:
            raise ValueError("at least two agents required")
        if self.ts <= 0:
            raise ValueError("ts must be positive")
        if len(self.dynamics) != self.n_agents or len(self.polytopes) != self.n_agents:
            raise ValueError("per-agent dynamics/polytope lists must match n_agents")
        self.n_init = np.asarray(self.n_init, dtype=int)
        if self.n_init.shape != (self.n_agents,):
            raise ValueError("one initial neighborhood size per agent required")
        if (self.n_init < 1).any() or (self.n_init > self.n_agents).any():
            raise ValueError("initial neighborhood sizes out of range")


_TOP_KEYS = {
    "n_agents",
    "dim",
    "steps",
    "ts",
    "seed",
    "mode",
    "weights",
    "dynamics",
    "polytope",
    "v_max",
    "alpha",
    "n_init",
    "adaptive",
    "init",
    "solver",
}

_ADAPTIVE_KEYS = {"grow_threshold", "shrink_threshold", "period", "n_min", "n_max"}
_INIT_KEYS = {"kind", "positions", "box", "margin"}
_SOLVER_KEYS = {"feastol", "abstol", "reltol", "maxiters"}


def scenario_from_dict(raw: dict) -> Scenario:
    if not isinstance(raw, dict):
        raise ValueError("scenario file must hold a mapping")
    _require_keys(raw, _TOP_KEYS, "scenario")

    n = int(raw.get("n_agents", 10))
    dim = int(raw.get("dim", 2))
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")

    weights_spec = raw.get("weights") or {}
    _require_keys(weights_spec, {"rho1", "rho2"}, "weights")
    params = WeightParams(
        rho1=float(weights_spec.get("rho1", 0.75)),
        rho2=float(weights_spec.get("rho2", 3.0)),
    )

    dyn_spec = raw.get("dynamics") or {"a1": 0.5, "a2": 0.75, "b1": 0.5}
    if isinstance(dyn_spec, list):
        if len(dyn_spec) != n:
            raise ValueError("per-agent dynamics list must have n_agents entries")
        dynamics = [_parse_dynamics(d, dim) for d in dyn_spec]
    else:
        dynamics = [_parse_dynamics(dyn_spec, dim)] * n

    poly_spec = raw.get("polytope") or {"kind": "octagon"}
    if isinstance(poly_spec, list):
        if len(poly_spec) != n:
            raise ValueError("per-agent polytope list must have n_agents entries")
        polytopes = [_parse_polytope(p, dim) for p in poly_spec]
    else:
        polytopes = [_parse_polytope(poly_spec, dim)] * n

    alpha_spec = raw.get("alpha", "uniform")
    if isinstance(alpha_spec, str):
        if alpha_spec != "uniform":
            raise ValueError("alpha must be 'uniform' or a list of weights")
        alpha = None
    else:
        alpha = np.asarray(alpha_spec, dtype=float)

    n_init_spec = raw.get("n_init", 2)
    if np.isscalar(n_init_spec):
        n_init = np.full(n, int(n_init_spec))
    else:
        n_init = np.asarray(n_init_spec, dtype=int)

    adaptive_spec = raw.get("adaptive") or {}
    _require_keys(adaptive_spec, _ADAPTIVE_KEYS, "adaptive")
    policy = AdaptivePolicy(
        n_max=int(adaptive_spec.get("n_max", n - 1)),
        grow_threshold=float(adaptive_spec.get("grow_threshold", 0.05)),
        shrink_threshold=float(adaptive_spec.get("shrink_threshold", 0.01)),
        period=int(adaptive_spec.get("period", 5)),
        n_min=int(adaptive_spec.get("n_min", 1)),
    )

    init_spec = raw.get("init") or {"kind": "line"}
    _require_keys(init_spec, _INIT_KEYS, "init")
    kind = init_spec.get("kind", "line")
    if kind not in ("line", "explicit", "random"):
        raise ValueError("init kind must be line, explicit, or random")
    positions = None
    if kind == "explicit":
        if "positions" not in init_spec:
            raise ValueError("explicit init requires positions")
        positions = np.asarray(init_spec["positions"], dtype=float)
        if positions.shape != (n, dim):
            raise ValueError("explicit positions must be n_agents x dim")
    init = InitSpec(
        kind=kind,
        positions=positions,
        box=float(init_spec.get("box", 4.0)),
        margin=float(init_spec.get("margin", 0.08)),
    )

    solver_spec = raw.get("solver") or {}
    _require_keys(solver_spec, _SOLVER_KEYS, "solver")
    solver_options = {k: float(v) if k != "maxiters" else int(v) for k, v in solver_spec.items()}

    return Scenario(
        n_agents=n,
        dim=dim,
        steps=int(raw.get("steps", 100)),
        ts=float(raw.get("ts", 1.0)),
        seed=int(raw.get("seed", 0)),
        mode=str(raw.get("mode", "distributed")),
        params=params,
        dynamics=dynamics,
        polytopes=polytopes,
        v_max=float(raw.get("v_max", 0.5)),
        alpha=alpha,
        n_init=n_init,
        policy=policy,
        init=init,
        solver_options=solver_options,
    )


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    return scenario_from_dict(raw or {})


# ---------------------------------------------------------------------------
# Initial states
# ---------------------------------------------------------------------------


def init_line_benchmark(n_agents: int, seed: int) -> Configuration:
    """Agents on a horizontal line, spacing 1.5, small Gaussian y offsets."""
    if n_agents < 2:
        raise ValueError("at least two agents required")
    for attempt in range(10):
        rng = np.random.default_rng(seed + attempt)
        x = -6.75 + 1.5 * np.arange(n_agents)
        y = 0.1 * rng.standard_normal(n_agents)
        config = Configuration(np.column_stack([x, y]))
        d2 = _pairwise_sq_distances(config.positions)
        if d2.min() > 0.75:
            return config
    raise RuntimeError("could not draw a feasible line configuration")


def _pairwise_sq_distances(positions: np.ndarray) -> np.ndarray:
    diff = positions[:, None, :] - positions[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    return d2[np.triu_indices(len(positions), k=1)]


def _initial_world(scenario: Scenario) -> WorldState:
    n = scenario.n_agents
    if scenario.init.kind == "line":
        if scenario.dim != 2:
            raise ValueError("the line benchmark is two-dimensional")
        config = init_line_benchmark(n, scenario.seed)
        return WorldState(config.positions, np.zeros((n, 2)))
    if scenario.init.kind == "explicit":
        return WorldState(
            scenario.init.positions, np.zeros((n, scenario.dim))
        )
    rng = np.random.default_rng(scenario.seed)
    half = scenario.init.box
    for _ in range(2000):
        pos = rng.uniform(-half, half, size=(n, scenario.dim))
        d2 = _pairwise_sq_distances(pos)
        if d2.min() <= scenario.params.rho1 + scenario.init.margin:
            continue
        lam = algebraic_connectivity(
            build_graph(Configuration(pos), scenario.params).laplacian
        )
        if lam > 1e-3:
            return WorldState(pos, np.zeros((n, scenario.dim)))
    raise RuntimeError(
        "could not sample a feasible connected configuration; adjust init.box "
        "(half-width of the sampling square) to the fleet size and rho2"
    )


# ---------------------------------------------------------------------------
# Load-time validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    messages: tuple
    rho_bar: float | None
    lambda2_initial: float
    min_d2_initial: float


def check_scenario(scenario: Scenario) -> CheckReport:
    """Validate the initial state and the collision margin without running."""
    messages = []
    ok = True
    world = _initial_world(scenario)
    d2 = _pairwise_sq_distances(world.positions)
    min_d2 = float(d2.min())
    if min_d2 <= scenario.params.rho1:
        ok = False
        messages.append(
            f"initial state infeasible: min d2 {min_d2:.6g} <= rho1 {scenario.params.rho1:.6g}"
        )
    else:
        messages.append(f"initial min d2 {min_d2:.6g} > rho1 {scenario.params.rho1:.6g}")
    lam = algebraic_connectivity(
        build_graph(Configuration(world.positions), scenario.params).laplacian
    )
    if lam <= 0:
        messages.append("warning: initial graph is disconnected (lambda2 = 0)")
    else:
        messages.append(f"initial lambda2 {lam:.6g}")

    rho_bar = None
    if scenario.mode != "centralized-si":
        rho_bar = collision_bound(scenario.dynamics, scenario.polytopes)
        if scenario.params.rho1 > rho_bar:
            messages.append(
                f"collision margin ok: rho1 {scenario.params.rho1:.6g} > rho_bar {rho_bar:.6g}"
            )
        else:
            ok = False
            messages.append(
                f"collision margin violated: rho1 {scenario.params.rho1:.6g} <= rho_bar {rho_bar:.6g}"
            )
        for i in range(scenario.n_agents):
            fv = velocity_feasible_set(scenario.dynamics[i], scenario.polytopes[i])
            if not fv.contains(world.velocities[i], tol=1e-9):
                ok = False
                messages.append(f"agent {i}: initial velocity not stoppable")
    return CheckReport(
        ok=ok,
        messages=tuple(messages),
        rho_bar=rho_bar,
        lambda2_initial=float(lam),
        min_d2_initial=min_d2,
    )


# ---------------------------------------------------------------------------
# Step engines
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StepLog:
    k: int
    lambda2_lin: float
    lambda2_actual: float
    gamma_min: float
    gamma_max: float
    min_d2: float
    mean_n: float
    statuses: dict
    wall_time: float


@dataclass
class RunResult:
    scenario: Scenario
    states: list
    logs: list
    sizes_history: list
    inputs_history: list
    summary: dict


def _status_cell(statuses: dict) -> str:
    return "|".join(f"{name}:{count}" for name, count in sorted(statuses.items()))


def _aggregate_statuses(statuses) -> dict:
    out: dict = {}
    for s in statuses:
        out[s] = out.get(s, 0) + 1
    return out


def _finite_min_max(values: np.ndarray) -> tuple[float, float]:
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return float("nan"), float("nan")
    return float(finite.min()), float(finite.max())


def _centralized_step(world: WorldState, scenario: Scenario):
    config = Configuration(world.positions)
    coeffs = linearize(config, scenario.params)
    lam_base = algebraic_connectivity(build_graph(config, scenario.params).laplacian)
    if scenario.mode == "centralized-si":
        prog = build_centralized_si(
            config, scenario.params, coeffs, scenario.v_max, scenario.ts
        )
        out = solve(prog, **scenario.solver_options)
        if out.status != "optimal":
            delta = np.zeros_like(world.positions)
            gamma = float("nan")
        else:
            delta = out.delta_x
            gamma = out.gamma
        next_world = WorldState(world.positions + delta, world.velocities * 0.0)
        inputs = None
    else:
        prog = build_centralized_lti(
            config,
            world.velocities,
            scenario.params,
            coeffs,
            scenario.dynamics,
            scenario.polytopes,
        )
        out = solve(prog, **scenario.solver_options)
        n = scenario.n_agents
        if out.status != "optimal":
            # park the fleet: admissible whenever the state is feasible
            inputs = np.stack(
                [
                    _stop_inputs(
                        scenario.dynamics[i], world.positions[i], world.velocities[i]
                    )
                    for i in range(n)
                ]
            )
            gamma = float("nan")
        else:
            inputs = out.inputs
            gamma = out.gamma
        nx = np.empty_like(world.positions)
        nv = np.empty_like(world.velocities)
        for i in range(scenario.n_agents):
            after = step(
                scenario.dynamics[i],
                LiftedState(world.positions[i], world.velocities[i]),
                LiftedInput(inputs[i, 0], inputs[i, 1]),
            )
            nx[i] = after.x
            nv[i] = after.v
        next_world = WorldState(nx, nv)
    delta = next_world.positions - world.positions
    lam_lin = algebraic_connectivity(delta_laplacian(coeffs, delta))
    return next_world, inputs, lam_base, lam_lin, gamma, out.status


def _stop_inputs(dyn: AgentDynamics, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    u = invert_control(dyn, LiftedState(x, v), LiftedState(x, np.zeros_like(v)))
    return np.stack([u.u_first, u.u_second])


def _verify_step(
    scenario: Scenario,
    world: WorldState,
    next_world: WorldState,
    inputs,
    lam_base: float,
    lam_lin: float,
    rho_bar: float | None,
    k: int,
):
    """Runtime invariants; violations indicate an implementation bug."""
    if lam_lin < lam_base - 1e-6:
        raise RuntimeError(
            f"step {k}: linearized connectivity dropped {lam_base:.9g} -> {lam_lin:.9g}"
        )
    d2 = _pairwise_sq_distances(next_world.positions)
    if d2.min() <= scenario.params.rho1:
        raise RuntimeError(
            f"step {k}: pair closer than rho1 after the move (min d2 {d2.min():.9g})"
        )
    if scenario.mode == "centralized-si":
        return
    # intermediate sub-step: positions advance by A1 v before any input acts
    mid = np.vstack(
        [
            world.positions[i] + scenario.dynamics[i].a1 @ world.velocities[i]
            for i in range(scenario.n_agents)
        ]
    )
    margin = math.sqrt(scenario.params.rho1) - math.sqrt(rho_bar)
    mid_d = np.sqrt(_pairwise_sq_distances(mid))
    if mid_d.min() <= margin:
        raise RuntimeError(
            f"step {k}: sub-step separation {mid_d.min():.9g} under margin {margin:.9g}"
        )
    for i in range(scenario.n_agents):
        fv = velocity_feasible_set(scenario.dynamics[i], scenario.polytopes[i])
        if not fv.contains(next_world.velocities[i], tol=1e-7):
            raise RuntimeError(f"step {k}: agent {i} velocity left the stoppable set")
        if inputs is not None:
            poly = scenario.polytopes[i]
            if not (
                poly.contains(inputs[i, 0], tol=1e-7)
                and poly.contains(inputs[i, 1], tol=1e-7)
            ):
                raise RuntimeError(f"step {k}: agent {i} input left the polytope")


def run(
    scenario: Scenario,
    out_dir=None,
    paired_centralized: bool = False,
) -> RunResult:
    """Execute the scenario; optionally write artifacts and a paired run."""
    report = check_scenario(scenario)
    if not report.ok:
        raise RuntimeError("scenario rejected: " + "; ".join(report.messages))
    rho_bar = report.rho_bar

    world = _initial_world(scenario)
    sizes = scenario.n_init.copy()
    states = [world]
    sizes_history = [sizes.copy()]
    inputs_history: list = []
    logs: list[StepLog] = []
    start = time.perf_counter()

    for k in range(1, scenario.steps + 1):
        t0 = time.perf_counter()
        if scenario.mode in ("centralized-si", "centralized-lti"):
            next_world, inputs, lam_base, lam_lin, gamma, status = _centralized_step(
                world, scenario
            )
            gammas = np.array([gamma])
            statuses = _aggregate_statuses([status])
            mean_n = float(scenario.n_agents)
        else:
            if scenario.mode == "adaptive" and k > 1 and (k - 1) % scenario.policy.period == 0:
                sizes = _resize_neighborhoods(scenario, world, sizes)
            view = build_graph(Configuration(world.positions), scenario.params)
            index = build_neighborhoods(
                view.edge_i, view.edge_j, scenario.n_agents, sizes
            )
            weights = merge_weights(index, scenario.alpha)
            outcome = algorithm1_step(
                world,
                index,
                weights,
                scenario.params,
                scenario.dynamics,
                scenario.polytopes,
                scenario.solver_options,
            )
            next_world = outcome.world
            inputs = outcome.merge.inputs
            lam_base = outcome.lambda2_base
            lam_lin = outcome.lambda2_linear
            gammas = outcome.gammas
            statuses = _aggregate_statuses(outcome.statuses)
            mean_n = float(np.mean(sizes))

        _verify_step(
            scenario, world, next_world, inputs, lam_base, lam_lin, rho_bar, k
        )
        world = next_world
        states.append(world)
        sizes_history.append(sizes.copy())
        inputs_history.append(None if inputs is None else np.array(inputs, copy=True))

        lam_actual = algebraic_connectivity(
            build_graph(Configuration(world.positions), scenario.params).laplacian
        )
        d2 = _pairwise_sq_distances(world.positions)
        g_min, g_max = _finite_min_max(np.asarray(gammas, dtype=float))
        logs.append(
            StepLog(
                k=k,
                lambda2_lin=float(lam_lin),
                lambda2_actual=float(lam_actual),
                gamma_min=g_min,
                gamma_max=g_max,
                min_d2=float(d2.min()),
                mean_n=mean_n,
                statuses=statuses,
                wall_time=time.perf_counter() - t0,
            )
        )

    wall = time.perf_counter() - start
    lam0 = algebraic_connectivity(
        build_graph(Configuration(states[0].positions), scenario.params).laplacian
    )
    summary = {
        "mode": scenario.mode,
        "n_agents": scenario.n_agents,
        "steps": scenario.steps,
        "seed": scenario.seed,
        "lambda2_initial": float(lam0),
        "lambda2_final": logs[-1].lambda2_actual,
        "growth_ratio": logs[-1].lambda2_actual / lam0 if lam0 > 0 else float("inf"),
        "min_d2_final": logs[-1].min_d2,
        "rho_bar": rho_bar,
        "wall_time_s": wall,
        "statuses": _merge_status_counts(logs),
        "lambda2_trajectory": [log.lambda2_actual for log in logs],
    }

    if paired_centralized and scenario.mode != "centralized-lti":
        paired = Scenario(**{**scenario.__dict__, "mode": "centralized-lti"})
        paired_result = run(paired, out_dir=None, paired_centralized=False)
        summary["centralized_lambda2_final"] = paired_result.summary["lambda2_final"]
        summary["final_ratio_vs_centralized"] = (
            summary["lambda2_final"] / summary["centralized_lambda2_final"]
        )

    result = RunResult(
        scenario=scenario,
        states=states,
        logs=logs,
        sizes_history=sizes_history,
        inputs_history=inputs_history,
        summary=summary,
    )
    if out_dir is not None:
        write_artifacts(result, out_dir)
    return result


def _merge_status_counts(logs) -> dict:
    merged: dict = {}
    for log in logs:
        for name, count in log.statuses.items():
            merged[name] = merged.get(name, 0) + count
    return merged


def _resize_neighborhoods(
    scenario: Scenario, world: WorldState, sizes: np.ndarray
) -> np.ndarray:
    new_sizes = sizes.copy()
    for i in range(scenario.n_agents):
        try:
            measures = suboptimality(
                i,
                world,
                int(sizes[i]),
                scenario.params,
                scenario.dynamics,
                scenario.polytopes,
                sizes,
                scenario.alpha,
                scenario.solver_options,
            )
        except UndefinedMeasureError:
            continue
        new_sizes[i] = update_n(measures, scenario.policy, int(sizes[i]))
    return new_sizes


# ---------------------------------------------------------------------------
# Artifacts
# ---------------------------------------------------------------------------


def write_artifacts(result: RunResult, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_steps_csv(result, out / "steps.csv")
    _write_trajectory_csv(result, out / "trajectory.csv")
    with open(out / "summary.json", "w") as fh:
        json.dump(result.summary, fh, indent=2)
        fh.write("\n")


def _fmt(value) -> str:
    return repr(float(value))


def _write_steps_csv(result: RunResult, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(STEPS_HEADER)
        for log in result.logs:
            writer.writerow(
                [
                    log.k,
                    _fmt(log.lambda2_lin),
                    _fmt(log.lambda2_actual),
                    _fmt(log.gamma_min),
                    _fmt(log.gamma_max),
                    _fmt(log.min_d2),
                    _fmt(log.mean_n),
                    _status_cell(log.statuses),
                ]
            )


def _write_trajectory_csv(result: RunResult, path):
    dim = result.scenario.dim
    header = ["k", "agent"]
    header += [f"x{d + 1}" for d in range(dim)]
    header += [f"v{d + 1}" for d in range(dim)]
    header += ["n_i"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k, (state, sizes) in enumerate(zip(result.states, result.sizes_history)):
            for i in range(result.scenario.n_agents):
                row = [k, i]
                row += [_fmt(state.positions[i, d]) for d in range(dim)]
                row += [_fmt(state.velocities[i, d]) for d in range(dim)]
                row += [int(sizes[i])]
                writer.writerow(row)


def benchmark_scenario(
    mode: str = "distributed",
    steps: int = 100,
    seed: int = 0,
    n_agents: int = 10,
    n_init: int = 2,
) -> Scenario:
    """The reference line-start scenario with the paper-style parameters."""
    return scenario_from_dict(
        {
            "n_agents": n_agents,
            "steps": steps,
            "seed": seed,
            "mode": mode,
            "n_init": n_init,
        }
    )
