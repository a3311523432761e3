"""Neighborhood-limited solving and merging of per-agent motion proposals.

Every agent owns a conic program over its enlarged neighborhood (a BFS ball
in the current communication graph). The programs are independent; the merge
step recombines the proposals into one global motion by weighted averaging
of the proposed inputs, then advances each agent through its true dynamics.

The scaling of the local problem data (dynamics, input polytope, distance
thresholds) is chosen so that the merged motion satisfies the unscaled global
constraints whenever every local program satisfies its own.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dynamics import (
    AgentDynamics,
    InputPolytope,
    LiftedInput,
    LiftedState,
    invert_control,
    step,
)
from .graph import (
    Configuration,
    WeightParams,
    algebraic_connectivity,
    build_graph,
    delta_laplacian,
    linearize,
)
from .sdp import SolveOutcome, build_local, solve

ALPHA_BAR_TOL = 1e-9


@dataclass(frozen=True)
class WorldState:
    """Positions and velocities of the whole fleet at one time step."""

    positions: np.ndarray
    velocities: np.ndarray

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        vel = np.atleast_2d(np.asarray(self.velocities, dtype=float))
        if pos.shape != vel.shape:
            raise ValueError("positions and velocities must have equal shapes")
        if not (np.isfinite(pos).all() and np.isfinite(vel).all()):
            raise ValueError("world state must be finite")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "velocities", vel)

    @property
    def n_agents(self) -> int:
        return self.positions.shape[0]

    @property
    def dim(self) -> int:
        return self.positions.shape[1]


@dataclass(frozen=True)
class NeighborhoodIndex:
    """Per-agent neighborhood structure over one communication graph.

    members[i] is the BFS ball of radius sizes[i] around agent i (sorted,
    includes i). boundary[i] holds the members at distance exactly sizes[i].
    served_by[i] lists the agents whose ball contains i; agent i receives a
    motion proposal from each of them.
    """

    sizes: np.ndarray
    members: tuple
    boundary: tuple
    served_by: tuple

    @property
    def n_agents(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class MergeWeights:
    """Combination weights for the proposal merge.

    alpha[p] scales agent p's proposal wherever it is used. alpha_bar[i] is
    the total weight of all proposals covering agent i; it must not exceed 1,
    otherwise the merged displacement could leave the trust region of the
    per-edge linearizations.
    """

    index: NeighborhoodIndex
    alpha: np.ndarray
    alpha_bar: np.ndarray

    def pair_scale(self, i: int, j: int) -> float:
        """Total weight of the proposals that cover agents i and j jointly."""
        shared = np.intersect1d(self.index.served_by[i], self.index.served_by[j])
        if shared.size == 0:
            raise ValueError(f"no program covers the pair ({i},{j})")
        return float(self.alpha[shared].sum())


def _adjacency(edges: np.ndarray) -> dict:
    adj: dict = {}
    for p, q in edges:
        adj.setdefault(int(p), set()).add(int(q))
        adj.setdefault(int(q), set()).add(int(p))
    return adj


def _bfs_ball(adj: dict, i: int, radius: int) -> dict:
    """Hop distances from i, cut off at the given radius."""
    dist = {i: 0}
    queue = deque([i])
    while queue:
        node = queue.popleft()
        d = dist[node]
        if d == radius:
            continue
        for nb in adj.get(node, ()):
            if nb not in dist:
                dist[nb] = d + 1
                queue.append(nb)
    return dist


def enlarged_neighborhood(edges, i: int, n_i: int) -> tuple[np.ndarray, np.ndarray]:
    """BFS ball of radius n_i around agent i, plus its outermost shell.

    edges is a sequence of undirected (p, q) pairs. Returns (members,
    boundary), both sorted; boundary holds the members at hop distance
    exactly n_i.
    """
    if n_i < 1:
        raise ValueError("neighborhood size must be at least 1")
    arr = np.asarray(list(edges), dtype=int).reshape(-1, 2)
    dist = _bfs_ball(_adjacency(arr), int(i), int(n_i))
    members = np.array(sorted(dist), dtype=int)
    boundary = np.array(sorted(p for p, d in dist.items() if d == n_i), dtype=int)
    return members, boundary


def dual_index(member_sets: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Transpose of the membership relation: who includes me in their ball."""
    n = len(member_sets)
    served: list[list[int]] = [[] for _ in range(n)]
    for p, ball in enumerate(member_sets):
        for j in ball:
            served[int(j)].append(p)
    return [np.array(sorted(s), dtype=int) for s in served]


def build_neighborhoods(edge_i, edge_j, n_agents: int, sizes) -> NeighborhoodIndex:
    """Assemble the full neighborhood structure for the current edge set."""
    sizes = np.asarray(sizes, dtype=int)
    if sizes.shape != (n_agents,):
        raise ValueError("one neighborhood size per agent required")
    if (sizes < 1).any() or (sizes > n_agents).any():
        raise ValueError("neighborhood sizes must lie in [1, n_agents]")
    pairs = np.column_stack([np.asarray(edge_i, int), np.asarray(edge_j, int)])
    adj = _adjacency(pairs)
    members = []
    boundary = []
    for i in range(n_agents):
        dist = _bfs_ball(adj, i, int(sizes[i]))
        members.append(np.array(sorted(dist), dtype=int))
        boundary.append(
            np.array(sorted(p for p, d in dist.items() if d == sizes[i]), dtype=int)
        )
    served = dual_index(members)
    return NeighborhoodIndex(
        sizes=sizes,
        members=tuple(members),
        boundary=tuple(boundary),
        served_by=tuple(served),
    )


def merge_weights(index: NeighborhoodIndex, alpha=None) -> MergeWeights:
    """Validate combination weights; default is uniform 1/N."""
    n = index.n_agents
    if alpha is None:
        alpha = np.full(n, 1.0 / n)
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (n,):
        raise ValueError("one weight per agent required")
    if (alpha <= 0).any():
        raise ValueError("combination weights must be positive")
    alpha_bar = np.array([alpha[index.served_by[i]].sum() for i in range(n)])
    if (alpha_bar > 1.0 + ALPHA_BAR_TOL).any():
        raise ValueError("total coverage weight above 1 voids the linearization")
    return MergeWeights(index=index, alpha=alpha, alpha_bar=alpha_bar)


def _scaled_dynamics(dyn: AgentDynamics, alpha_bar: float) -> AgentDynamics:
    return AgentDynamics(a1=dyn.a1 / alpha_bar, a2=dyn.a2, b1=dyn.b1 * alpha_bar)


def scaled_local_params(
    dyn: AgentDynamics, poly: InputPolytope, alpha_bar: float
) -> tuple[AgentDynamics, InputPolytope]:
    """Dynamics and input set as seen inside a local program.

    The position map is stretched by 1/alpha_bar and the input gain shrunk by
    alpha_bar, so that averaging the proposals with total weight alpha_bar
    reproduces a true step of the unscaled plant. The velocity polytope of the
    scaled plant equals the unscaled one.
    """
    if alpha_bar <= 0:
        raise ValueError("alpha_bar must be positive")
    if alpha_bar > 1.0 + ALPHA_BAR_TOL:
        raise ValueError("alpha_bar above 1 voids the linearization")
    return _scaled_dynamics(dyn, alpha_bar), InputPolytope(H=poly.H, h=poly.h / alpha_bar)


def local_rho(rho1: float, d2_now: float, alpha_bar_ij: float) -> float:
    """Distance threshold for one edge inside a local program.

    Chosen so that mixing a fraction alpha_bar_ij of constrained proposals
    with the stationary remainder lands exactly on the global threshold:
    (1 - a)*d2 + a*rho_hat = rho1.
    """
    if alpha_bar_ij <= 0:
        raise ValueError("alpha_bar_ij must be positive")
    return (rho1 - (1.0 - alpha_bar_ij) * d2_now) / alpha_bar_ij


@dataclass(frozen=True)
class LocalSolution:
    """One agent's motion proposal for every member of its neighborhood.

    Arrays are indexed like `members` (sorted global ids). Boundary members
    are frozen: zero displacement, zero next velocity, and inputs that park
    them, so any program covering them agrees on their contribution.
    """

    owner: int
    members: np.ndarray
    free_mask: np.ndarray
    gamma: float
    delta_x: np.ndarray
    v_next: np.ndarray
    inputs: np.ndarray
    status: str

    def row_of(self, agent: int) -> int:
        pos = int(np.searchsorted(self.members, agent))
        if pos >= len(self.members) or self.members[pos] != agent:
            raise KeyError(f"agent {agent} not covered by program {self.owner}")
        return pos


def padded_delta(solution: LocalSolution, n_agents: int) -> np.ndarray:
    """Embed a local displacement proposal into the full fleet (zeros outside)."""
    out = np.zeros((n_agents, solution.delta_x.shape[1]))
    out[solution.members] = solution.delta_x
    return out


def _stationary_solution(
    i: int,
    world: WorldState,
    index: NeighborhoodIndex,
    weights: MergeWeights,
    dynamics: Sequence[AgentDynamics],
    status: str,
) -> LocalSolution:
    """Park every member: no displacement, zero next velocity.

    The parking inputs are computed against the scaled plant of each member,
    so the merged input still stops the true plant exactly.
    """
    members = index.members[i]
    boundary = set(index.boundary[i].tolist())
    dim = world.dim
    nm = len(members)
    inputs = np.zeros((nm, 2, dim))
    for r, j in enumerate(members):
        j = int(j)
        dyn_hat = _scaled_dynamics(dynamics[j], float(weights.alpha_bar[j]))
        here = LiftedState(x=world.positions[j], v=world.velocities[j])
        parked = LiftedState(x=world.positions[j], v=np.zeros(dim))
        u = invert_control(dyn_hat, here, parked)
        inputs[r, 0] = u.u_first
        inputs[r, 1] = u.u_second
    free_mask = np.array([int(j) not in boundary for j in members])
    return LocalSolution(
        owner=i,
        members=members,
        free_mask=free_mask,
        gamma=float("nan"),
        delta_x=np.zeros((nm, dim)),
        v_next=np.zeros((nm, dim)),
        inputs=inputs,
        status=status,
    )


def solve_local(
    i: int,
    world: WorldState,
    params: WeightParams,
    dynamics: Sequence[AgentDynamics],
    polytopes: Sequence[InputPolytope],
    index: NeighborhoodIndex,
    weights: MergeWeights,
    solver_options: dict | None = None,
) -> LocalSolution:
    """Build and solve agent i's neighborhood program.

    Falls back to the stationary proposal when the solver fails; that
    proposal always satisfies the local constraints from a feasible state.
    """
    members = index.members[i]
    if len(members) == 1:
        return _stationary_solution(i, world, index, weights, dynamics, "isolated")

    local_config = Configuration(world.positions[members])
    local_vel = world.velocities[members]
    coeffs = linearize(local_config, params)

    scaled_dyn = []
    scaled_poly = []
    for j in members:
        dyn_hat, poly_hat = scaled_local_params(
            dynamics[int(j)], polytopes[int(j)], float(weights.alpha_bar[int(j)])
        )
        scaled_dyn.append(dyn_hat)
        scaled_poly.append(poly_hat)

    rho_edges = np.empty(coeffs.n_edges)
    for e in range(coeffs.n_edges):
        gi = int(members[coeffs.edge_i[e]])
        gj = int(members[coeffs.edge_j[e]])
        rho_edges[e] = local_rho(
            params.rho1, float(coeffs.base_sq_distances[e]), weights.pair_scale(gi, gj)
        )

    boundary = set(index.boundary[i].tolist())
    free_mask = np.array([int(j) not in boundary for j in members])

    try:
        prog = build_local(
            local_config,
            local_vel,
            coeffs,
            scaled_dyn,
            scaled_poly,
            rho_edges,
            members,
            free_mask,
        )
        out: SolveOutcome = solve(prog, **(solver_options or {}))
    except ValueError:
        return _stationary_solution(
            i, world, index, weights, dynamics, "fallback:build-error"
        )
    if out.status != "optimal":
        return _stationary_solution(
            i, world, index, weights, dynamics, f"fallback:{out.status}"
        )
    return LocalSolution(
        owner=i,
        members=members,
        free_mask=free_mask,
        gamma=out.gamma,
        delta_x=out.delta_x,
        v_next=out.v_next,
        inputs=out.inputs,
        status="optimal",
    )


@dataclass(frozen=True)
class MergeResult:
    """Merged global motion: applied inputs plus the implied next state."""

    next_world: WorldState
    inputs: np.ndarray
    predicted_positions: np.ndarray
    predicted_velocities: np.ndarray


def merge_step(
    solutions: Sequence[LocalSolution],
    weights: MergeWeights,
    dynamics: Sequence[AgentDynamics],
    world: WorldState,
) -> MergeResult:
    """Average the covering proposals per agent and step the true plant.

    Also reports the positions/velocities implied by averaging the proposals
    directly; these must coincide with the true step by construction of the
    scaled local parameters.
    """
    n = world.n_agents
    dim = world.dim
    index = weights.index
    inputs = np.zeros((n, 2, dim))
    pred_x = np.array(world.positions, copy=True)
    pred_v = np.zeros((n, dim))
    new_x = np.empty((n, dim))
    new_v = np.empty((n, dim))
    for i in range(n):
        for p in index.served_by[i]:
            sol = solutions[int(p)]
            if sol is None:
                raise ValueError(f"missing proposal from agent {p} covering {i}")
            r = sol.row_of(i)
            inputs[i] += weights.alpha[int(p)] * sol.inputs[r]
            pred_x[i] += weights.alpha[int(p)] * sol.delta_x[r]
            pred_v[i] += weights.alpha[int(p)] * sol.v_next[r]
        pred_v[i] /= weights.alpha_bar[i]
        here = LiftedState(x=world.positions[i], v=world.velocities[i])
        after = step(dynamics[i], here, LiftedInput(inputs[i, 0], inputs[i, 1]))
        new_x[i] = after.x
        new_v[i] = after.v
    return MergeResult(
        next_world=WorldState(positions=new_x, velocities=new_v),
        inputs=inputs,
        predicted_positions=pred_x,
        predicted_velocities=pred_v,
    )


@dataclass(frozen=True)
class StepOutcome:
    """Everything produced by one round of local solves plus the merge."""

    world: WorldState
    merge: MergeResult
    solutions: tuple
    index: NeighborhoodIndex
    weights: MergeWeights
    lambda2_base: float
    lambda2_linear: float
    gammas: np.ndarray
    statuses: tuple


def algorithm1_step(
    world: WorldState,
    index: NeighborhoodIndex,
    weights: MergeWeights,
    params: WeightParams,
    dynamics: Sequence[AgentDynamics],
    polytopes: Sequence[InputPolytope],
    solver_options: dict | None = None,
) -> StepOutcome:
    """One full distributed round: solve all neighborhoods, merge, actuate.

    The connectivity of the linearized Laplacian at the merged displacement
    never drops below the current value; each solver failure degrades only
    that agent's proposal to the stationary one.
    """
    config = Configuration(world.positions)
    coeffs = linearize(config, params)
    lam_base = algebraic_connectivity(
        build_graph(config, params).laplacian
    )
    solutions = tuple(
        solve_local(i, world, params, dynamics, polytopes, index, weights, solver_options)
        for i in range(world.n_agents)
    )
    merged = merge_step(solutions, weights, dynamics, world)
    delta = merged.next_world.positions - world.positions
    lam_lin = algebraic_connectivity(delta_laplacian(coeffs, delta))
    gammas = np.array([s.gamma for s in solutions])
    return StepOutcome(
        world=merged.next_world,
        merge=merged,
        solutions=solutions,
        index=index,
        weights=weights,
        lambda2_base=lam_base,
        lambda2_linear=lam_lin,
        gammas=gammas,
        statuses=tuple(s.status for s in solutions),
    )
