"""Per-agent lifted LTI dynamics and admissible-motion sets.

One optimizer step spans two plant sub-steps of the second-order recurrence
    x(t+1) = x(t) + A1 v(t)
    v(t+1) = A2 v(t) + b1 u(t)
so the optimizer sees position as directly controllable. This module builds
the lifted maps, inverts them, derives the feasible-velocity polytope (the
velocities from which an admissible input pair can park the agent at its
current position), and bounds the worst-case single-sub-step displacement
mismatch between two agents, which calibrates the collision margin.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

__all__ = [
    "AgentDynamics",
    "InputPolytope",
    "LiftedState",
    "LiftedInput",
    "LiftedMaps",
    "VelocityFeasibleSet",
    "lift",
    "step",
    "substep",
    "invert_control",
    "velocity_feasible_set",
    "polytope_vertices",
    "collision_bound",
    "check_collision_margin",
]

# Box used to detect recession directions during vertex enumeration.
_BOUND_BOX = 1e6
_VERTEX_TOL = 1e-9


def _as_matrix(m, dim: int, name: str) -> np.ndarray:
    out = np.asarray(m, dtype=float)
    if out.shape != (dim, dim):
        raise ValueError(f"{name} must be {dim}x{dim}, got {out.shape}")
    return out


@dataclass(frozen=True)
class AgentDynamics:
    """Second-order LTI parameters (A1, A2, b1) of one agent."""

    a1: np.ndarray
    a2: np.ndarray
    b1: float

    def __post_init__(self) -> None:
        a1 = np.asarray(self.a1, dtype=float)
        if a1.ndim != 2 or a1.shape[0] != a1.shape[1]:
            raise ValueError("a1 must be square")
        dim = a1.shape[0]
        a2 = _as_matrix(self.a2, dim, "a2")
        # position must stay reachable through A1
        if np.linalg.svd(a1, compute_uv=False)[-1] <= 1e-10:
            raise ValueError("a1 must be full rank")
        if self.b1 == 0.0:
            raise ValueError("b1 must be nonzero")
        object.__setattr__(self, "a1", a1)
        object.__setattr__(self, "a2", a2)
        object.__setattr__(self, "b1", float(self.b1))

    @property
    def dim(self) -> int:
        return self.a1.shape[0]

    @staticmethod
    def isotropic(a1: float, a2: float, b1: float, dim: int) -> "AgentDynamics":
        """Scalar gains applied identically on every axis."""
        eye = np.eye(dim)
        return AgentDynamics(a1=a1 * eye, a2=a2 * eye, b1=b1)


@dataclass(frozen=True)
class InputPolytope:
    """Admissible input set {u : H u <= h}."""

    H: np.ndarray
    h: np.ndarray

    def __post_init__(self) -> None:
        H = np.asarray(self.H, dtype=float)
        h = np.asarray(self.h, dtype=float).reshape(-1)
        if H.ndim != 2 or H.shape[0] != h.shape[0]:
            raise ValueError("H must be (m, dim) with h of length m")
        if not (np.all(np.isfinite(H)) and np.all(np.isfinite(h))):
            raise ValueError("H and h must be finite")
        if np.any(h < 0):
            raise ValueError("h must be componentwise nonnegative (0 admissible)")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "h", h)

    @property
    def dim(self) -> int:
        return self.H.shape[1]

    def contains(self, u, tol: float = 1e-9) -> bool:
        return bool(np.all(self.H @ np.asarray(u, dtype=float) <= self.h + tol))


@dataclass(frozen=True)
class LiftedState:
    """Position and velocity of one agent."""

    x: np.ndarray
    v: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if x.shape != v.shape or x.ndim != 1:
            raise ValueError("x and v must be vectors of equal length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise ValueError("state entries must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)


@dataclass(frozen=True)
class LiftedInput:
    """Input pair (u at t, u at t+1) spanning one lifted step."""

    u_first: np.ndarray
    u_second: np.ndarray

    def __post_init__(self) -> None:
        uf = np.asarray(self.u_first, dtype=float)
        us = np.asarray(self.u_second, dtype=float)
        if uf.shape != us.shape or uf.ndim != 1:
            raise ValueError("u_first and u_second must be vectors of equal length")
        object.__setattr__(self, "u_first", uf)
        object.__setattr__(self, "u_second", us)


@dataclass(frozen=True)
class LiftedMaps:
    """One-lifted-step state and input matrices."""

    state_map: np.ndarray
    input_map: np.ndarray


@dataclass(frozen=True)
class VelocityFeasibleSet:
    """Velocities v with M v <= rhs from which the agent can park in place."""

    M: np.ndarray
    rhs: np.ndarray

    def contains(self, v, tol: float = 1e-9) -> bool:
        return bool(np.all(self.M @ np.asarray(v, dtype=float) <= self.rhs + tol))


# ---------------------------------------------------------------------------
# Lifted maps
# ---------------------------------------------------------------------------

def lift(dyn: AgentDynamics) -> LiftedMaps:
    """Compose two sub-steps into one step on (x, v)."""
    d = dyn.dim
    eye = np.eye(d)
    zero = np.zeros((d, d))
    state_map = np.block([
        [eye, dyn.a1 @ (eye + dyn.a2)],
        [zero, dyn.a2 @ dyn.a2],
    ])
    input_map = np.block([
        [dyn.b1 * dyn.a1, zero],
        [dyn.b1 * dyn.a2, dyn.b1 * eye],
    ])
    return LiftedMaps(state_map=state_map, input_map=input_map)


def substep(dyn: AgentDynamics, state: LiftedState, u) -> LiftedState:
    """One plant sub-step."""
    u = np.asarray(u, dtype=float)
    return LiftedState(x=state.x + dyn.a1 @ state.v, v=dyn.a2 @ state.v + dyn.b1 * u)


def step(dyn: AgentDynamics, state: LiftedState, inp: LiftedInput) -> LiftedState:
    """Two plant sub-steps, equal to one application of the lifted maps."""
    mid = substep(dyn, state, inp.u_first)
    return substep(dyn, mid, inp.u_second)


def invert_control(dyn: AgentDynamics, from_state: LiftedState, to_state: LiftedState) -> LiftedInput:
    """Input pair driving from_state to to_state in one lifted step."""
    d = dyn.dim
    eye = np.eye(d)
    u1 = (np.linalg.solve(dyn.a1, to_state.x - from_state.x)
          - (eye + dyn.a2) @ from_state.v) / dyn.b1
    u2 = (to_state.v - dyn.a2 @ dyn.a2 @ from_state.v) / dyn.b1 - dyn.a2 @ u1
    return LiftedInput(u_first=u1, u_second=u2)


def velocity_feasible_set(dyn: AgentDynamics, poly: InputPolytope) -> VelocityFeasibleSet:
    """Inequality form of the set of velocities the agent can stop from.

    A velocity v is feasible when the unique input pair returning the agent
    to its current position with zero velocity, u(t) = -b1^-1 (I + A2) v and
    u(t+1) = b1^-1 A2 v, lies in the admissible polytope at both sub-steps.
    """
    eye = np.eye(dyn.dim)
    m_top = -(poly.H @ (eye + dyn.a2)) / dyn.b1
    m_bot = (poly.H @ dyn.a2) / dyn.b1
    return VelocityFeasibleSet(
        M=np.vstack([m_top, m_bot]),
        rhs=np.concatenate([poly.h, poly.h]),
    )


# ---------------------------------------------------------------------------
# Vertex enumeration and the collision bound
# ---------------------------------------------------------------------------

def polytope_vertices(M: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """All vertices of {v : M v <= rhs}.

    Solves every square subsystem of active rows and keeps feasible
    solutions. Raises if the set is empty or has a recession direction
    (detected with a large bounding box).
    """
    M = np.asarray(M, dtype=float)
    rhs = np.asarray(rhs, dtype=float).reshape(-1)
    dim = M.shape[1]
    boxed_m = np.vstack([M, np.eye(dim), -np.eye(dim)])
    boxed_rhs = np.concatenate([rhs, np.full(2 * dim, _BOUND_BOX)])
    scale = max(1.0, float(np.max(np.abs(rhs), initial=0.0)))

    verts: list[np.ndarray] = []
    box_hit = False
    for rows in combinations(range(boxed_m.shape[0]), dim):
        sub = boxed_m[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        point = np.linalg.solve(sub, boxed_rhs[list(rows)])
        if np.all(boxed_m @ point <= boxed_rhs + _VERTEX_TOL * scale):
            if np.max(np.abs(point)) >= _BOUND_BOX * (1.0 - 1e-9):
                box_hit = True
            else:
                verts.append(point)
    if box_hit:
        raise ValueError("unbounded feasible set: recession direction present")
    if not verts:
        raise ValueError("empty feasible set")
    unique: dict[tuple, np.ndarray] = {}
    for p in verts:
        unique.setdefault(tuple(np.round(p, 9)), p)
    return np.array([unique[k] for k in sorted(unique)])


def _displacement_corners(dyn: AgentDynamics, poly: InputPolytope) -> np.ndarray:
    fv = velocity_feasible_set(dyn, poly)
    return polytope_vertices(fv.M, fv.rhs) @ dyn.a1.T


def _collision_bound_detail(
    dynamics: Sequence[AgentDynamics], polytopes: Sequence[InputPolytope]
) -> tuple[float, tuple[int, int]]:
    if len(dynamics) != len(polytopes) or not dynamics:
        raise ValueError("need matching nonempty dynamics and polytope lists")
    if len(dynamics) == 1:
        # a lone record stands for a fleet of identical agents
        dynamics = [dynamics[0], dynamics[0]]
        polytopes = [polytopes[0], polytopes[0]]
    corners = [_displacement_corners(d, p) for d, p in zip(dynamics, polytopes)]
    best = -1.0
    best_pair = (0, 1)
    for i in range(len(corners)):
        for j in range(i + 1, len(corners)):
            diff = corners[i][:, None, :] - corners[j][None, :, :]
            value = float(np.max(np.einsum("pqd,pqd->pq", diff, diff)))
            if value > best:
                best = value
                best_pair = (i, j)
    return best, best_pair


def collision_bound(
    dynamics: Sequence[AgentDynamics], polytopes: Sequence[InputPolytope]
) -> float:
    """Worst-case squared sub-step displacement mismatch over agent pairs.

    max over pairs (i, j) of max |A1_i v_i - A1_j v_j|^2 with each v ranging
    over its feasible-velocity polytope; exact because the convex objective
    attains its maximum at a vertex pair.
    """
    value, _ = _collision_bound_detail(dynamics, polytopes)
    return value


def check_collision_margin(rho1: float, rho_bar_1: float) -> bool:
    """True when the distance threshold strictly dominates the motion bound."""
    return rho1 > rho_bar_1
