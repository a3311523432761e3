"""Online sizing of the per-agent neighborhoods.

Each agent occasionally prices its current neighborhood size against the
next size up and the next size down: it solves the three local programs,
evaluates all proposals on the larger program's linearized Laplacian, and
compares the connectivity they achieve. A proposal from a smaller
neighborhood that already captures almost all of the larger one's gain
means the extra communication is not paying for itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distributed import (
    LocalSolution,
    WorldState,
    build_neighborhoods,
    merge_weights,
    solve_local,
)
from .graph import (
    Configuration,
    WeightParams,
    algebraic_connectivity,
    build_graph,
    delta_laplacian,
    linearize,
)

DENOMINATOR_FLOOR = 1e-12


class UndefinedMeasureError(ValueError):
    """The reference program achieves no connectivity; the ratio is meaningless."""


@dataclass(frozen=True)
class SuboptimalityMeasures:
    e_plus: float
    e_minus: float

    def __post_init__(self):
        if not (np.isfinite(self.e_plus) and np.isfinite(self.e_minus)):
            raise ValueError("measures must be finite")


@dataclass(frozen=True)
class AdaptivePolicy:
    """Threshold rule for growing or shrinking a neighborhood size."""

    n_max: int
    grow_threshold: float = 0.05
    shrink_threshold: float = 0.01
    period: int = 5
    n_min: int = 1

    def __post_init__(self):
        if self.grow_threshold < 0 or self.shrink_threshold < 0:
            raise ValueError("thresholds must be nonnegative")
        if self.period < 1:
            raise ValueError("period must be at least 1")
        if not (1 <= self.n_min <= self.n_max):
            raise ValueError("size bounds must satisfy 1 <= n_min <= n_max")


def _proposal_connectivity(
    world: WorldState,
    params: WeightParams,
    solution: LocalSolution,
    members: np.ndarray,
) -> float:
    """Connectivity of one neighborhood's linearized Laplacian under a
    zero-padded proposal from a (possibly smaller) covered member set."""
    rows = np.searchsorted(members, solution.members)
    if np.any(rows >= len(members)) or np.any(members[rows] != solution.members):
        raise ValueError("proposal members must lie inside the evaluation set")
    local_config = Configuration(world.positions[members])
    coeffs = linearize(local_config, params)
    delta = np.zeros((len(members), world.dim))
    delta[rows] = solution.delta_x
    return algebraic_connectivity(delta_laplacian(coeffs, delta))


def suboptimality(
    i: int,
    world: WorldState,
    n_i: int,
    params: WeightParams,
    dynamics: Sequence,
    polytopes: Sequence,
    base_sizes,
    alpha=None,
    solver_options: dict | None = None,
) -> SuboptimalityMeasures:
    """Price agent i's neighborhood size against its neighbors' sizes.

    base_sizes holds every agent's current size; only agent i's entry is
    varied. Three local programs are solved (sizes n_i-1, n_i, n_i+1, the
    first skipped at the floor) and each smaller proposal is evaluated on
    the next larger program's Laplacian.
    """
    if n_i < 1:
        raise ValueError("neighborhood size must be at least 1")
    n = world.n_agents
    view = build_graph(Configuration(world.positions), params)

    def solved_at(m: int):
        sizes = np.asarray(base_sizes, dtype=int).copy()
        sizes[i] = m
        idx = build_neighborhoods(view.edge_i, view.edge_j, n, sizes)
        w = merge_weights(idx, alpha)
        sol = solve_local(
            i, world, params, dynamics, polytopes, idx, w, solver_options
        )
        return idx.members[i], sol

    members_up, sol_up = solved_at(min(n_i + 1, n))
    members_here, sol_here = solved_at(n_i)

    denom_up = _proposal_connectivity(world, params, sol_up, members_up)
    if denom_up <= DENOMINATOR_FLOOR:
        raise UndefinedMeasureError(
            f"agent {i}: enlarged program achieves no connectivity"
        )
    e_plus = 1.0 - _proposal_connectivity(world, params, sol_here, members_up) / denom_up

    if n_i == 1:
        e_minus = 0.0
    else:
        _, sol_down = solved_at(n_i - 1)
        denom_here = _proposal_connectivity(world, params, sol_here, members_here)
        if denom_here <= DENOMINATOR_FLOOR:
            raise UndefinedMeasureError(
                f"agent {i}: current program achieves no connectivity"
            )
        e_minus = (
            1.0
            - _proposal_connectivity(world, params, sol_down, members_here) / denom_here
        )
    return SuboptimalityMeasures(e_plus=float(e_plus), e_minus=float(e_minus))


def update_n(measures: SuboptimalityMeasures, policy: AdaptivePolicy, n_i: int) -> int:
    """Threshold rule: grow on a large upside, shrink when both gains are small."""
    if measures.e_plus > policy.grow_threshold:
        n = n_i + 1
    elif (
        measures.e_plus < policy.grow_threshold
        and measures.e_minus < policy.shrink_threshold
    ):
        n = n_i - 1
    else:
        n = n_i
    return int(np.clip(n, policy.n_min, policy.n_max))
