"""Shared fixtures-in-code for the test suite: benchmark parameters and
random feasible world states."""

import numpy as np

from connmax.dynamics import (
    AgentDynamics,
    InputPolytope,
    polytope_vertices,
    velocity_feasible_set,
)
from connmax.graph import Configuration, WeightParams, algebraic_connectivity, build_graph

PARAMS = WeightParams(rho1=0.75, rho2=3.0)
BENCH_DYN = AgentDynamics.isotropic(a1=0.5, a2=0.75, b1=0.5, dim=2)


def octagon(scale: float = 1.0) -> InputPolytope:
    H = np.array(
        [[1, 0], [-1, 0], [0, 1], [0, -1], [1, 1], [1, -1], [-1, 1], [-1, -1]],
        dtype=float,
    )
    h = scale * np.array([1, 1, 1, 1, 1.5, 1.5, 1.5, 1.5], dtype=float)
    return InputPolytope(H=H, h=h)


def random_feasible_world(
    rng,
    n,
    params: WeightParams = PARAMS,
    dyn: AgentDynamics = BENCH_DYN,
    poly: InputPolytope | None = None,
    margin: float = 0.08,
    max_tries: int = 500,
):
    """Connected configuration with safe pairwise margins plus interior velocities.

    Returns (Configuration, velocities). Velocities are drawn strictly inside
    the feasible-velocity polytope so park-in-place inputs are admissible.
    """
    poly = poly or octagon()
    fv = velocity_feasible_set(dyn, poly)
    verts = polytope_vertices(fv.M, fv.rhs)
    for _ in range(max_tries):
        pos = rng.uniform(-2.2, 2.2, size=(n, 2))
        d2 = np.sum((pos[:, None, :] - pos[None, :, :]) ** 2, axis=2)
        iu = np.triu_indices(n, k=1)
        if np.min(d2[iu]) <= params.rho1 + margin:
            continue
        g = build_graph(Configuration(positions=pos), params)
        if algebraic_connectivity(g.laplacian) < 1e-3:
            continue
        weights = rng.dirichlet(np.ones(verts.shape[0]), size=n)
        vel = 0.85 * weights @ verts
        return Configuration(positions=pos), vel
    raise RuntimeError("could not sample a feasible world")
