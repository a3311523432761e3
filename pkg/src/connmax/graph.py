"""State-dependent weighted communication graph.

Squared distances, compactly supported edge weights, Laplacian assembly,
the first-order linearization used by the step optimizers, and small
spectral helpers including the rank-one shift that exposes the algebraic
connectivity as a smallest eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "WeightParams",
    "Configuration",
    "WeightedGraphView",
    "LinearizationCoeffs",
    "weight",
    "weight_derivative",
    "build_graph",
    "linearize",
    "delta_laplacian",
    "algebraic_connectivity",
    "shifted_matrix",
]

# Symmetry slack accepted before an eigenvalue routine refuses the input.
SYM_TOL = 1e-9


@dataclass(frozen=True)
class WeightParams:
    """Squared-distance thresholds of the weight profile.

    Weights are 1 below rho1, 0 above rho2, and ramp smoothly in between.
    """

    rho1: float
    rho2: float

    def __post_init__(self) -> None:
        if not (0.0 < self.rho1 < self.rho2):
            raise ValueError(
                f"need 0 < rho1 < rho2, got rho1={self.rho1}, rho2={self.rho2}"
            )


@dataclass(frozen=True)
class Configuration:
    """Stacked agent positions, one row per agent."""

    positions: np.ndarray

    def __post_init__(self) -> None:
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2:
            raise ValueError("positions must be an (N, dim) array")
        n, dim = pos.shape
        if n < 2:
            raise ValueError("need at least 2 agents")
        if dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {dim}")
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions must be finite")
        object.__setattr__(self, "positions", pos)

    @property
    def n_agents(self) -> int:
        return self.positions.shape[0]

    @property
    def dim(self) -> int:
        return self.positions.shape[1]


@dataclass(frozen=True)
class WeightedGraphView:
    """Edge set, weights and Laplacian of one configuration.

    Edges are stored as parallel arrays (edge_i[k], edge_j[k]) with
    edge_i < edge_j, covering exactly the pairs with d2 < rho2.
    """

    edge_i: np.ndarray
    edge_j: np.ndarray
    weights: np.ndarray
    sq_distances: np.ndarray
    laplacian: np.ndarray
    n_agents: int

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(i), int(j)) for i, j in zip(self.edge_i, self.edge_j)}


@dataclass(frozen=True)
class LinearizationCoeffs:
    """Per-edge first-order data of the weighted Laplacian at a base point.

    b[k] = 2 (x_i - x_j) is the gradient of the squared distance and
    a[k] = (df_w/dd2) b[k] the gradient of the weight, both taken with
    respect to x_i (the x_j coefficient is the negation).
    """

    edge_i: np.ndarray
    edge_j: np.ndarray
    a: np.ndarray
    b: np.ndarray
    base_weights: np.ndarray
    base_sq_distances: np.ndarray
    n_agents: int
    dim: int

    @property
    def n_edges(self) -> int:
        return self.edge_i.shape[0]


# ---------------------------------------------------------------------------
# Weight profile
# ---------------------------------------------------------------------------

def weight(d2, params: WeightParams):
    """Edge weight as a function of squared distance.

    Equals 1 on [0, rho1], 0 on [rho2, inf), and a monotone quintic
    smoothstep in between (C2, zero slope at both thresholds).
    """
    d2a = np.asarray(d2, dtype=float)
    if np.any(d2a < 0):
        raise ValueError("squared distance must be nonnegative")
    s = np.clip((d2a - params.rho1) / (params.rho2 - params.rho1), 0.0, 1.0)
    val = 1.0 - s * s * s * (s * (6.0 * s - 15.0) + 10.0)
    if np.ndim(d2) == 0:
        return float(val)
    return val


def weight_derivative(d2, params: WeightParams):
    """Analytic derivative of `weight` with respect to squared distance."""
    d2a = np.asarray(d2, dtype=float)
    if np.any(d2a < 0):
        raise ValueError("squared distance must be nonnegative")
    span = params.rho2 - params.rho1
    s = (d2a - params.rho1) / span
    inside = (s > 0.0) & (s < 1.0)
    sc = np.where(inside, s, 0.0)
    val = np.where(inside, -30.0 * sc * sc * (sc - 1.0) * (sc - 1.0) / span, 0.0)
    if np.ndim(d2) == 0:
        return float(val)
    return val


# ---------------------------------------------------------------------------
# Graph assembly and linearization
# ---------------------------------------------------------------------------

def _pairwise_sq_distances(pos: np.ndarray) -> np.ndarray:
    diff = pos[:, None, :] - pos[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _edge_arrays(pos: np.ndarray, params: WeightParams):
    d2 = _pairwise_sq_distances(pos)
    n = pos.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    mask = d2[iu, ju] < params.rho2
    return iu[mask], ju[mask], d2[iu, ju][mask]


def build_graph(config: Configuration, params: WeightParams) -> WeightedGraphView:
    """Assemble the weighted graph and its Laplacian at a configuration."""
    pos = config.positions
    edge_i, edge_j, d2 = _edge_arrays(pos, params)
    w = np.asarray(weight(d2, params), dtype=float).reshape(-1)
    n = config.n_agents
    lap = np.zeros((n, n))
    lap[edge_i, edge_j] = -w
    lap[edge_j, edge_i] = -w
    lap[np.diag_indices(n)] = -lap.sum(axis=1)
    return WeightedGraphView(
        edge_i=edge_i,
        edge_j=edge_j,
        weights=w,
        sq_distances=d2,
        laplacian=lap,
        n_agents=n,
    )


def linearize(config: Configuration, params: WeightParams) -> LinearizationCoeffs:
    """First-order expansion of every edge weight at the configuration."""
    pos = config.positions
    edge_i, edge_j, d2 = _edge_arrays(pos, params)
    b = 2.0 * (pos[edge_i] - pos[edge_j])
    dw = np.asarray(weight_derivative(d2, params), dtype=float).reshape(-1)
    a = dw[:, None] * b
    w = np.asarray(weight(d2, params), dtype=float).reshape(-1)
    return LinearizationCoeffs(
        edge_i=edge_i,
        edge_j=edge_j,
        a=a,
        b=b,
        base_weights=w,
        base_sq_distances=d2,
        n_agents=config.n_agents,
        dim=config.dim,
    )


def delta_laplacian(coeffs: LinearizationCoeffs, delta_x) -> np.ndarray:
    """Linearized Laplacian at displacement delta_x from the base point.

    Affine in delta_x; delta_laplacian(coeffs, 0) is the base Laplacian.
    Off-diagonal entries on base edges are -(w_ij + a_ij . (dx_i - dx_j)),
    diagonals make every row sum to zero.
    """
    dx = np.asarray(delta_x, dtype=float)
    if dx.shape != (coeffs.n_agents, coeffs.dim):
        raise ValueError(
            f"delta_x must have shape ({coeffs.n_agents}, {coeffs.dim}), got {dx.shape}"
        )
    rel = dx[coeffs.edge_i] - dx[coeffs.edge_j]
    lin_w = coeffs.base_weights + np.einsum("kd,kd->k", coeffs.a, rel)
    n = coeffs.n_agents
    lap = np.zeros((n, n))
    lap[coeffs.edge_i, coeffs.edge_j] = -lin_w
    lap[coeffs.edge_j, coeffs.edge_i] = -lin_w
    lap[np.diag_indices(n)] = -lap.sum(axis=1)
    return lap


# ---------------------------------------------------------------------------
# Spectral helpers
# ---------------------------------------------------------------------------

def _check_symmetric(mat: np.ndarray) -> np.ndarray:
    m = np.asarray(mat, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if np.max(np.abs(m - m.T), initial=0.0) > SYM_TOL:
        raise ValueError("matrix is not symmetric")
    return m


def algebraic_connectivity(laplacian) -> float:
    """Second-smallest eigenvalue of a symmetric matrix."""
    m = _check_symmetric(laplacian)
    vals = np.linalg.eigvalsh(m)
    return float(vals[1])


def shifted_matrix(laplacian, lambda_shift: float) -> np.ndarray:
    """Rank-one shift moving the zero Laplacian eigenvalue to lambda_shift.

    Returns L + (lambda_shift / N) * ones; its spectrum is {lambda_shift}
    joined with the nonzero-part spectrum {lambda_2, ..., lambda_N} of L.
    """
    if lambda_shift <= 0:
        raise ValueError("lambda_shift must be positive")
    m = _check_symmetric(laplacian)
    n = m.shape[0]
    return m + (lambda_shift / n) * np.ones((n, n))
