"""Step optimizers as explicit cone programs.

Every mode maximizes a lower bound gamma on the smallest eigenvalue of the
shifted linearized Laplacian, subject to per-edge distance margins and the
motion model: a Euclidean step cap in single-integrator mode, or lifted LTI
dynamics with admissible-input and feasible-velocity polytopes otherwise.
Programs are assembled as raw cone data (linear, second-order, semidefinite
blocks plus equalities) and handed to a primal-dual interior-point solver;
accepted solutions are re-checked by an independent residual pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from cvxopt import matrix as cvx_matrix
from cvxopt import solvers as cvx_solvers

from .dynamics import AgentDynamics, InputPolytope, velocity_feasible_set
from .graph import Configuration, LinearizationCoeffs

__all__ = [
    "ConicProgram",
    "SolveOutcome",
    "build_centralized_si",
    "build_centralized_lti",
    "build_local",
    "solve",
    "residuals",
    "dump_program",
    "EPS_STRICT",
    "GAMMA_MIN",
    "FEAS_TOL",
    "OPT_TOL",
]

# distance margins replace strict inequalities; gamma keeps a positive floor
EPS_STRICT = 1e-7
GAMMA_MIN = 1e-9
# acceptance thresholds for returned solutions
FEAS_TOL = 1e-7
OPT_TOL = 1e-6


@dataclass(frozen=True)
class ConicProgram:
    """Cone data for one step program, plus enough context to decode solutions.

    Variables are stacked as z = [gamma, delta_x (free members, row-major),
    v_next (LTI modes), inputs (LTI modes, first then second sub-input per
    member)]. Pinned members carry no variables; their motion is zero and
    their park-in-place inputs are precomputed.
    """

    kind: str
    c: np.ndarray
    G_lin: np.ndarray
    h_lin: np.ndarray
    soc: tuple[tuple[np.ndarray, np.ndarray], ...]
    psd: tuple[tuple[np.ndarray, np.ndarray, int], ...]
    A_eq: np.ndarray
    b_eq: np.ndarray
    members: np.ndarray
    free_mask: np.ndarray
    dim: int
    current_velocities: np.ndarray | None
    member_dynamics: tuple[AgentDynamics, ...] | None
    pinned_inputs: np.ndarray | None

    @property
    def n_var(self) -> int:
        return self.c.shape[0]

    @property
    def n_members(self) -> int:
        return self.members.shape[0]

    @property
    def n_free(self) -> int:
        return int(np.sum(self.free_mask))

    # ---- variable slices -------------------------------------------------
    def _free_order(self) -> np.ndarray:
        return np.flatnonzero(self.free_mask)

    def dx_slice(self, f: int) -> slice:
        start = 1 + f * self.dim
        return slice(start, start + self.dim)

    def v_slice(self, f: int) -> slice:
        start = 1 + self.n_free * self.dim + f * self.dim
        return slice(start, start + self.dim)

    def u_slice(self, f: int, which: int) -> slice:
        start = 1 + 2 * self.n_free * self.dim + f * 2 * self.dim + which * self.dim
        return slice(start, start + self.dim)

    def psd_value(self, block: int, z: np.ndarray) -> np.ndarray:
        """Affine PSD block evaluated at a variable vector."""
        G, h, size = self.psd[block]
        return (h - G @ z).reshape(size, size, order="F")

    def assemble_z(self, gamma: float, delta_x, v_next=None, inputs=None) -> np.ndarray:
        """Pack per-member values (full member arrays) into a variable vector."""
        z = np.zeros(self.n_var)
        z[0] = gamma
        dx = np.asarray(delta_x, dtype=float)
        for f, m in enumerate(self._free_order()):
            z[self.dx_slice(f)] = dx[m]
        if self.kind != "si":
            vn = np.asarray(v_next, dtype=float)
            uu = np.asarray(inputs, dtype=float)
            for f, m in enumerate(self._free_order()):
                z[self.v_slice(f)] = vn[m]
                z[self.u_slice(f, 0)] = uu[m, 0]
                z[self.u_slice(f, 1)] = uu[m, 1]
        return z


@dataclass(frozen=True)
class SolveOutcome:
    """Decoded solver result for one step program."""

    status: str
    gamma: float
    delta_x: np.ndarray | None
    v_next: np.ndarray | None
    inputs: np.ndarray | None
    members: np.ndarray
    iterations: int
    max_residual: float


# ---------------------------------------------------------------------------
# Assembly helpers
# ---------------------------------------------------------------------------

def _laplacian_variable_columns(
    coeffs: LinearizationCoeffs, free_mask: np.ndarray
) -> np.ndarray:
    """Columns d vec(Laplacian)/d delta_x[f, axis] for free members only."""
    nm = coeffs.n_agents
    dim = coeffs.dim
    free_pos = {int(m): f for f, m in enumerate(np.flatnonzero(free_mask))}
    cols = np.zeros((nm * nm, len(free_pos) * dim))
    for e in range(coeffs.n_edges):
        p = int(coeffs.edge_i[e])
        q = int(coeffs.edge_j[e])
        a = coeffs.a[e]
        for who, sign in ((p, 1.0), (q, -1.0)):
            f = free_pos.get(who)
            if f is None:
                continue
            for d in range(dim):
                delta = sign * a[d]
                col = cols[:, f * dim + d].reshape(nm, nm, order="F")
                col[p, q] -= delta
                col[q, p] -= delta
                col[p, p] += delta
                col[q, q] += delta
    return cols


def _base_laplacian(coeffs: LinearizationCoeffs) -> np.ndarray:
    nm = coeffs.n_agents
    lap = np.zeros((nm, nm))
    lap[coeffs.edge_i, coeffs.edge_j] = -coeffs.base_weights
    lap[coeffs.edge_j, coeffs.edge_i] = -coeffs.base_weights
    lap[np.diag_indices(nm)] = -lap.sum(axis=1)
    return lap


def _distance_rows(
    prog_dim: int,
    n_var: int,
    coeffs: LinearizationCoeffs,
    free_mask: np.ndarray,
    rho_edges: np.ndarray,
    dx_col,
) -> tuple[np.ndarray, np.ndarray]:
    """Linearized margin rows: every base edge keeps d2 above its threshold."""
    free_pos = {int(m): f for f, m in enumerate(np.flatnonzero(free_mask))}
    rows = np.zeros((coeffs.n_edges, n_var))
    rhs = np.zeros(coeffs.n_edges)
    for e in range(coeffs.n_edges):
        p = int(coeffs.edge_i[e])
        q = int(coeffs.edge_j[e])
        b = coeffs.b[e]
        fp = free_pos.get(p)
        fq = free_pos.get(q)
        if fp is not None:
            rows[e, dx_col(fp)] = -b
        if fq is not None:
            rows[e, dx_col(fq)] = b
        margin = coeffs.base_sq_distances[e] - rho_edges[e]
        if margin <= 0.0:
            raise ValueError(
                f"infeasible base state: edge ({p},{q}) violates its distance margin"
            )
        # Keep the stationary point (delta = 0) feasible even when the base
        # margin is thinner than the enforcement epsilon.
        rhs[e] = max(margin - EPS_STRICT, 0.0)
    return rows, rhs


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def build_centralized_si(
    config: Configuration,
    params,
    coeffs: LinearizationCoeffs,
    v_max: float,
    ts: float,
) -> ConicProgram:
    """Single-integrator step program: PSD block, margins, step norm cap."""
    n = config.n_agents
    dim = config.dim
    n_var = 1 + n * dim
    free_mask = np.ones(n, dtype=bool)

    def dx_col(f: int) -> slice:
        return slice(1 + f * dim, 1 + (f + 1) * dim)

    c = np.zeros(n_var)
    c[0] = -1.0  # maximize gamma

    rows, rhs = _distance_rows(
        dim, n_var, coeffs, free_mask, np.full(coeffs.n_edges, params.rho1), dx_col
    )
    gamma_row = np.zeros((1, n_var))
    gamma_row[0, 0] = -1.0
    G_lin = np.vstack([gamma_row, rows])
    h_lin = np.concatenate([[-GAMMA_MIN], rhs])

    soc = []
    cap = v_max * ts
    for f in range(n):
        Gq = np.zeros((1 + dim, n_var))
        hq = np.zeros(1 + dim)
        hq[0] = cap
        Gq[1:, dx_col(f)] = -np.eye(dim)
        soc.append((Gq, hq))

    lap_cols = _laplacian_variable_columns(coeffs, free_mask)
    base = _base_laplacian(coeffs)
    Gs = np.zeros((n * n, n_var))
    Gs[:, 1 : 1 + n * dim] = -lap_cols
    Gs[:, 0] = np.eye(n).reshape(-1, order="F")
    hs = (base + np.ones((n, n))).reshape(-1, order="F")

    return ConicProgram(
        kind="si",
        c=c,
        G_lin=G_lin,
        h_lin=h_lin,
        soc=tuple(soc),
        psd=((Gs, hs, n),),
        A_eq=np.zeros((0, n_var)),
        b_eq=np.zeros(0),
        members=np.arange(n),
        free_mask=free_mask,
        dim=dim,
        current_velocities=None,
        member_dynamics=None,
        pinned_inputs=None,
    )


def _build_lti_core(
    config: Configuration,
    velocities: np.ndarray,
    coeffs: LinearizationCoeffs,
    dynamics: Sequence[AgentDynamics],
    polytopes: Sequence[InputPolytope],
    rho_edges: np.ndarray,
    members: np.ndarray,
    free_mask: np.ndarray,
    kind: str,
) -> ConicProgram:
    nm = config.n_agents
    dim = config.dim
    vel = np.asarray(velocities, dtype=float)
    if vel.shape != (nm, dim):
        raise ValueError("velocities must match the configuration shape")
    free = np.flatnonzero(free_mask)
    n_free = free.shape[0]
    n_var = 1 + 3 * n_free * dim + n_free * dim  # gamma, dx, v_next, u pair

    def dx_col(f: int) -> slice:
        return slice(1 + f * dim, 1 + (f + 1) * dim)

    def v_col(f: int) -> slice:
        s = 1 + n_free * dim + f * dim
        return slice(s, s + dim)

    def u_col(f: int, which: int) -> slice:
        s = 1 + 2 * n_free * dim + f * 2 * dim + which * dim
        return slice(s, s + dim)

    c = np.zeros(n_var)
    c[0] = -1.0

    lin_rows = [np.zeros((1, n_var))]
    lin_rows[0][0, 0] = -1.0
    lin_rhs = [np.array([-GAMMA_MIN])]

    rows, rhs = _distance_rows(dim, n_var, coeffs, free_mask, rho_edges, dx_col)
    lin_rows.append(rows)
    lin_rhs.append(rhs)

    for f, m in enumerate(free):
        fv = velocity_feasible_set(dynamics[m], polytopes[m])
        block = np.zeros((fv.M.shape[0], n_var))
        block[:, v_col(f)] = fv.M
        lin_rows.append(block)
        lin_rhs.append(fv.rhs)
        for which in (0, 1):
            pb = np.zeros((polytopes[m].H.shape[0], n_var))
            pb[:, u_col(f, which)] = polytopes[m].H
            lin_rows.append(pb)
            lin_rhs.append(polytopes[m].h)

    eq_rows = []
    eq_rhs = []
    eye = np.eye(dim)
    for f, m in enumerate(free):
        dyn = dynamics[m]
        pos_rows = np.zeros((dim, n_var))
        pos_rows[:, dx_col(f)] = eye
        pos_rows[:, u_col(f, 0)] = -dyn.b1 * dyn.a1
        eq_rows.append(pos_rows)
        eq_rhs.append(dyn.a1 @ (eye + dyn.a2) @ vel[m])
        vel_rows = np.zeros((dim, n_var))
        vel_rows[:, v_col(f)] = eye
        vel_rows[:, u_col(f, 0)] = -dyn.b1 * dyn.a2
        vel_rows[:, u_col(f, 1)] = -dyn.b1 * eye
        eq_rows.append(vel_rows)
        eq_rhs.append(dyn.a2 @ dyn.a2 @ vel[m])

    lap_cols = _laplacian_variable_columns(coeffs, free_mask)
    base = _base_laplacian(coeffs)
    # shifted block: linearized Laplacian + ones - gamma I
    Gs1 = np.zeros((nm * nm, n_var))
    Gs1[:, 1 : 1 + n_free * dim] = -lap_cols
    Gs1[:, 0] = np.eye(nm).reshape(-1, order="F")
    hs1 = (base + np.ones((nm, nm))).reshape(-1, order="F")
    # increment block: the linearized Laplacian must dominate the base one,
    # which makes merged steps monotone and local solutions globally safe
    Gs2 = np.zeros((nm * nm, n_var))
    Gs2[:, 1 : 1 + n_free * dim] = -lap_cols
    hs2 = np.zeros(nm * nm)

    pinned_inputs = np.zeros((nm, 2, dim))
    for m in range(nm):
        if free_mask[m]:
            continue
        dyn = dynamics[m]
        pinned_inputs[m, 0] = -(eye + dyn.a2) @ vel[m] / dyn.b1
        pinned_inputs[m, 1] = dyn.a2 @ vel[m] / dyn.b1

    return ConicProgram(
        kind=kind,
        c=c,
        G_lin=np.vstack(lin_rows),
        h_lin=np.concatenate(lin_rhs),
        soc=(),
        psd=((Gs1, hs1, nm), (Gs2, hs2, nm)),
        A_eq=np.vstack(eq_rows) if eq_rows else np.zeros((0, n_var)),
        b_eq=np.concatenate(eq_rhs) if eq_rhs else np.zeros(0),
        members=np.asarray(members, dtype=int),
        free_mask=np.asarray(free_mask, dtype=bool),
        dim=dim,
        current_velocities=vel,
        member_dynamics=tuple(dynamics),
        pinned_inputs=pinned_inputs,
    )


def build_centralized_lti(
    config: Configuration,
    velocities,
    params,
    coeffs: LinearizationCoeffs,
    dynamics: Sequence[AgentDynamics],
    polytopes: Sequence[InputPolytope],
) -> ConicProgram:
    """Full-fleet LTI step program with all agents free."""
    n = config.n_agents
    return _build_lti_core(
        config,
        np.asarray(velocities, dtype=float),
        coeffs,
        list(dynamics),
        list(polytopes),
        np.full(coeffs.n_edges, params.rho1, dtype=float),
        members=np.arange(n),
        free_mask=np.ones(n, dtype=bool),
        kind="lti",
    )


def build_local(
    local_config: Configuration,
    local_velocities,
    local_coeffs: LinearizationCoeffs,
    scaled_dynamics: Sequence[AgentDynamics],
    scaled_polytopes: Sequence[InputPolytope],
    rho_edges,
    members,
    free_mask,
) -> ConicProgram:
    """Neighborhood-restricted LTI program with scaled data and frozen shell.

    Indices in local_config/local_coeffs are local; `members` maps them to
    global ids. Frozen members (free_mask False) have no variables: their
    displacement and next velocity are structurally zero and their inputs
    are the closed-form park-in-place pair under the scaled plant.
    """
    return _build_lti_core(
        local_config,
        np.asarray(local_velocities, dtype=float),
        local_coeffs,
        list(scaled_dynamics),
        list(scaled_polytopes),
        np.asarray(rho_edges, dtype=float),
        members=np.asarray(members, dtype=int),
        free_mask=np.asarray(free_mask, dtype=bool),
        kind="local",
    )


# ---------------------------------------------------------------------------
# Solving and verification
# ---------------------------------------------------------------------------

def _stack_cones(prog: ConicProgram):
    gs = [prog.G_lin]
    hs = [prog.h_lin]
    dims = {"l": prog.G_lin.shape[0], "q": [], "s": []}
    for Gq, hq in prog.soc:
        gs.append(Gq)
        hs.append(hq)
        dims["q"].append(Gq.shape[0])
    for Gs, hsv, size in prog.psd:
        gs.append(Gs)
        hs.append(hsv)
        dims["s"].append(size)
    return np.vstack(gs), np.concatenate(hs), dims


def residuals(prog: ConicProgram, z: np.ndarray) -> dict[str, float]:
    """Worst constraint violations of a candidate point, by cone type.

    Recomputed directly from the stored cone data, independent of the
    solver: linear slack sign, second-order cone gap, smallest eigenvalue
    of each PSD block, and equality mismatch.
    """
    out = {
        "lin": float(np.max(prog.G_lin @ z - prog.h_lin, initial=0.0)),
        "soc": 0.0,
        "psd": 0.0,
        "eq": 0.0,
    }
    for Gq, hq in prog.soc:
        s = hq - Gq @ z
        out["soc"] = max(out["soc"], float(np.linalg.norm(s[1:]) - s[0]))
    for b in range(len(prog.psd)):
        smat = prog.psd_value(b, z)
        out["psd"] = max(out["psd"], float(-np.linalg.eigvalsh(smat)[0]))
    if prog.A_eq.shape[0]:
        out["eq"] = float(np.max(np.abs(prog.A_eq @ z - prog.b_eq)))
    return out


def _decode(prog: ConicProgram, z: np.ndarray) -> tuple:
    nm = prog.n_members
    dim = prog.dim
    delta_x = np.zeros((nm, dim))
    free = np.flatnonzero(prog.free_mask)
    for f, m in enumerate(free):
        delta_x[m] = z[prog.dx_slice(f)]
    if prog.kind == "si":
        return float(z[0]), delta_x, None, None
    v_next = np.zeros((nm, dim))
    inputs = np.array(prog.pinned_inputs, copy=True)
    for f, m in enumerate(free):
        v_next[m] = z[prog.v_slice(f)]
        inputs[m, 0] = z[prog.u_slice(f, 0)]
        inputs[m, 1] = z[prog.u_slice(f, 1)]
    # re-derive motion from the inputs so the plant equalities hold exactly
    eye = np.eye(dim)
    for m in free:
        dyn = prog.member_dynamics[m]
        v = prog.current_velocities[m]
        delta_x[m] = dyn.a1 @ (eye + dyn.a2) @ v + dyn.b1 * dyn.a1 @ inputs[m, 0]
        v_next[m] = (
            dyn.a2 @ dyn.a2 @ v + dyn.b1 * dyn.a2 @ inputs[m, 0] + dyn.b1 * inputs[m, 1]
        )
    return float(z[0]), delta_x, v_next, inputs


def solve(
    prog: ConicProgram,
    feastol: float = 1e-8,
    abstol: float = 1e-9,
    reltol: float = 1e-8,
    maxiters: int = 200,
) -> SolveOutcome:
    """Run the interior-point solver and decode/verify the result."""
    G, h, dims = _stack_cones(prog)
    options = {
        "show_progress": False,
        "maxiters": maxiters,
        "feastol": feastol,
        "abstol": abstol,
        "reltol": reltol,
    }
    try:
        sol = cvx_solvers.conelp(
            cvx_matrix(prog.c),
            cvx_matrix(G),
            cvx_matrix(h),
            dims,
            cvx_matrix(prog.A_eq),
            cvx_matrix(prog.b_eq),
            options=options,
        )
    except (ValueError, ArithmeticError, ZeroDivisionError) as exc:
        return SolveOutcome(
            status=f"numerical-failure: {exc}",
            gamma=float("nan"),
            delta_x=None,
            v_next=None,
            inputs=None,
            members=prog.members,
            iterations=0,
            max_residual=float("inf"),
        )

    raw = sol.get("status", "unknown")
    iters = int(sol.get("iterations", 0))
    if raw == "primal infeasible":
        return SolveOutcome(
            status="infeasible",
            gamma=float("nan"),
            delta_x=None,
            v_next=None,
            inputs=None,
            members=prog.members,
            iterations=iters,
            max_residual=float("inf"),
        )
    if raw != "optimal" or sol.get("x") is None:
        return SolveOutcome(
            status="numerical-failure",
            gamma=float("nan"),
            delta_x=None,
            v_next=None,
            inputs=None,
            members=prog.members,
            iterations=iters,
            max_residual=float("inf"),
        )

    z = np.asarray(sol["x"]).reshape(-1)
    gamma, delta_x, v_next, inputs = _decode(prog, z)
    z_clean = prog.assemble_z(gamma, delta_x, v_next, inputs)
    res = residuals(prog, z_clean)
    worst = max(res.values())
    status = "optimal" if worst <= FEAS_TOL else "numerical-failure"
    return SolveOutcome(
        status=status,
        gamma=gamma,
        delta_x=delta_x,
        v_next=v_next,
        inputs=inputs,
        members=prog.members,
        iterations=iters,
        max_residual=worst,
    )


def dump_program(prog: ConicProgram, path) -> None:
    """Write the cone data to a readable text file for external cross-checks."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"kind {prog.kind}\n")
        fh.write(f"n_var {prog.n_var}\n")
        fh.write(f"members {' '.join(str(int(m)) for m in prog.members)}\n")
        fh.write(f"free {' '.join(str(int(b)) for b in prog.free_mask)}\n")

        def block(name: str, mat: np.ndarray) -> None:
            arr = np.atleast_2d(mat)
            fh.write(f"{name} {arr.shape[0]} {arr.shape[1]}\n")
            for row in arr:
                fh.write(" ".join(repr(float(v)) for v in row) + "\n")

        block("c", prog.c.reshape(1, -1))
        block("G_lin", prog.G_lin)
        block("h_lin", prog.h_lin.reshape(1, -1))
        for k, (Gq, hq) in enumerate(prog.soc):
            block(f"G_soc_{k}", Gq)
            block(f"h_soc_{k}", hq.reshape(1, -1))
        for k, (Gs, hs, size) in enumerate(prog.psd):
            fh.write(f"psd_{k}_size {size}\n")
            block(f"G_psd_{k}", Gs)
            block(f"h_psd_{k}", hs.reshape(1, -1))
        block("A_eq", prog.A_eq)
        block("b_eq", prog.b_eq.reshape(1, -1))
