"""Program builders and the cone solver: feasibility, optimality, verification."""

import numpy as np
import pytest

from connmax.dynamics import InputPolytope, LiftedState, invert_control, lift
from connmax.graph import (
    Configuration,
    algebraic_connectivity,
    build_graph,
    delta_laplacian,
    linearize,
)
from connmax.sdp import (
    EPS_STRICT,
    FEAS_TOL,
    GAMMA_MIN,
    OPT_TOL,
    build_centralized_lti,
    build_centralized_si,
    build_local,
    dump_program,
    residuals,
    solve,
)

from helpers import BENCH_DYN, PARAMS, octagon, random_feasible_world


def si_program(cfg, v_max=1.0, ts=1.0):
    return build_centralized_si(cfg, PARAMS, linearize(cfg, PARAMS), v_max, ts)


def lti_program(cfg, vel, dyn=BENCH_DYN, poly=None):
    n = cfg.n_agents
    poly = poly or octagon()
    return build_centralized_lti(
        cfg, vel, PARAMS, linearize(cfg, PARAMS), [dyn] * n, [poly] * n
    )


# ---------------------------------------------------------------------------
# structure
# ---------------------------------------------------------------------------

def test_psd_block_at_origin_is_shifted_base_laplacian():
    rng = np.random.default_rng(0)
    cfg, vel = random_feasible_world(rng, 5)
    g = build_graph(cfg, PARAMS)
    for prog in (si_program(cfg), lti_program(cfg, vel)):
        z0 = np.zeros(prog.n_var)
        got = prog.psd_value(0, z0)
        assert np.allclose(got, g.laplacian + np.ones((5, 5)), atol=1e-14)


def test_increment_block_is_zero_at_origin():
    rng = np.random.default_rng(1)
    cfg, vel = random_feasible_world(rng, 4)
    prog = lti_program(cfg, vel)
    assert np.allclose(prog.psd_value(1, np.zeros(prog.n_var)), 0.0)


def test_builder_rejects_violated_base_margins():
    pos = np.array([[0.0, 0.0], [0.8, 0.0], [3.0, 0.0]])  # d2 = 0.64 < rho1
    cfg = Configuration(positions=pos)
    with pytest.raises(ValueError, match="infeasible base state"):
        si_program(cfg)


# ---------------------------------------------------------------------------
# stationary feasibility
# ---------------------------------------------------------------------------

def test_stationary_point_feasible_in_si_program():
    cfg = Configuration(positions=np.array([[0.0, 0.0], [1.0, 0.0]]))
    g = build_graph(cfg, PARAMS)
    prog = si_program(cfg)
    lam2 = algebraic_connectivity(g.laplacian)
    z = prog.assemble_z(lam2 - 1e-9, np.zeros((2, 2)))
    res = residuals(prog, z)
    assert max(res.values()) <= 1e-12


def test_stationary_point_feasible_in_lti_program():
    rng = np.random.default_rng(2)
    for trial in range(10):
        cfg, vel = random_feasible_world(rng, 5)
        g = build_graph(cfg, PARAMS)
        prog = lti_program(cfg, vel)
        lam2 = algebraic_connectivity(g.laplacian)
        n = cfg.n_agents
        inputs = np.zeros((n, 2, 2))
        for i in range(n):
            stop = invert_control(
                BENCH_DYN,
                LiftedState(x=cfg.positions[i], v=vel[i]),
                LiftedState(x=cfg.positions[i], v=np.zeros(2)),
            )
            inputs[i, 0] = stop.u_first
            inputs[i, 1] = stop.u_second
        z = prog.assemble_z(max(lam2 - 1e-9, GAMMA_MIN), np.zeros((n, 2)), np.zeros((n, 2)), inputs)
        res = residuals(prog, z)
        assert max(res.values()) <= 1e-10, (trial, res)


# ---------------------------------------------------------------------------
# solve: optimality and verification
# ---------------------------------------------------------------------------

def test_frozen_si_recovers_base_connectivity():
    rng = np.random.default_rng(3)
    cfg, _ = random_feasible_world(rng, 5)
    g = build_graph(cfg, PARAMS)
    out = solve(si_program(cfg, v_max=0.0))
    assert out.status == "optimal"
    assert out.gamma == pytest.approx(algebraic_connectivity(g.laplacian), abs=1e-6)
    assert np.max(np.abs(out.delta_x)) <= 1e-7


def test_si_gamma_dominates_stationary_value():
    rng = np.random.default_rng(4)
    for _ in range(5):
        cfg, _ = random_feasible_world(rng, 6)
        g = build_graph(cfg, PARAMS)
        out = solve(si_program(cfg, v_max=0.05))
        assert out.status == "optimal"
        assert out.gamma >= algebraic_connectivity(g.laplacian) - OPT_TOL


def test_si_gamma_dominates_grid_search():
    # three agents on a line, moves restricted to the x axis on a 21-point
    # grid per agent; every feasible grid combination lower-bounds gamma*
    pos = np.array([[-1.3, 0.0], [0.0, 0.0], [1.3, 0.0]])
    cfg = Configuration(positions=pos)
    coeffs = linearize(cfg, PARAMS)
    v_max, ts = 0.3, 1.0
    prog = si_program(cfg, v_max=v_max, ts=ts)
    cap = v_max * ts

    best = -np.inf
    grid = np.linspace(-cap, cap, 21)
    for da in grid:
        for db in grid:
            for dc in grid:
                delta = np.array([[da, 0.0], [db, 0.0], [dc, 0.0]])
                ok = True
                for e in range(coeffs.n_edges):
                    i, j = int(coeffs.edge_i[e]), int(coeffs.edge_j[e])
                    margin = coeffs.base_sq_distances[e] + coeffs.b[e] @ (
                        delta[i] - delta[j]
                    )
                    if margin < PARAMS.rho1 + EPS_STRICT:
                        ok = False
                        break
                if not ok:
                    continue
                shifted = delta_laplacian(coeffs, delta) + np.ones((3, 3))
                gamma_here = float(np.linalg.eigvalsh(shifted)[0])
                if gamma_here >= GAMMA_MIN:
                    best = max(best, gamma_here)

    out = solve(prog)
    assert out.status == "optimal"
    assert out.gamma >= best - OPT_TOL


def test_lti_zero_inputs_pin_motion():
    rng = np.random.default_rng(5)
    cfg, _ = random_feasible_world(rng, 4)
    poly = InputPolytope(H=octagon().H, h=np.zeros(8))
    out = solve(lti_program(cfg, np.zeros((4, 2)), poly=poly))
    assert out.status == "optimal"
    assert np.max(np.abs(out.delta_x)) <= 1e-8
    assert np.max(np.abs(out.v_next)) <= 1e-8


def test_lti_solution_consistent_with_lifted_dynamics():
    rng = np.random.default_rng(6)
    cfg, vel = random_feasible_world(rng, 5)
    out = solve(lti_program(cfg, vel))
    assert out.status == "optimal"
    maps = lift(BENCH_DYN)
    for i in range(5):
        stacked = maps.state_map @ np.concatenate([cfg.positions[i], vel[i]]) + (
            maps.input_map @ np.concatenate([out.inputs[i, 0], out.inputs[i, 1]])
        )
        assert np.max(np.abs(cfg.positions[i] + out.delta_x[i] - stacked[:2])) < 1e-8
        assert np.max(np.abs(out.v_next[i] - stacked[2:])) < 1e-8


def test_lti_gamma_dominates_stationary_value():
    rng = np.random.default_rng(7)
    for _ in range(5):
        cfg, vel = random_feasible_world(rng, 5)
        g = build_graph(cfg, PARAMS)
        out = solve(lti_program(cfg, vel))
        assert out.status == "optimal"
        assert out.gamma >= algebraic_connectivity(g.laplacian) - OPT_TOL


def test_accepted_solutions_pass_independent_residual_check():
    rng = np.random.default_rng(8)
    cfg, vel = random_feasible_world(rng, 6)
    for prog in (si_program(cfg, v_max=0.2), lti_program(cfg, vel)):
        out = solve(prog)
        assert out.status == "optimal"
        z = prog.assemble_z(out.gamma, out.delta_x, out.v_next, out.inputs)
        res = residuals(prog, z)
        assert max(res.values()) <= FEAS_TOL, res
        assert out.max_residual <= FEAS_TOL


def test_local_builder_freezes_shell_members():
    rng = np.random.default_rng(9)
    cfg, vel = random_feasible_world(rng, 5)
    coeffs = linearize(cfg, PARAMS)
    n = 5
    free = np.array([False, True, False, False, False])
    prog = build_local(
        cfg,
        vel,
        coeffs,
        [BENCH_DYN] * n,
        [octagon()] * n,
        np.full(coeffs.n_edges, PARAMS.rho1),
        members=np.arange(n),
        free_mask=free,
    )
    out = solve(prog)
    assert out.status == "optimal"
    frozen = ~free
    assert np.all(out.delta_x[frozen] == 0.0)
    assert np.all(out.v_next[frozen] == 0.0)
    # shell members still report their park-in-place input pair
    eye = np.eye(2)
    for m in np.flatnonzero(frozen):
        expect_first = -(eye + BENCH_DYN.a2) @ vel[m] / BENCH_DYN.b1
        assert np.allclose(out.inputs[m, 0], expect_first, atol=1e-12)


def test_dump_program_writes_all_blocks(tmp_path):
    rng = np.random.default_rng(10)
    cfg, vel = random_feasible_world(rng, 4)
    prog = lti_program(cfg, vel)
    path = tmp_path / "program.txt"
    dump_program(prog, path)
    text = path.read_text()
    for token in ("kind lti", "G_lin", "G_psd_0", "G_psd_1", "A_eq"):
        assert token in text
