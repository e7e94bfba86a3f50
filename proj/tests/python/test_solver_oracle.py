# SPDX-License-Identifier: Apache-2.0
# Cross-checks of the in-tree conic solver against an independent stack.
import numpy as np
import pytest

mi = pytest.importorskip("ma_isac")
cp = pytest.importorskip("cvxpy")


def make_instance(users, antennas, seed, gamma_db=10.0):
    cfg = mi.ScenarioConfig()
    cfg.num_users = users
    cfg.num_antennas = antennas
    cfg.sinr_targets = [mi.db_to_linear(gamma_db)] * users
    cfg.master_seed = seed
    cfg.validate()
    t = mi.initial_positions(antennas, cfg.aperture, cfg.wavelength, mi.InitScheme.UlaCompact)
    paths = mi.normalize_by_noise(mi.draw_scenario(cfg, 0), cfg.noise_power)
    h = mi.synthesize_channels(paths, t, cfg.wavelength)
    a = mi.steering_vector(cfg.target_angle, t, cfg.wavelength)
    return cfg, t, h, a


def solve_ref(prob):
    for solver in (cp.CLARABEL, cp.SCS):
        try:
            val = prob.solve(solver=solver)
            if prob.status in ("optimal", "optimal_inaccurate"):
                return prob.status, val
        except cp.error.SolverError:
            continue
    return prob.status, None


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_fixed_position_sdp_matches_cvxpy(seed):
    users, antennas = 3, 4
    cfg, t, h, a = make_instance(users, antennas, seed, gamma_db=6.0)
    gamma = np.array(cfg.sinr_targets)
    mine = mi.solve_fixed_position_sdp(t, h, gamma, 1.0, cfg.tx_power, cfg.target_angle,
                                       cfg.wavelength)

    W = [cp.Variable((antennas, antennas), hermitian=True) for _ in range(users)]
    cons = [w >> 0 for w in W]
    cons.append(sum(cp.real(cp.trace(w)) for w in W) <= cfg.tx_power)
    for k in range(users):
        Hk = np.outer(h[k], h[k].conj())
        lhs = cp.real(cp.trace(Hk @ W[k]))
        interference = sum(cp.real(cp.trace(Hk @ W[i])) for i in range(users) if i != k)
        cons.append(lhs >= gamma[k] * (interference + 1.0))
    A = np.outer(a, a.conj())
    prob = cp.Problem(cp.Maximize(sum(cp.real(cp.trace(A @ w)) for w in W)), cons)
    status, val = solve_ref(prob)

    ref_feasible = status in ("optimal", "optimal_inaccurate")
    assert mine.feasible == ref_feasible
    if ref_feasible:
        lifted_gain = sum(np.real(a.conj() @ (wl @ a)) for wl in mine.w_lifted)
        assert lifted_gain == pytest.approx(val, rel=2e-5, abs=1e-6)


@pytest.mark.parametrize("seed", [4, 5])
def test_inner_sdp_matches_cvxpy(seed):
    users, antennas = 2, 3
    cfg, t, h, a = make_instance(users, antennas, seed, gamma_db=8.0)
    gamma = np.array(cfg.sinr_targets)
    rng = np.random.default_rng(seed)
    xi = rng.uniform(-0.5, 0.5, size=(users, users))
    rho = 0.3
    mine = mi.solve_inner_sdp(t, xi, rho, h, gamma, 1.0, cfg.tx_power, cfg.target_angle,
                              cfg.wavelength)

    W = [cp.Variable((antennas, antennas), hermitian=True) for _ in range(users)]
    Q = cp.Variable((users, users))
    cons = [w >> 0 for w in W]
    cons.append(sum(cp.real(cp.trace(w)) for w in W) <= cfg.tx_power)
    for k in range(users):
        interference = sum(Q[k, i] for i in range(users) if i != k)
        cons.append(Q[k, k] - gamma[k] * interference - gamma[k] * 1.0 >= 0)
    V = cp.vstack([
        cp.hstack([cp.real(cp.trace(np.outer(h[k], h[k].conj()) @ W[i])) for i in range(users)])
        for k in range(users)
    ])
    A = np.outer(a, a.conj())
    gain = sum(cp.real(cp.trace(A @ w)) for w in W)
    objective = cp.Minimize(-gain + cp.sum_squares(Q - V + rho * xi) / (2 * rho))
    status, val = solve_ref(cp.Problem(objective, cons))
    assert status in ("optimal", "optimal_inaccurate")
    assert mine.objective == pytest.approx(val, rel=1e-5, abs=1e-6)
    # rank-one certificate should hold at the reference-agreeing optimum
    assert mine.rank_certified


def test_pdd_audit_against_numpy_sinr():
    users, antennas = 2, 4
    cfg, t, h, a = make_instance(users, antennas, 6, gamma_db=5.0)
    paths = mi.draw_scenario(cfg, 0)
    res = mi.run_pdd(cfg, paths)
    if not res.feasible:
        pytest.skip("instance infeasible at this seed")
    normalized = mi.normalize_by_noise(paths, cfg.noise_power)
    hh = mi.synthesize_channels(normalized, res.t, cfg.wavelength)
    w = np.asarray(res.w_columns)
    for k in range(users):
        sig = abs(np.vdot(hh[k], w[:, k])) ** 2
        interf = sum(abs(np.vdot(hh[k], w[:, i])) ** 2 for i in range(users) if i != k)
        sinr_db = 10 * np.log10(sig / (interf + 1.0))
        assert sinr_db >= mi.linear_to_db(cfg.sinr_targets[k]) - 0.01
