import numpy as np
import pytest

from urllc_admission import admission, qos
from urllc_admission.channel import generate_scenario
from urllc_admission.linearize import objective_lin
from urllc_admission.model import Scenario, SystemConfig
from urllc_admission.subsolver import FEAS_TOL, check_feasibility, solve_subproblem

from conftest import make_scenario


def single_user(h: np.ndarray) -> tuple[Scenario, SystemConfig]:
    cfg = SystemConfig(num_embb=1, num_urllc=0, num_antennas=h.size)
    return Scenario(h[None, :], np.zeros((0, h.size), complex), np.array([50.0]), 0), cfg


def reanchored_power(scen, cfg, solves=8):
    anchor = admission.initialize(scen, cfg)
    for _ in range(solves):
        rep = solve_subproblem(scen, cfg, anchor)
        assert rep.status == "optimal"
        anchor = admission.anchor_from(rep.solution)
    return rep


def test_single_user_one_step_matches_newton_update():
    # one solve from the MRT anchor moves |h^H m| to (gamma*beta + |a|^2) / (2|a|)
    h = 4e-2 * np.array([1 + 1j, 0.5, -0.3j, 0.8])
    scen, cfg = single_user(h)
    rep = solve_subproblem(scen, cfg, admission.initialize(scen, cfg))
    gamma = qos.embb_target_sinr(cfg.target_rate, cfg.embb_bandwidth)
    beta = cfg.noise_psd * cfg.embb_bandwidth
    a = np.linalg.norm(h) * np.sqrt(cfg.total_power)
    expected = ((gamma * beta + a**2) / (2 * a)) ** 2 / np.linalg.norm(h) ** 2
    assert rep.solution.total_power == pytest.approx(expected, rel=1e-6)
    assert rep.solution.slack[0] <= 1e-9


def test_single_user_reaches_closed_form_power():
    h = 4e-2 * np.array([0.2 - 1j, 0.5, 0.9j, 0.1])
    scen, cfg = single_user(h)
    rep = reanchored_power(scen, cfg)
    gamma = qos.embb_target_sinr(cfg.target_rate, cfg.embb_bandwidth)
    closed = gamma * cfg.noise_psd * cfg.embb_bandwidth / np.linalg.norm(h) ** 2
    assert rep.solution.total_power == pytest.approx(closed, rel=1e-4)
    # the optimal beamformer is matched to the channel
    m = rep.solution.embb_beamformers[0]
    assert abs(np.vdot(h, m)) == pytest.approx(np.linalg.norm(h) * np.linalg.norm(m), rel=1e-6)


def test_orthogonal_pair_decouples():
    T = 4
    h1 = np.zeros(T, complex); h1[0] = 0.1
    h2 = np.zeros(T, complex); h2[1] = 0.05j
    cfg = SystemConfig(num_embb=2, num_urllc=0, num_antennas=T)
    scen = Scenario(np.vstack([h1, h2]), np.zeros((0, T), complex), np.array([20.0, 40.0]), 0)
    rep = reanchored_power(scen, cfg)
    gamma = qos.embb_target_sinr(cfg.target_rate, cfg.embb_bandwidth)
    n = cfg.noise_psd * cfg.embb_bandwidth
    assert rep.solution.total_power == pytest.approx(gamma * n * (1 / 0.1**2 + 1 / 0.05**2), rel=1e-4)


@pytest.mark.parametrize("seed", range(12))
def test_random_instances_satisfy_surrogate_and_original_rows(seed):
    rng = np.random.default_rng(seed)
    K, J = int(rng.integers(1, 7)), int(rng.integers(0, 4))
    mode = ["fixed", "free"][seed % 2]
    cfg = SystemConfig(num_embb=K, num_urllc=J, split_mode=mode, uniform_urllc_bandwidth=(seed % 3 == 0 and mode == "fixed"))
    scen = generate_scenario(cfg, seed)
    anchor = admission.initialize(scen, cfg)
    rep = solve_subproblem(scen, cfg, anchor)
    assert rep.status == "optimal", rep.log
    audit = check_feasibility(rep.solution, scen, cfg, anchor)
    assert audit.max_violation <= FEAS_TOL, audit.violated()
    assert rep.kkt_residual <= 1e-6


def test_subproblem_never_increases_the_weighted_slack(small_config):
    scen = generate_scenario(small_config, 4)
    anchor = admission.initialize(scen, small_config)
    rep = solve_subproblem(scen, small_config, anchor)
    d = small_config.delta
    assert objective_lin(rep.solution.slack, anchor.slack, d) <= objective_lin(anchor.slack, anchor.slack, d) + 1e-9


def test_previous_solution_is_feasible_for_next_subproblem(small_config):
    # the surrogates under-estimate, so an optimum stays feasible when re-anchored at itself
    scen = generate_scenario(small_config, 2)
    rep = solve_subproblem(scen, small_config, admission.initialize(scen, small_config))
    anchor = admission.anchor_from(rep.solution)
    assert check_feasibility(rep.solution, scen, small_config, anchor).max_violation <= FEAS_TOL


def test_urllc_infeasible_subproblem():
    cfg = SystemConfig(num_embb=2, num_urllc=2, total_power=1e-9)
    scen = generate_scenario(cfg, 0)
    rep = solve_subproblem(scen, cfg, admission.initialize(scen, cfg))
    assert rep.status == "infeasible" and rep.solution is None


def test_embb_only_problem_without_urllc():
    cfg = SystemConfig(num_embb=3, num_urllc=0)
    scen = make_scenario(3, 0, seed=5, scale=3e-2)
    rep = solve_subproblem(scen, cfg, admission.initialize(scen, cfg))
    assert rep.status == "optimal"
    assert rep.solution.total_power <= cfg.total_power * (1 + 1e-6)
