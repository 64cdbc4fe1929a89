import math

import numpy as np
import pytest

from composite_berry.berry import eigenstate_berry_phase
from composite_berry.dynamics import (
    AdiabaticityUndefined, NormDriftError, adiabaticity_ratio, breakdown_sweep,
    default_steps_per_loop, evolve_loop, initial_eigenstate, phase_report, rotating_frame_fidelity,
    run_cycle,
)
from composite_berry.linalg import expm_i_hermitian, phase_distance, wrap_phase
from composite_berry.model import ModelParams, hamiltonian, rotation, rotation_generator


def exact_state(params, psi0, t):
    """Co-rotating frame: psi(t) = R(omega t) exp(-i (H(0) - omega G) t) psi0."""
    gen = rotation_generator(params.coupling_kind)
    k = hamiltonian(params, 0.0) - params.omega * gen
    return rotation(params.omega * t, params.coupling_kind) @ expm_i_hermitian(k, -t) @ psi0


def test_stationary_field():
    # at theta = 0 H does not depend on phi: pure dynamical phase
    p = ModelParams(theta=0.0, g=0.3, omega=0.05)
    traj, rep = run_cycle(p, level=3, steps_per_loop=20000)
    e = np.linalg.eigvalsh(hamiltonian(p, 0.0))[3]
    assert phase_distance(rep.dynamical_phase, -e * rep.loop_duration) <= 1e-8
    assert phase_distance(rep.geometric_phase, 0.0) <= 1e-8
    assert rep.final_fidelity == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("kind", ["xx-minus-yy", "heisenberg", "ising", "xy"])
def test_against_exact_propagator(kind):
    p = ModelParams(theta=0.9, g=0.2, omega=0.05, coupling_kind=kind)
    psi0 = initial_eigenstate(p, 2)
    traj = evolve_loop(p, psi0, steps_per_loop=20000, level=2)
    for t, psi in zip(traj.state_times[::997], traj.states[::997]):
        assert np.linalg.norm(psi - exact_state(p, psi0, t)) <= 1e-8


def test_rk4_fourth_order():
    p = ModelParams(theta=1.0, g=0.3, omega=0.05)
    psi0 = initial_eigenstate(p)
    ref = exact_state(p, psi0, 2 * np.pi / p.omega)
    steps = np.array([2000, 4000, 8000])
    errs = [np.linalg.norm(evolve_loop(p, psi0, steps_per_loop=int(n)).states[-1] - ref)
            for n in steps]
    slope = -np.polyfit(np.log(steps), np.log(errs), 1)[0]
    assert slope >= 3.7


def test_norm_drift_default_steps():
    p = ModelParams(theta=np.pi / 2, g=0.25, omega=2.5e-3)
    traj = evolve_loop(p, initial_eigenstate(p))
    assert traj.max_norm_drift <= 1e-8
    assert traj.steps_per_loop == default_steps_per_loop(p)


def test_norm_drift_abort():
    p = ModelParams(theta=1.0, g=0.2, omega=1e-3)
    with pytest.raises(NormDriftError, match="increase steps_per_loop"):
        evolve_loop(p, initial_eigenstate(p), steps_per_loop=1000)


def test_evolve_validation():
    p = ModelParams(theta=1.0, g=0.2, omega=0.05)
    with pytest.raises(ValueError):
        evolve_loop(p, np.array([1, 1, 0, 0]))
    with pytest.raises(ValueError):
        evolve_loop(p, initial_eigenstate(p), loops=0)
    with pytest.raises(ValueError):
        evolve_loop(p, initial_eigenstate(p), steps_per_loop=999)


def test_record_grid_includes_ends():
    p = ModelParams(theta=1.0, g=0.2, omega=0.05)
    traj = evolve_loop(p, initial_eigenstate(p), loops=3, steps_per_loop=20001)
    assert traj.state_times[0] == 0.0
    assert traj.state_times[-1] == traj.times[-1]
    assert len(traj.state_times) == len(traj.states)
    assert len(traj.energy_expect) == len(traj.times)


def test_phase_identity():
    p = ModelParams(theta=1.1, g=0.15, omega=5e-3)
    _, rep = run_cycle(p)
    assert phase_distance(rep.total_phase, rep.dynamical_phase + rep.geometric_phase) <= 1e-10
    assert -np.pi < rep.geometric_phase <= np.pi


def test_step_doubling_stable():
    p = ModelParams(theta=1.1, g=0.15, omega=5e-3)
    n = default_steps_per_loop(p)
    _, a = run_cycle(p, steps_per_loop=n)
    _, b = run_cycle(p, steps_per_loop=2 * n)
    assert phase_distance(a.geometric_phase, b.geometric_phase) <= 1e-6
    assert phase_distance(a.dynamical_phase, b.dynamical_phase) <= 1e-6


def test_global_phase_of_initial_state():
    p = ModelParams(theta=1.1, g=0.15, omega=0.02)
    psi0 = initial_eigenstate(p)
    _, a = run_cycle(p, steps_per_loop=20000)
    traj = evolve_loop(p, np.exp(0.77j) * psi0, steps_per_loop=20000)
    b = phase_report(traj)
    assert phase_distance(a.geometric_phase, b.geometric_phase) <= 1e-10
    assert b.final_fidelity == pytest.approx(a.final_fidelity, abs=1e-12)


def test_multiple_loops():
    p = ModelParams(theta=np.pi / 2, g=0.25, omega=0.01)
    _, one = run_cycle(p, loops=1, steps_per_loop=40000)
    _, two = run_cycle(p, loops=2, steps_per_loop=40000)
    assert two.loop_duration == one.loop_duration
    assert phase_distance(two.dynamical_phase, 2 * one.dynamical_phase) <= 1e-3


def test_adiabaticity_ratio_examples():
    assert adiabaticity_ratio(ModelParams(theta=np.pi / 2, g=0.01, omega=1e-3)) == pytest.approx(0.1)
    assert adiabaticity_ratio(ModelParams(theta=np.pi / 6, g=0.01, omega=1e-3)) == pytest.approx(0.2)
    with pytest.raises(AdiabaticityUndefined, match="undefined"):
        adiabaticity_ratio(ModelParams(theta=1.0, g=0.0))
    with pytest.raises(AdiabaticityUndefined):
        adiabaticity_ratio(ModelParams(theta=0.0, g=0.1))


def test_adiabatic_limit_approaches_berry_phase():
    p = ModelParams(theta=1.0, g=0.25)
    berry = eigenstate_berry_phase(p, 3, 4000).gamma
    errs = []
    for omega in (2.5e-2, 2.5e-3):
        _, rep = run_cycle(p.with_(omega=omega))
        errs.append(phase_distance(rep.geometric_phase, berry))
    assert errs[1] < errs[0] / 5
    assert errs[1] <= 0.05


@pytest.mark.parametrize("ratio", [0.5, 1.0, 5.0])
def test_rotating_frame_closed_form(ratio):
    omega = 1e-3
    p = ModelParams(theta=np.pi / 2, g=omega / ratio, omega=omega)
    _, rep = run_cycle(p)
    assert rep.final_fidelity == pytest.approx(rotating_frame_fidelity(ratio), abs=2e-3)


def test_closed_form_values():
    assert rotating_frame_fidelity(1.0) == pytest.approx(0.909, abs=1e-3)
    assert rotating_frame_fidelity(1e-3) == pytest.approx(1.0, abs=1e-5)


def test_min_fidelity_shows_breakdown():
    omega = 1e-3
    _, rep = run_cycle(ModelParams(theta=np.pi / 2, g=omega / 5, omega=omega))
    assert rep.min_fidelity < 0.9
    _, slow = run_cycle(ModelParams(theta=np.pi / 2, g=omega / 0.05, omega=omega))
    assert slow.min_fidelity > 0.99


def test_breakdown_sweep_order():
    rows = breakdown_sweep(np.pi / 2, 0.01, [0.01, 0.1], berry_points=500)
    assert [r.g for r in rows] == [0.1, 0.01]
    assert rows[0].ratio == pytest.approx(0.1)
    assert rows[0].final_fidelity > rows[1].final_fidelity
    with pytest.raises(ValueError):
        breakdown_sweep(np.pi / 2, 0.01, [0.0])
