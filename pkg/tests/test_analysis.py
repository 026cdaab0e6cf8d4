import math

import numpy as np
import pytest

from dlscontrol.analysis import (
    ComparisonError,
    InsufficientDataError,
    beat_metrics,
    characteristic_coefficients,
    characteristic_roots,
    compare_control_traces,
    control_eigenvalue_offset,
    count_exchange_cycles,
    step_map_spectrum,
)
from dlscontrol.duffing import DuffingControlConfig, DuffingParams
from dlscontrol.dynamics import SystemState
from dlscontrol.simulate import Trajectory


def make_trajectory(t, x2, x1=None):
    t = np.asarray(t, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    x1 = np.zeros_like(t) if x1 is None else np.asarray(x1, dtype=float)
    zeros = np.zeros_like(t)
    return Trajectory(t=t, x1=x1, x2=x2, v1=zeros, v2=zeros,
                      u=zeros, f2=zeros, du=zeros)


def test_characteristic_coefficients_reference_values():
    p = DuffingParams(omega=1.0, epsilon=0.1, alpha=1.5, zeta=0.025)
    np.testing.assert_allclose(characteristic_coefficients(p),
                               [1.0, 0.05, 2.0, 0.05, 0.99], rtol=1e-15)


def test_undamped_uncoupled_roots_are_plus_minus_i_omega():
    for omega in (1.0, 2.5):
        p = DuffingParams(omega=omega, epsilon=0.0, zeta=0.0)
        roots = characteristic_roots(p)
        np.testing.assert_allclose(sorted(roots.imag), [-omega, -omega, omega, omega],
                                   atol=1e-10 * omega)
        np.testing.assert_allclose(roots.real, 0.0, atol=1e-10 * omega)


def test_undamped_coupled_roots_split_by_the_coupling():
    p = DuffingParams(omega=2.0, epsilon=0.1, zeta=0.0)
    roots = characteristic_roots(p)
    magnitudes = np.sort(np.abs(roots))
    expected = np.sort([2.0 * math.sqrt(0.9)] * 2 + [2.0 * math.sqrt(1.1)] * 2)
    np.testing.assert_allclose(magnitudes, expected, rtol=1e-12)


def test_damped_roots_satisfy_the_polynomial():
    rng = np.random.default_rng(13)
    for _ in range(20):
        p = DuffingParams(omega=float(rng.uniform(0.5, 3.0)),
                          epsilon=float(rng.uniform(0.0, 0.5)),
                          zeta=float(rng.uniform(0.001, 0.2)))
        coeffs = characteristic_coefficients(p)
        roots = characteristic_roots(p)
        residuals = np.abs(np.polyval(coeffs, roots))
        assert np.max(residuals) <= 1e-8 * max(1.0, np.max(np.abs(coeffs)))
        # damping pushes every root strictly into the left half plane
        assert np.all(roots.real < 0.0)


def test_origin_spectrum_has_one_unit_eigenvalue_and_four_integration_modes():
    p = DuffingParams()
    ctl = DuffingControlConfig(lam=1.0, u0=0.0)
    h = 0.01
    report = step_map_spectrum(p, ctl, h=h)
    offsets = np.sort(np.abs(report.offsets_from_unity))
    assert offsets[0] <= 1e-8
    expected = np.sort(np.abs(h * report.char_roots))
    np.testing.assert_allclose(offsets[1:], expected, rtol=1e-6)


def test_origin_spectrum_is_independent_of_the_damping_constant():
    p = DuffingParams()
    h = 0.01
    a = step_map_spectrum(p, DuffingControlConfig(lam=0.1, u0=0.0), h=h)
    b = step_map_spectrum(p, DuffingControlConfig(lam=1000.0, u0=0.0), h=h)
    np.testing.assert_allclose(np.sort(np.abs(a.eigenvalues)),
                               np.sort(np.abs(b.eigenvalues)), atol=1e-9)
    np.testing.assert_allclose(a.char_roots, b.char_roots, atol=1e-14)


def test_origin_offsets_scale_linearly_with_the_step():
    p = DuffingParams()
    ctl = DuffingControlConfig(lam=1.0, u0=0.0)
    coarse = np.sort(np.abs(step_map_spectrum(p, ctl, h=0.01).offsets_from_unity))[1:]
    fine = np.sort(np.abs(step_map_spectrum(p, ctl, h=0.005).offsets_from_unity))[1:]
    ratios = coarse / fine
    assert np.all(ratios >= 1.7) and np.all(ratios <= 2.3)


def test_spectrum_away_from_rest_shows_the_deadbeat_mode():
    # Uncoupled pair, no damping on the adjustment: the controller corrects
    # its whole error in one step, an offset of magnitude one.
    p = DuffingParams(epsilon=0.0, zeta=0.0)
    at = SystemState(x=np.array([0.0, 0.3]), v=np.array([0.0, 0.5]), t=0.0)
    report = step_map_spectrum(p, DuffingControlConfig(lam=0.0, u0=0.0),
                               h=1e-3, at=at, u=0.0)
    assert abs(np.max(np.abs(report.offsets_from_unity)) - 1.0) < 1e-2


def test_spectrum_with_damping_equal_to_gain_squared_halves_the_offset():
    p = DuffingParams(epsilon=0.0, zeta=0.0)
    v2 = 0.5
    lam = 4.0 * p.omega ** 2 * v2 ** 2
    at = SystemState(x=np.array([0.0, 0.3]), v=np.array([0.0, v2]), t=0.0)
    report = step_map_spectrum(p, DuffingControlConfig(lam=lam, u0=0.0),
                               h=1e-3, at=at, u=0.0)
    closest = np.min(np.abs(report.offsets_from_unity - (-0.5)))
    assert closest < 1e-3


def test_verdict_states():
    p = DuffingParams()
    ctl = DuffingControlConfig(lam=1.0, u0=0.0)
    # the unit eigenvalue along the control direction caps the verdict
    assert step_map_spectrum(p, ctl, h=0.01).attraction_verdict == "necessary_only"
    # without physical damping the integration modes leave the unit circle
    undamped = DuffingParams(zeta=0.0)
    assert step_map_spectrum(undamped, ctl, h=0.01).attraction_verdict == "fails"


def test_control_offset_closed_form():
    assert control_eigenvalue_offset(1.0, 1.0, 0.0) == pytest.approx(-1.0)
    assert control_eigenvalue_offset(1.0, 1.0, 4.0) == pytest.approx(-0.5)
    assert control_eigenvalue_offset(2.0, 0.0, 1.0) == 0.0
    assert abs(control_eigenvalue_offset(1.0, 1.0, 1e9)) < 1e-8
    with pytest.raises(ValueError):
        control_eigenvalue_offset(1.0, 0.0, 0.0)


def test_control_offset_stays_in_the_unit_interval():
    rng = np.random.default_rng(37)
    for _ in range(200):
        omega = float(rng.uniform(0.1, 5.0))
        v2 = float(rng.normal())
        lam = float(10.0 ** rng.uniform(-6, 6))
        offset = control_eigenvalue_offset(omega, v2, lam)
        assert -1.0 <= offset <= 0.0
        if lam > 0.0:
            assert offset > -1.0


def test_beat_metrics_on_identically_zero_run():
    t = np.arange(0.0, 20.0, 0.01)
    metrics = beat_metrics(make_trajectory(t, np.zeros_like(t)), DuffingParams())
    assert np.all(metrics.envelope_x2 == 0.0)
    assert np.all(metrics.energy_2 == 0.0)
    assert metrics.exchange_depth == 1.0


def test_beat_metrics_envelope_of_plain_sinusoid_is_one():
    t = np.arange(0.0, 50.0, 0.01)
    metrics = beat_metrics(make_trajectory(t, np.sin(t)), DuffingParams())
    interior = metrics.envelope_x2[700:-700]
    assert np.all(np.abs(interior - 1.0) < 0.02)


def test_beat_metrics_requires_at_least_one_period():
    t = np.arange(0.0, 2.0, 0.01)
    with pytest.raises(InsufficientDataError):
        beat_metrics(make_trajectory(t, np.sin(t)), DuffingParams())


def test_passive_run_shows_deep_energy_exchange(run_fig1, base_params):
    metrics = beat_metrics(run_fig1.trajectory, base_params)
    assert metrics.exchange_depth > 3.0
    assert count_exchange_cycles(metrics.envelope_x2) >= 2


def test_count_cycles_on_synthetic_envelope():
    t = np.linspace(0.0, 4.0 * math.pi, 2000)
    envelope = 1.0 + np.sin(t)
    assert count_exchange_cycles(envelope) == 2
    assert count_exchange_cycles(np.zeros(100)) == 0
    assert count_exchange_cycles(np.array([])) == 0


def test_suppression_ratio_against_baseline(run_fig1, run_fig2, base_params):
    metrics = beat_metrics(run_fig2.trajectory, base_params,
                           baseline=run_fig1.trajectory)
    assert metrics.suppression_ratio is not None
    assert 0.0 < metrics.suppression_ratio < 1.0


def test_compare_identical_runs_gives_zero():
    t = np.arange(0.0, 10.0, 0.01)
    traj = make_trajectory(t, np.sin(t))
    result = compare_control_traces(traj, traj)
    assert result.rms_difference == 0.0
    assert result.relative_rms == 0.0
    assert result.max_deviation == 0.0


def test_compare_uses_the_coarser_grid():
    t_coarse = np.arange(0.0, 10.0, 0.1)
    t_fine = np.arange(0.0, 10.0, 0.01)
    a = Trajectory(t=t_coarse, x1=np.zeros_like(t_coarse), x2=np.zeros_like(t_coarse),
                   v1=np.zeros_like(t_coarse), v2=np.zeros_like(t_coarse),
                   u=np.full_like(t_coarse, 0.5), f2=np.zeros_like(t_coarse),
                   du=np.zeros_like(t_coarse))
    b = Trajectory(t=t_fine, x1=np.zeros_like(t_fine), x2=np.zeros_like(t_fine),
                   v1=np.zeros_like(t_fine), v2=np.zeros_like(t_fine),
                   u=np.full_like(t_fine, 0.25), f2=np.zeros_like(t_fine),
                   du=np.zeros_like(t_fine))
    result = compare_control_traces(a, b)
    assert result.rms_difference == pytest.approx(0.25)
    assert result.max_deviation == pytest.approx(0.25)
    # normalization uses the smaller trace magnitude
    assert result.relative_rms == pytest.approx(1.0)


def test_compare_rejects_disjoint_time_ranges():
    t_a = np.arange(0.0, 5.0, 0.1)
    t_b = np.arange(10.0, 15.0, 0.1)
    with pytest.raises(ComparisonError):
        compare_control_traces(make_trajectory(t_a, np.sin(t_a)),
                               make_trajectory(t_b, np.sin(t_b)))
