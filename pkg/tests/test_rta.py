import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rtafv import (
    CellField,
    PiecewiseConstant,
    SolveConfig,
    Trajectory,
    TransportModel,
    apply_generalized_shift,
    build_mesh,
    relative_shift,
    rta_reconstruct,
    rta_reconstruct_oracle,
    rta_shift_index,
    run_trajectory,
    total_variation,
)
from rtafv.errors import IncompatibleDiscretizationError, InvalidArgumentError
from rtafv.rta import translate_and_average


class ShiftModel:
    """Wavespeed chosen so that nu(mu) = mu on a unit-dt, unit-dx setup."""

    def wavespeed(self, mu):
        return mu


def one_snapshot(values, k=1):
    mesh = build_mesh(0.0, float(len(values)), len(values))
    vals = np.tile(np.asarray(values, dtype=float), (k + 1, 1))
    return Trajectory(vals, mesh, mu_i=0.0, nu_i=0.0, dt=1.0)


def test_identity_when_mu_equals_mu_i(square_wave):
    model, mesh, dt, ic = square_wave
    traj = run_trajectory(model, 0.4, ic, mesh, SolveConfig(dt, 60))
    for k in (0, 1, 17, 60):
        np.testing.assert_array_equal(rta_reconstruct(traj, 0.4, k, model).values, traj.values[k])
        idx = rta_shift_index(traj, 0.4, k, model)
        assert (idx.p, idx.theta) == (1, 0.0)


def test_recurrence_example():
    traj = one_snapshot([1.0, 0, 0, 0])
    got = rta_reconstruct(traj, 1.2, 1, ShiftModel()).values
    np.testing.assert_allclose(got, [0, 0.8, 0.2, 0], rtol=0, atol=1e-15)
    idx = rta_shift_index(traj, 1.2, 1, ShiftModel())
    assert idx.p == 2 and idx.theta == pytest.approx(0.2, abs=1e-15)


def test_shift_is_single_product():
    traj = one_snapshot([1.0, 0, 0, 0, 0], k=7)
    assert relative_shift(traj, 0.3, 7, ShiftModel()) == 7 * 0.3


def test_theta_snapping():
    traj = one_snapshot([1.0, 0, 0, 0, 0], k=3)
    # 3 * (1/3 + tiny) lands within 1e-12 of an integer
    mu = 1.0 / 3.0 + 1e-14
    idx = rta_shift_index(traj, mu, 3, ShiftModel())
    assert idx.theta == 0.0 and idx.p == 2
    np.testing.assert_array_equal(rta_reconstruct(traj, mu, 3, ShiftModel()).values, [0, 1, 0, 0, 0])
    mu = 1.0 / 3.0 - 1e-14
    idx = rta_shift_index(traj, mu, 3, ShiftModel())
    assert idx.theta == 0.0 and idx.p == 2


def test_oracle_examples(rng):
    u = rng.normal(size=9)
    traj = one_snapshot(u)
    np.testing.assert_allclose(rta_reconstruct_oracle(traj, 0.0, 1, ShiftModel()).values, u, rtol=0, atol=1e-15)
    np.testing.assert_allclose(
        rta_reconstruct_oracle(traj, 4.0, 1, ShiftModel()).values, np.roll(u, 4), rtol=0, atol=1e-15
    )
    np.testing.assert_allclose(
        rta_reconstruct_oracle(traj, -13.0, 1, ShiftModel()).values, np.roll(u, -13), rtol=0, atol=1e-15
    )


def test_oracle_on_offset_physical_mesh(rng):
    # the oracle works in physical coordinates; a mesh not starting at zero must not matter
    u = rng.normal(size=17)
    mesh = build_mesh(-3.7, 11.9, 17)
    for s in (-40.3, -0.01, 0.5, 2.75, 33.2):
        np.testing.assert_allclose(
            translate_and_average(u, mesh, s), apply_generalized_shift(u, s), rtol=0, atol=1e-13
        )


def test_rejects_model_inconsistent_with_trajectory(square_wave):
    model, mesh, dt, ic = square_wave
    traj = run_trajectory(model, 0.4, ic, mesh, SolveConfig(dt, 3))
    with pytest.raises(IncompatibleDiscretizationError):
        rta_reconstruct(traj, 0.8, 2, TransportModel(5.0, 2.5))
    with pytest.raises(IncompatibleDiscretizationError):
        rta_reconstruct_oracle(traj, 0.8, 2, TransportModel(4.0, 2.0))


def test_rejects_bad_time_index(square_wave):
    model, mesh, dt, ic = square_wave
    traj = run_trajectory(model, 0.4, ic, mesh, SolveConfig(dt, 3))
    for k in (-1, 4):
        with pytest.raises(InvalidArgumentError):
            rta_reconstruct(traj, 0.8, k, model)


def test_depends_only_on_current_snapshot(square_wave):
    model, mesh, dt, ic = square_wave
    traj = run_trajectory(model, 0.4, ic, mesh, SolveConfig(dt, 30))
    scrambled = traj.values.copy()
    scrambled[:20] = 123.0
    scrambled[21:] = -7.0
    other = Trajectory(scrambled, mesh, traj.mu_i, traj.nu_i, traj.dt)
    np.testing.assert_array_equal(
        rta_reconstruct(traj, 0.9, 20, model).values, rta_reconstruct(other, 0.9, 20, model).values
    )


def test_square_wave_overlay(square_wave):
    """Reconstruction from mu_i=0.4 follows the direct solve at mu=0.8 closely, without new extrema."""
    model, mesh, dt, ic = square_wave
    K = int(round(0.814 / dt))
    snap = run_trajectory(model, 0.4, ic, mesh, SolveConfig(dt, K))
    ref = run_trajectory(model, 0.8, ic, mesh, SolveConfig(dt, K))
    for t in (0.216, 0.722, 0.814):
        k = int(round(t / dt))
        phi = rta_reconstruct(snap, 0.8, k, model).values
        assert phi.min() >= -1.0 and phi.max() <= 1.0
        assert total_variation(phi) <= 4.0 + 1e-12
        e_rel = np.abs(phi - ref.values[k]).sum() / np.abs(ref.values[k]).sum()
        assert e_rel < 0.05


@settings(max_examples=80, deadline=None)
@given(
    bp=st.lists(st.floats(-9.9, 9.9), min_size=2, max_size=8, unique=True),
    vals=st.lists(st.floats(-5, 5), min_size=9, max_size=9),
    mu=st.floats(0, 1),
    mu_i=st.floats(0, 1),
    k=st.integers(0, 120),
)
def test_reconstruction_properties(square_wave, bp, vals, mu, mu_i, k):
    model, mesh, dt, _ = square_wave
    ic = PiecewiseConstant(sorted(bp), vals[: len(bp) + 1])
    traj = run_trajectory(model, mu_i, ic, mesh, SolveConfig(dt, k))
    u0, uk = traj.values[0], traj.values[k]
    phi = rta_reconstruct(traj, mu, k, model).values
    scale = max(np.abs(uk).sum(), 1e-300)
    tv0 = total_variation(u0)
    assert total_variation(phi) <= tv0 + 1e-12 * tv0 + 1e-300
    assert abs(phi.sum() - uk.sum()) <= 1e-12 * scale
    assert phi.min() >= uk.min() - 1e-12 * scale and phi.max() <= uk.max() + 1e-12 * scale
    orc = rta_reconstruct_oracle(traj, mu, k, model).values
    np.testing.assert_allclose(phi, orc, rtol=0, atol=1e-13 * max(1.0, np.abs(uk).max()))
