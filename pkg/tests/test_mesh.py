import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import exact_cell_means
from rtafv import CellField, Mesh1D, PiecewiseConstant, Sampled, build_mesh, field_to_csv, project_initial
from rtafv.errors import IncompatibleDiscretizationError, InvalidArgumentError


def test_build_mesh_reference_setup():
    mesh = build_mesh(-10, 10, 250)
    assert mesh.dx == 0.08
    assert mesh.faces[0] == -10 and mesh.faces[-1] == 10


def test_build_mesh_smallest():
    assert build_mesh(0, 1, 2).dx == 0.5


def test_build_mesh_thirds():
    assert abs(build_mesh(0, 1, 3).dx - 1 / 3) <= math.ulp(1 / 3)


@pytest.mark.parametrize("args", [(1, 1, 10), (2, 1, 10), (0, 1, 1), (0, 1, 0), (0, math.inf, 4)])
def test_build_mesh_rejects(args):
    with pytest.raises(InvalidArgumentError):
        build_mesh(*args)


def test_cell_centers_one_based_formula():
    mesh = build_mesh(-1.0, 3.0, 8)
    j = np.arange(1, 9)
    np.testing.assert_allclose(mesh.centers, -1.0 + (j - 0.5) * 0.5, rtol=0, atol=1e-15)


def test_cellfield_invariants():
    mesh = build_mesh(0, 1, 4)
    with pytest.raises(InvalidArgumentError):
        CellField(np.zeros(3), mesh)
    with pytest.raises(InvalidArgumentError):
        CellField(np.array([0, 1, np.nan, 0]), mesh)
    f = CellField(np.arange(4.0), mesh)
    with pytest.raises(ValueError):
        f.values[0] = 5.0


def test_project_square_wave(square_wave):
    _, mesh, _, ic = square_wave
    got = project_initial(ic, mesh).values
    want = np.array([float(x) for x in exact_cell_means(ic.breakpoints, ic.values, -10, 10, 250)])
    np.testing.assert_allclose(got, want, rtol=0, atol=1e-14)
    c = mesh.centers
    inside = (mesh.faces[:-1] >= -10 / 3) & (mesh.faces[1:] <= 10 / 3)
    outside = (mesh.faces[1:] <= -10 / 3) | (mesh.faces[:-1] >= 10 / 3)
    assert np.all(got[inside] == -1.0)
    assert np.all(got[outside] == 1.0)
    straddle = ~(inside | outside)
    assert straddle.sum() == 2
    assert np.all((got[straddle] > -1) & (got[straddle] < 1))
    assert c.size == 250


def test_project_constant():
    mesh = build_mesh(-2, 5, 13)
    assert np.all(project_initial(PiecewiseConstant([], [3.25]), mesh).values == 3.25)


def test_project_breakpoint_at_midpoint():
    mesh = build_mesh(0, 1, 2)
    got = project_initial(PiecewiseConstant([0.25], [0.0, 1.0]), mesh).values
    assert got[0] == 0.5 and got[1] == 1.0


def test_project_rejects_breakpoints_outside():
    with pytest.raises(InvalidArgumentError):
        project_initial(PiecewiseConstant([2.0], [0, 1]), build_mesh(0, 1, 4))


def test_piecewise_constant_validation():
    with pytest.raises(InvalidArgumentError):
        PiecewiseConstant([0.5, 0.5], [0, 1, 2])
    with pytest.raises(InvalidArgumentError):
        PiecewiseConstant([0.5], [0])


def test_sampled_midpoint_rule():
    mesh = build_mesh(0, 1, 4)
    # midpoint rule integrates linear functions exactly
    got = project_initial(Sampled(lambda x: 2 * x + 1, 3), mesh).values
    np.testing.assert_allclose(got, 2 * mesh.centers + 1, rtol=0, atol=1e-15)
    got16 = project_initial(Sampled(lambda x: x**2), mesh).values
    exact = ((mesh.faces[1:] ** 3 - mesh.faces[:-1] ** 3) / 3) / mesh.dx
    # composite midpoint error for x^2 is dx^2 / (12 m^2)
    np.testing.assert_allclose(got16, exact - mesh.dx**2 / (12 * 16**2), rtol=0, atol=1e-15)


steps = st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=6)


@settings(max_examples=60, deadline=None)
@given(
    raw_bp=st.lists(st.floats(0.001, 0.999), min_size=0, max_size=5, unique=True),
    vals=steps,
    n=st.integers(2, 60),
)
def test_projection_properties(raw_bp, vals, n):
    bp = sorted(raw_bp)
    values = (vals * 7)[: len(bp) + 1]
    ic = PiecewiseConstant([3 * b - 1 for b in bp], values)
    mesh = build_mesh(-1, 2, n)
    u = project_initial(ic, mesh).values
    # integral preserved
    assert mesh.dx * u.sum() == pytest.approx(ic.integral(-1, 2), rel=1e-12, abs=1e-12)
    # bounded by the data
    assert u.min() >= min(values) - 1e-12 and u.max() <= max(values) + 1e-12


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 40), data=st.data())
def test_projection_of_mesh_function_is_identity(n, data):
    mesh = build_mesh(0.0, 1.0, n)
    cells = data.draw(st.lists(st.floats(-3, 3), min_size=n, max_size=n))
    ic = PiecewiseConstant(list(mesh.faces[1:-1]), cells)
    np.testing.assert_array_equal(project_initial(ic, mesh).values, np.array(cells))


def test_field_csv_rows():
    mesh = build_mesh(0, 1, 2)
    text = field_to_csv(CellField([1.5, -0.1], mesh), comments=["x=1"])
    assert text == "# x=1\nj,x_center,value\n1,0.25,1.5\n2,0.75,-0.1\n"


def test_mesh_mismatch():
    with pytest.raises(IncompatibleDiscretizationError):
        build_mesh(0, 1, 4).check_same(build_mesh(0, 1, 5))
