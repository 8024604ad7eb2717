"""
Copyright (c) 2024 vpme-kinetic contributors

This file is part of vpme-kinetic.

vpme-kinetic is free software: you can redistribute it and/or modify
it under the terms of the GNU General Public License as published by
the Free Software Foundation, either version 3 of the License, or
(at your option) any later version.

vpme-kinetic is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU General Public License for more details.

You should have received a copy of the GNU General Public License
along with vpme-kinetic.  If not, see <https://www.gnu.org/licenses/>.
"""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from plasma.vpme.core.exceptions import GridMismatch, NonFiniteField, ParseError, UnsupportedGrid
from plasma.vpme.domain import (
    ScalarField, TorusGrid, VectorField, read_field_snapshot, torus_distance, wrap_positions,
    write_field_snapshot, write_vector_snapshot
)


@pytest.mark.parametrize("dim, cells", [(3, 16), (0, 16), (1, 4), (1, 12), (2, 100)])
def test_torus_grid_rejects_unsupported_shapes(dim, cells):
    with pytest.raises(UnsupportedGrid):
        TorusGrid(dim, cells)


def test_torus_grid_node_layout():
    grid = TorusGrid(2, 16)

    assert grid.spacing == 1 / 16
    assert grid.shape == (16, 16)
    assert grid.axis[0] == -0.5
    assert grid.axis[grid.origin_index[0]] == 0.0
    assert grid.points.shape == (256, 2)
    assert grid.distance_to_origin[grid.origin_index] == 0.0


def test_scalar_field_rejects_non_finite_values():
    grid = TorusGrid(1, 8)
    values = np.ones(8)
    values[3] = np.nan

    with pytest.raises(NonFiniteField):
        ScalarField(grid, values)


def test_scalar_field_rejects_wrong_size():
    with pytest.raises(GridMismatch):
        ScalarField(TorusGrid(1, 8), np.ones(9))


def test_fields_on_different_grids_can_not_be_combined():
    first = TorusGrid(1, 8).constant(1.0)
    second = TorusGrid(1, 16).constant(1.0)

    with pytest.raises(GridMismatch):
        first + second


def test_zero_mean_flag_is_checked():
    with pytest.raises(ValueError):
        ScalarField(TorusGrid(1, 8), np.ones(8), zero_mean=True)


def test_vector_field_needs_one_component_per_dimension():
    grid = TorusGrid(2, 8)

    with pytest.raises(GridMismatch):
        VectorField(grid, (np.zeros(grid.shape),))


def test_scalar_field_norms():
    grid = TorusGrid(1, 8)
    field = ScalarField(grid, np.full(8, 2.0))

    assert field.mean() == 2.0
    assert field.integral() == pytest.approx(2.0)
    assert field.lp_norm(2) == pytest.approx(2.0)
    assert field.lp_norm(np.inf) == 2.0
    assert field.inner(grid.constant(3.0)) == pytest.approx(6.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-100.0, max_value=100.0, allow_nan=False))
def test_wrap_positions_lands_in_the_fundamental_cell(x):
    wrapped = float(wrap_positions(x))

    assert -0.5 <= wrapped < 0.5
    assert abs((wrapped - x) - round(wrapped - x)) < 1e-9


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(-3.0, 3.0), min_size=2, max_size=2),
    st.lists(st.floats(-3.0, 3.0), min_size=2, max_size=2),
)
def test_torus_distance_is_symmetric_and_bounded(x, y):
    forward = torus_distance(np.array(x), np.array(y))
    backward = torus_distance(np.array(y), np.array(x))

    assert forward == pytest.approx(backward, abs=1e-12)
    assert forward <= np.sqrt(2) / 2 + 1e-12


@settings(max_examples=200, deadline=None)
@given(
    st.lists(
        st.lists(st.floats(-3.0, 3.0), min_size=2, max_size=2), min_size=3, max_size=3
    )
)
def test_torus_distance_satisfies_the_triangle_inequality(points):
    x, y, z = (np.array(point) for point in points)

    assert torus_distance(x, z) <= torus_distance(x, y) + torus_distance(y, z) + 1e-12


def test_torus_distance_goes_around_the_circle():
    assert torus_distance(0.45, -0.45) == pytest.approx(0.1)


def test_field_snapshot_preserves_values(tmp_path):
    grid = TorusGrid(2, 8)
    rng = np.random.default_rng(3)
    field = ScalarField(grid, rng.normal(size=grid.shape))

    path = write_field_snapshot(tmp_path / "rho.txt", field)
    restored = read_field_snapshot(path)

    assert restored.grid == grid
    np.testing.assert_array_equal(restored.values, field.values)


def test_field_snapshot_without_header_is_rejected(tmp_path):
    path = tmp_path / "rho.txt"
    path.write_text("1.0\n1.0\n", encoding="utf-8")

    with pytest.raises(ParseError):
        read_field_snapshot(path)


@pytest.mark.parametrize("body", ["abc\n", "1.0 2.0\n3.0 4.0\n", "1.0\n1.0\n1.0\n"])
def test_field_snapshot_with_a_malformed_body_is_rejected(tmp_path, body):
    path = tmp_path / "rho.txt"
    path.write_text("# torus d=1 n=8\n" + body, encoding="utf-8")

    with pytest.raises(ParseError):
        read_field_snapshot(path)


def test_field_snapshot_that_is_not_text_is_rejected(tmp_path):
    path = tmp_path / "rho.txt"
    path.write_bytes(b"\xff\xfe\x00garbage")

    with pytest.raises(ParseError):
        read_field_snapshot(path)


def test_vector_snapshot_writes_one_file_per_component(tmp_path):
    grid = TorusGrid(2, 8)

    paths = write_vector_snapshot(tmp_path, "e_bar", VectorField.zeros(grid))

    assert [path.name for path in paths] == ["e_bar_x.txt", "e_bar_y.txt"]
