import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spacetime_lcst import algebra as ga
from spacetime_lcst.grid import (
    ContainmentWarning,
    FrequencyGrid,
    GridError,
    SpaceTimeGrid,
    SpaceTimeSignal,
    conjugate_grid,
    delta,
    gaussian_norm_sq,
    gaussian_packet,
    random_signal,
    relative_l2,
    scalar_product,
    scale_argument,
    space_grid_for,
)


def test_centered_grid_puts_zero_at_half_index():
    g = SpaceTimeGrid.centered((4, 5, 6, 8), 0.5)
    assert [g.zero_index(k) for k in range(4)] == [2, 2, 3, 4]
    assert g.axis(1)[2] == 0.0
    assert g.shape == (4, 5, 6, 8, 16)
    assert g.cell_volume == 0.5**4


@pytest.mark.parametrize("kwargs", [dict(n=(0, 4, 4, 4), spacing=1.0), dict(n=(4,) * 4, spacing=-1.0)])
def test_invalid_grids_rejected(kwargs):
    with pytest.raises(GridError):
        SpaceTimeGrid.centered(kwargs["n"], kwargs["spacing"])


def test_grid_must_have_four_axes():
    with pytest.raises(GridError):
        SpaceTimeGrid((4, 4, 4), (1.0, 1.0, 1.0))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 4 * 5 * 6 * 7 - 1))
def test_index_coordinate_round_trip(flat):
    g = SpaceTimeGrid((4, 5, 6, 7), (0.5, 0.25, 1.0, 2.0), (-1.0, 0.5, 0.0, 3.0))
    assert g.coords_to_index(g.index_to_coords(flat)) == flat


def test_off_lattice_coordinate_rejected():
    g = SpaceTimeGrid.centered((4,) * 4, 1.0)
    with pytest.raises(GridError):
        g.coords_to_index((0.5, 0, 0, 0))


def test_conjugate_grid_spacing_and_inverse():
    g = SpaceTimeGrid.centered((8, 8, 8, 8), 0.75)
    wg = conjugate_grid(g, -2.0)
    assert isinstance(wg, FrequencyGrid)
    assert math.isclose(wg.spacing[0], 2 * math.pi / (8 * 0.75))
    assert math.isclose(wg.spacing[1], 2 * math.pi * 2 / (8 * 0.75))
    assert space_grid_for(wg, -2.0).same_as(g)
    with pytest.raises(GridError):
        conjugate_grid(g, 0.0)


def test_field_shape_validated():
    g = SpaceTimeGrid.centered((2,) * 4, 1.0)
    with pytest.raises(GridError):
        SpaceTimeSignal(g, np.zeros((2, 2, 2, 2, 15)))


def test_fields_on_different_grids_do_not_mix():
    rng = np.random.default_rng(0)
    a = random_signal(SpaceTimeGrid.centered((2,) * 4, 1.0), rng)
    b = random_signal(SpaceTimeGrid.centered((2,) * 4, 0.5), rng)
    with pytest.raises(GridError):
        a + b


def test_delta_has_unit_integral():
    g = SpaceTimeGrid.centered((4,) * 4, 0.5)
    d = delta(g)
    assert math.isclose(d.data[..., 0].sum() * g.cell_volume, 1.0)
    assert d.data[2, 2, 2, 2, 0] > 0


def test_gaussian_norm_matches_closed_form():
    g = SpaceTimeGrid.centered((20,) * 4, 0.25)
    width = (0.45, 0.5, 0.5, 0.45)
    f = gaussian_packet(g, (0, 0, 0, 0), width)
    assert math.isclose(f.l2_norm() ** 2, gaussian_norm_sq(width), rel_tol=1e-6)


def test_gaussian_containment_warning():
    g = SpaceTimeGrid.centered((4,) * 4, 0.5)
    with pytest.warns(ContainmentWarning):
        gaussian_packet(g, width=1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        gaussian_packet(SpaceTimeGrid.centered((16,) * 4, 0.5), width=0.5)


def test_gaussian_modulation_is_two_sided():
    g = SpaceTimeGrid.centered((4,) * 4, 0.5)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ContainmentWarning)
        f = gaussian_packet(g, width=1.0, blade_amplitude=ga.basis("e_1"), temporal_freq=0.7, spatial_freq=(0.2, 0, 0))
    t, x1, _, _ = g.mesh()
    env = np.exp(-(t**2) - x1**2 - g.mesh()[2] ** 2 - g.mesh()[3] ** 2)
    expect = ga.gp(ga.gp(ga.blade_exp(ga.E_T, 0.7 * t), ga.basis("e_1")), ga.blade_exp(ga.I3, 0.2 * x1)) * env[..., None]
    assert np.allclose(f.data, expect, atol=1e-15)


def test_scalar_product_and_relative_l2():
    rng = np.random.default_rng(4)
    g = SpaceTimeGrid.centered((3,) * 4, 0.5)
    f = random_signal(g, rng)
    assert math.isclose(scalar_product(f, f), f.l2_norm() ** 2)
    assert relative_l2(f, f) == 0.0
    assert math.isclose(relative_l2(f * 1.5, f), 0.5)


def test_scale_argument_stretches_lattice():
    g = SpaceTimeGrid.centered((4,) * 4, 0.5)
    f = random_signal(g, np.random.default_rng(5))
    s = scale_argument(f, 2.0)
    assert s.grid.spacing == (0.5, 1.0, 1.0, 1.0)
    assert np.array_equal(s.data, f.data)
    assert scale_argument(f, 2.0, spatial_only=False).grid.spacing == (1.0,) * 4
    with pytest.raises(GridError):
        scale_argument(f, -1.0)
