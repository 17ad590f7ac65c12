import math

import numpy as np
import pytest

from pconcave_app.convex_geom import ConvexBody, square
from pconcave_app.errors import ArgumentError, ResolutionError
from pconcave_app.field import (
    BOUNDARY,
    EXTERIOR,
    INTERIOR,
    bilinear,
    discretize,
    layer_cake_norm,
    lipschitz_estimate,
    lq_norm,
    node_values,
    sample,
    superlevel_measure,
)


@pytest.fixture
def coarse_square():
    return discretize(square(1.0), 0.25)


def test_square_lattice_layout(coarse_square):
    gf = coarse_square
    assert (gf.nx, gf.ny) == (11, 11)
    assert gf.index_origin == (-5, -5)
    assert int(np.sum(gf.mask != EXTERIOR)) == 81
    assert int(np.sum(gf.free)) == 49
    assert int(np.sum(gf.mask == INTERIOR)) == 25
    assert int(np.sum(gf.mask == BOUNDARY)) == 56
    assert gf.xs[0] == -1.25 and gf.xs[-1] == 1.25


def test_coarse_spacing_is_rejected():
    with pytest.raises(ResolutionError):
        discretize(square(1.0), 1.0)
    with pytest.raises(ResolutionError):
        discretize(ConvexBody.disc((0.0, 0.0), 1.0), 0.5)
    with pytest.raises(ResolutionError):
        discretize(ConvexBody.polygon([(-2.0, -0.1), (2.0, -0.1), (2.0, 0.1), (-2.0, 0.1)]), 0.05)
    with pytest.raises(ArgumentError):
        discretize(square(1.0), 0.0)


def test_disc_arm_lengths_are_fractions_of_h():
    gf = discretize(ConvexBody.disc((0.0, 0.0), 1.0), 0.125)
    arms = gf.boundary_distances
    present = arms[~np.isnan(arms)]
    assert present.size > 0
    assert np.all((present > 0.0) & (present <= 1.0))
    assert np.all(np.isnan(arms[gf.mask == INTERIOR]))


def test_cell_weights_add_up_to_the_area(coarse_square):
    ones = coarse_square.with_values(np.ones((11, 11)), dirichlet=False)
    assert lq_norm(ones, 1.0) == pytest.approx(4.0, abs=1e-9)
    assert superlevel_measure(ones, 0.5) == pytest.approx(4.0, abs=1e-9)
    assert lq_norm(ones, math.inf) == 1.0


def test_with_values_zeroes_dirichlet_nodes(coarse_square):
    gf = coarse_square.with_values(np.ones((11, 11)), label="ones")
    assert np.all(gf.values[~gf.free] == 0.0)
    assert np.all(gf.values[gf.free] == 1.0)
    assert gf.meta["label"] == "ones"
    with pytest.raises(ArgumentError):
        coarse_square.with_values(np.ones((3, 3)))
    with pytest.raises(ValueError):
        gf.values[5, 5] = 2.0


def test_bilinear_is_exact_on_affine_data(coarse_square):
    points = coarse_square.node_points()
    gf = coarse_square.with_values(2.0 * points[..., 0] - 3.0 * points[..., 1] + 1.0, dirichlet=False)
    rng = np.random.default_rng(3)
    samples = rng.uniform(-0.95, 0.95, size=(50, 2))
    assert np.allclose(bilinear(gf, samples), 2.0 * samples[:, 0] - 3.0 * samples[:, 1] + 1.0, atol=1e-12)
    assert sample(gf, (1.5, 0.0)) == 0.0
    assert sample(gf, (0.1, 0.2)) == pytest.approx(0.6)


def test_layer_cake_matches_direct_norm(square_torsion):
    for q in (1.0, 2.0):
        assert layer_cake_norm(square_torsion, q) == pytest.approx(lq_norm(square_torsion, q) ** q, rel=2e-2)


def test_lipschitz_estimate_of_a_ramp(coarse_square):
    points = coarse_square.node_points()
    gf = coarse_square.with_values(2.0 * points[..., 0] + 2.0, dirichlet=False)
    assert lipschitz_estimate(gf) == pytest.approx(2.0)
    assert lipschitz_estimate(gf, power=0.5) > 0.0


def test_norm_exponent_must_be_positive(coarse_square):
    with pytest.raises(ArgumentError):
        lq_norm(coarse_square, 0.0)
    with pytest.raises(ArgumentError):
        superlevel_measure(coarse_square, -1.0)


def test_node_values_default_selection(coarse_square):
    points, values = node_values(coarse_square)
    assert points.shape == (81, 2)
    assert values.shape == (81,)


def test_superlevel_measure_decreases_with_the_level(square_torsion):
    levels = np.linspace(0.0, lq_norm(square_torsion, math.inf), 12)
    measures = [superlevel_measure(square_torsion, t) for t in levels]
    assert all(later <= earlier for earlier, later in zip(measures, measures[1:]))
    assert measures[-1] <= measures[0]
