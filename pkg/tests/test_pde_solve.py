import math

import numpy as np
import pytest

from pconcave_app.convex_geom import ConvexBody, square
from pconcave_app.errors import ArgumentError, SolverError
from pconcave_app.field import INTERIOR, bilinear, lq_norm
from pconcave_app.pde_solve import (
    PUCCI_MINUS,
    OperatorSpec,
    SolveParams,
    SourceTerm,
    check_rotational_invariance,
    check_sharp_convexity,
    check_source_condition,
    check_weak_assumption,
    default_stencil_radius,
    hopf_boundary_check,
    laplacian_scheme_value,
    pucci_minus_value,
    pucci_plus_value,
    solve,
    torsional_rigidity,
    transformed_operator_value,
)

UNIT_DISC = ConvexBody.disc((0.0, 0.0), 1.0)


def _radial_error(u, scale):
    points = u.node_points()[u.free]
    exact = scale * (1.0 - np.einsum("ij,ij->i", points, points))
    return float(np.max(np.abs(u.values[u.free] - exact)))


def test_poisson_on_the_disc_matches_the_paraboloid(fine_disc_torsion):
    assert _radial_error(fine_disc_torsion, 0.25) <= 1e-3
    assert fine_disc_torsion.meta["operator"] == "poisson"
    assert fine_disc_torsion.meta["residual"] <= 1e-8


def test_poisson_residual_vanishes_at_interior_nodes(disc_torsion):
    laplacian = laplacian_scheme_value(disc_torsion)
    interior = disc_torsion.mask == INTERIOR
    assert np.max(np.abs(laplacian[interior] + 1.0)) < 1e-6


def test_square_torsion(square_torsion):
    assert torsional_rigidity(square_torsion) == pytest.approx(0.5623, abs=0.02)
    assert lq_norm(square_torsion, math.inf) == pytest.approx(0.2947, abs=0.01)
    assert np.all(square_torsion.values >= 0.0)


def test_pucci_with_equal_ellipticity_is_the_laplacian(disc_torsion):
    spec = OperatorSpec(kind=PUCCI_MINUS, lam=1.0, Lam=1.0)
    u = solve(UNIT_DISC, spec, SolveParams(h=1.0 / 8.0))
    assert np.max(np.abs(u.values - disc_torsion.values)) <= 1e-5
    assert u.meta["operator"] == PUCCI_MINUS


def test_pucci_on_the_disc():
    spec = OperatorSpec(kind=PUCCI_MINUS, lam=1.0, Lam=2.0)
    u = solve(UNIT_DISC, spec, SolveParams(h=1.0 / 16.0, stencil_radius=2.0))
    assert _radial_error(u, 0.125) <= 2e-2
    assert lq_norm(u, math.inf) < 0.25


def test_solver_gives_up_after_max_iters(torsion):
    with pytest.raises(SolverError) as info:
        solve(UNIT_DISC, torsion, SolveParams(h=1.0 / 8.0, max_iters=1))
    assert info.value.iterations == 1
    assert info.value.residual > 0.0


def test_pseudo_time_step_must_be_monotone():
    spec = OperatorSpec(kind=PUCCI_MINUS, lam=1.0, Lam=2.0)
    with pytest.raises(ArgumentError):
        solve(UNIT_DISC, spec, SolveParams(h=1.0 / 8.0, pseudo_dt=1.0))


@pytest.mark.parametrize(
    "kwargs",
    [{"h": 0.0}, {"h": 0.1, "tol": 0.0}, {"h": 0.1, "relaxation": 2.0}, {"h": 0.1, "stencil_radius": 0.5}],
)
def test_solve_params_validation(kwargs):
    with pytest.raises(ArgumentError):
        SolveParams(**kwargs)


def test_operator_spec_validation():
    with pytest.raises(ArgumentError):
        OperatorSpec(kind="heat")
    with pytest.raises(ArgumentError):
        OperatorSpec(kind=PUCCI_MINUS, lam=2.0, Lam=1.0)


def test_hopf_slopes_on_the_disc(fine_disc_torsion):
    report = hopf_boundary_check(fine_disc_torsion)
    assert report.passed
    assert report.tested > 0
    assert report.excluded == 0
    assert 0.45 <= report.min_slope <= report.mean_slope <= 0.5 + 1e-3


def test_hopf_excludes_square_corners(square_torsion):
    report = hopf_boundary_check(square_torsion, exclusion=1.0)
    assert report.passed
    assert report.excluded > 0


def test_transformed_operator_value():
    spec = OperatorSpec()
    assert transformed_operator_value(spec, 0.5, (0.0, 0.0), (0.1, 0.2), 2.0, -np.eye(2)) == pytest.approx(0.0)
    assert transformed_operator_value(spec, 0.0, (0.0, 0.0), (0.1, 0.2), 0.0, -0.5 * np.eye(2)) == pytest.approx(0.0)
    with pytest.raises(ArgumentError):
        transformed_operator_value(spec, 0.5, (0.0, 0.0), (0.0, 0.0), 0.0, np.eye(2))
    with pytest.raises(ArgumentError):
        transformed_operator_value(spec, -1.0, (0.0, 0.0), (0.0, 0.0), 1.0, np.eye(2))


def test_pucci_extremal_values():
    matrix = np.diag([1.0, -2.0])
    assert pucci_minus_value(matrix, 1.0, 3.0) == pytest.approx(-5.0)
    assert pucci_plus_value(matrix, 1.0, 3.0) == pytest.approx(1.0)


def test_source_parse_and_describe():
    cap = SourceTerm.parse("radial beta_cap 2 2")
    assert (cap.beta, cap.radius, cap.constant) == (2.0, 2.0, 1.0)
    assert SourceTerm.parse(cap.describe()) == cap
    assert cap.evaluate(np.array([[0.0, 0.0], [2.0, 0.0]])).tolist() == [1.0, 0.0]
    assert float(SourceTerm.parse("affine 1 0.5 0").evaluate(np.array([1.0, 3.0]))) == pytest.approx(1.5)
    assert float(SourceTerm.parse("radial quadratic 3").evaluate(np.array([1.0, 1.0]))) == pytest.approx(6.0)
    assert not SourceTerm.parse("affine 1 0.5 0").rotation_invariant
    for text in ("constant", "cubic 1", "radial beta_cap 2", "affine 1 x 0"):
        with pytest.raises(ArgumentError):
            SourceTerm.parse(text)
    with pytest.raises(ArgumentError):
        SourceTerm.of_constant(-1.0)


@pytest.mark.parametrize("p,expected", [(0.4, True), (1.0 / 3.0, True), (0.5, True), (0.25, False), (0.0, False)])
def test_constant_source_condition(p, expected):
    f = SourceTerm.of_constant(1.0)
    report = check_source_condition(f, f, f, 0.5, p, square(1.0), UNIT_DISC, samples=500, seed=1)
    assert report.passed is expected
    assert (report.witness is None) is expected


def test_affine_source_is_one_concave():
    f = SourceTerm.parse("affine 1 0.5 0")
    report = check_source_condition(f, f, f, 0.5, 1.0 / 3.0, square(1.0), square(1.0), samples=500, seed=2)
    assert report.passed
    assert report.beta == pytest.approx(1.0)
    assert report.midpoint_passed


def test_quadratic_source_fails_with_witness():
    f = SourceTerm.parse("radial quadratic")
    report = check_source_condition(f, f, f, 0.5, 0.4, square(1.0), square(1.0), samples=500, seed=3)
    assert not report.passed
    assert set(report.witness) == {"x0", "y0", "x1", "y1", "t0", "t1", "lhs", "rhs"}


def test_weak_assumption():
    spec = OperatorSpec()
    body = square(1.0)
    assert check_weak_assumption(spec, spec, spec, 0.5, 0.4, body, body, samples=50, seed=4).passed
    failed = check_weak_assumption(spec, spec, spec, 0.5, 0.25, body, body, samples=50, seed=4)
    assert not failed.passed
    assert failed.witness is not None
    assert check_sharp_convexity(spec, 0.4, body, samples=50, seed=5).passed


def test_rotational_invariance():
    assert check_rotational_invariance(OperatorSpec(), samples=50) <= 1e-12
    tilted = OperatorSpec(source=SourceTerm.parse("affine 1 0.5 0"))
    assert check_rotational_invariance(tilted, samples=50) > 1e-3


def test_default_stencil_radius_grows_as_the_grid_refines():
    assert SolveParams(h=1.0 / 64.0).arm_radius == pytest.approx(8.0)
    assert SolveParams(h=1.0 / 8.0).arm_radius == pytest.approx(math.sqrt(8.0))
    assert SolveParams(h=0.25).arm_radius == 2.0
    assert SolveParams(h=1.0 / 64.0, stencil_radius=1.0).arm_radius == 1.0
    assert default_stencil_radius(1.0 / 256.0) == pytest.approx(16.0)


def test_pucci_default_stencil_on_the_disc():
    spec = OperatorSpec(kind=PUCCI_MINUS, lam=1.0, Lam=2.0)
    u = solve(UNIT_DISC, spec, SolveParams(h=1.0 / 32.0))
    assert _radial_error(u, 0.125) <= 2e-2
    assert u.meta["stencil_radius"] == pytest.approx(math.sqrt(32.0))


@pytest.mark.slow
def test_pucci_default_stencil_converges_on_the_disc():
    spec = OperatorSpec(kind=PUCCI_MINUS, lam=1.0, Lam=2.0)
    coarse = solve(UNIT_DISC, spec, SolveParams(h=1.0 / 32.0))
    fine = solve(UNIT_DISC, spec, SolveParams(h=1.0 / 64.0))
    assert _radial_error(fine, 0.125) <= 1e-2
    assert _radial_error(fine, 0.125) <= _radial_error(coarse, 0.125) + 1e-3
    report = hopf_boundary_check(fine)
    assert report.passed
    assert 0.225 <= report.min_slope <= report.mean_slope <= 0.275


def test_pucci_operator_is_concave_in_the_matrix():
    rng = np.random.default_rng(11)
    for _ in range(200):
        a, b = rng.normal(size=(2, 2, 2))
        a, b = a + a.T, b + b.T
        mid = pucci_minus_value(0.5 * (a + b), 1.0, 3.0)
        assert mid >= 0.5 * (pucci_minus_value(a, 1.0, 3.0) + pucci_minus_value(b, 1.0, 3.0)) - 1e-12
        assert pucci_minus_value(a, 1.0, 3.0) <= pucci_plus_value(a, 1.0, 3.0) + 1e-12


@pytest.mark.parametrize("kind,lam,Lam,atol", [("poisson", 1.0, 1.0, 1e-6), (PUCCI_MINUS, 1.0, 2.0, 1e-5)])
def test_quarter_turn_equivariance(kind, lam, Lam, atol):
    body = square(1.0)
    params = SolveParams(h=1.0 / 8.0)
    u = solve(body, OperatorSpec(kind=kind, lam=lam, Lam=Lam, source=SourceTerm.parse("affine 1 0.5 0")), params)
    turned = solve(body, OperatorSpec(kind=kind, lam=lam, Lam=Lam, source=SourceTerm.parse("affine 1 0 0.5")), params)
    # turned(x, y) = u(y, -x) on a lattice symmetric about the origin
    assert np.allclose(turned.values, u.values.T[::-1, :], atol=atol)


@pytest.mark.parametrize("kind,Lam", [("poisson", 1.0), (PUCCI_MINUS, 2.0)])
def test_larger_source_gives_larger_solution(kind, Lam):
    body = square(1.0)
    params = SolveParams(h=1.0 / 8.0)
    low = solve(body, OperatorSpec(kind=kind, Lam=Lam, source=SourceTerm.of_constant(0.5)), params)
    high = solve(body, OperatorSpec(kind=kind, Lam=Lam, source=SourceTerm.parse("affine 1 0.5 0")), params)
    doubled = solve(body, OperatorSpec(kind=kind, Lam=Lam, source=SourceTerm.of_constant(1.0)), params)
    assert np.all(low.values >= 0.0)
    assert np.all(high.values >= low.values - 1e-9)
    assert np.allclose(doubled.values, 2.0 * low.values, atol=1e-6)


def test_torsion_of_discs_scales_with_the_fourth_power(torsion):
    unit = solve(UNIT_DISC, torsion, SolveParams(h=1.0 / 8.0))
    double = solve(ConvexBody.disc((0.0, 0.0), 2.0), torsion, SolveParams(h=0.25))
    assert torsional_rigidity(unit) == pytest.approx(math.pi / 8.0, rel=0.03)
    assert torsional_rigidity(double) == pytest.approx(16.0 * torsional_rigidity(unit), rel=1e-5)


def test_solutions_grow_with_the_domain(torsion, square_torsion):
    params = SolveParams(h=1.0 / 8.0)
    inner = solve(ConvexBody.disc((0.0, 0.0), 0.8), torsion, params)
    outer = solve(ConvexBody.disc((0.0, 0.0), math.sqrt(2.0)), torsion, params)
    points = inner.node_points()[inner.free]
    assert np.all(inner.values[inner.free] <= bilinear(square_torsion, points) + 1e-9)
    points = square_torsion.node_points()[square_torsion.free]
    assert np.all(square_torsion.values[square_torsion.free] <= bilinear(outer, points) + 1e-9)
    assert torsional_rigidity(inner) < torsional_rigidity(square_torsion) < torsional_rigidity(outer)


@pytest.mark.slow
def test_poisson_disc_oracle_under_refinement(torsion):
    errors = [_radial_error(solve(UNIT_DISC, torsion, SolveParams(h=h)), 0.25) for h in (1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0)]
    # the 5-point scheme with cut arms is exact on quadratics, so only solver error remains
    assert max(errors) <= 5e-3
