"""Seeded sweeps over random polygon pairs for the convex-geometry invariants, plus closed-form identity cases."""

import math

import numpy as np

from pconcave_app.config import AppConfig, ExperimentConfig
from pconcave_app.convex_geom import (
    ConvexBody,
    area,
    hausdorff_distance,
    mean_width,
    mean_width_quadrature,
    minkowski_combine,
    random_convex_polygon,
    rotation_mean,
    square,
    support_subadditivity_slack,
    support_values,
)
from pconcave_app.rearrange import urysohn_containment
from pconcave_app.report import ComparisonReport

WEIGHTS = (0.1, 0.5, 0.9)
HADWIGER_COUNTS = (4, 8, 16, 32, 64)


def _sweep(report: ComparisonReport, pairs: int, rng: np.random.Generator) -> None:
    additivity = width_gap = rotation_gap = 0.0
    bm_slack = triangle_slack = subadditivity = math.inf
    urysohn_ok = True
    previous = None
    for k in range(pairs):
        b0 = random_convex_polygon(rng)
        b1 = random_convex_polygon(rng)
        mu = WEIGHTS[k % len(WEIGHTS)]
        combined = minkowski_combine(b0, b1, mu)
        directions = b0.grid.directions
        expected = (1.0 - mu) * support_values(b0, directions) + mu * support_values(b1, directions)
        additivity = max(additivity, float(np.max(np.abs(support_values(combined, directions) - expected))))
        bm_slack = min(bm_slack, math.sqrt(area(combined)) - ((1.0 - mu) * math.sqrt(area(b0)) + mu * math.sqrt(area(b1))))
        width_gap = max(width_gap, abs(mean_width(combined) - ((1.0 - mu) * mean_width(b0) + mu * mean_width(b1))))
        subadditivity = min(subadditivity, support_subadditivity_slack(b0, rng, samples=100))
        rotation_gap = max(rotation_gap, abs(mean_width(rotation_mean(b0, 8)) - mean_width(b0)))
        urysohn_ok = urysohn_ok and urysohn_containment(b0).passed
        if previous is not None:
            triangle = hausdorff_distance(previous, b0) + hausdorff_distance(b0, b1) - hausdorff_distance(previous, b1)
            triangle_slack = min(triangle_slack, triangle)
        previous = b1

    report.add_check("support_additivity", -additivity, 0.0, tolerance=1e-12)
    report.add_check("brunn_minkowski", bm_slack, 0.0, tolerance=1e-9)
    report.add_check("mean_width_linearity", -width_gap, 0.0, tolerance=1e-9)
    report.add_check("support_subadditivity", subadditivity, 0.0, tolerance=1e-12)
    report.add_check("rotation_mean_preserves_width", -rotation_gap, 0.0, tolerance=1e-9)
    if pairs > 1:
        report.add_check("hausdorff_triangle", triangle_slack, 0.0, tolerance=1e-12)
    report.add_flag("urysohn_random_polygons", urysohn_ok)


def _identities(report: ComparisonReport) -> None:
    q = square(1.0)
    disc = ConvexBody.disc((0.0, 0.0), 1.0)
    report.add_check("mean_width_square_exact", -abs(mean_width(q) - 8.0 / math.pi), 0.0, tolerance=1e-12)
    report.add_check("mean_width_square_quadrature", -abs(mean_width_quadrature(q) - 8.0 / math.pi), 0.0, tolerance=1e-3)
    half = minkowski_combine(q, disc, 0.5)
    report.add_check("area_square_circle", -abs(area(half) - (3.0 + math.pi / 4.0)), 0.0, tolerance=1e-6)
    report.add_check("hausdorff_symmetry", -abs(hausdorff_distance(q, disc) - hausdorff_distance(disc, q)), 0.0, tolerance=1e-15)

    ball = ConvexBody.disc((0.0, 0.0), 4.0 / math.pi)
    distances = [hausdorff_distance(rotation_mean(q, m), ball) for m in HADWIGER_COUNTS]
    report.add_check("hadwiger_m64", 0.01, distances[-1], tolerance=0.0)
    steps = [later - earlier for earlier, later in zip(distances, distances[1:])]
    report.add_check("hadwiger_non_increasing", -max(steps), 0.0, tolerance=1e-12)
    for m, distance in zip(HADWIGER_COUNTS, distances):
        report.add_check(f"hadwiger_distance[m={m}]", distance, 0.0, informational=True)


def run(config: ExperimentConfig, app: AppConfig) -> ComparisonReport:
    report = ComparisonReport(experiment="geometry_suite", config_echo=config.echo(), epsilon_override=config.epsilon)
    rng = np.random.default_rng(config.seed)
    _sweep(report, config.samples, rng)
    _identities(report)
    return report
