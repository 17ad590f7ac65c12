"""Sampled structural assumptions on the operator and its source for a given exponent."""

from pconcave_app.config import AppConfig, ExperimentConfig
from pconcave_app.convex_geom import parse_body_literal
from pconcave_app.experiments.common import operator_spec, resolve_p
from pconcave_app.pde_solve import (
    check_rotational_invariance,
    check_sharp_convexity,
    check_source_condition,
    check_weak_assumption,
)
from pconcave_app.report import ComparisonReport

STRUCTURE_TOL = 1e-9
MATRIX_SAMPLES = 200


def run(config: ExperimentConfig, app: AppConfig) -> ComparisonReport:
    report = ComparisonReport(experiment="assumption_check", config_echo=config.echo(), epsilon_override=config.epsilon)
    p = resolve_p(config)
    spec = operator_spec(config)
    body0 = parse_body_literal(config.body0)
    body1 = parse_body_literal(config.body1)

    source = spec.source
    condition = check_source_condition(source, source, source, config.mu, p, body0, body1, samples=config.samples, seed=config.seed)
    report.add_check("source_condition", condition.min_slack, 0.0, tolerance=STRUCTURE_TOL)
    if condition.witness:
        report.add_witness("source_condition", **condition.witness)
    if condition.midpoint_min_slack is not None:
        report.add_check("source_beta_concavity", condition.midpoint_min_slack, 0.0, tolerance=STRUCTURE_TOL)
        report.add_check("beta", condition.beta, condition.beta, informational=True)

    samples = min(config.samples, MATRIX_SAMPLES)
    weak = check_weak_assumption(spec, spec, spec, config.mu, p, body0, body1, samples=samples, seed=config.seed)
    report.add_check("weak_assumption", weak.min_slack, 0.0, tolerance=STRUCTURE_TOL)
    if weak.witness:
        report.add_witness("weak_assumption", **weak.witness)

    convexity = check_sharp_convexity(spec, p, body0, samples=samples, seed=config.seed)
    report.add_check("superlevel_convexity", convexity.min_slack, 0.0, informational=True)

    radius = max(float(max(b.support_samples)) for b in (body0, body1))
    drift = check_rotational_invariance(spec, samples=samples, seed=config.seed, radius=radius)
    report.add_check("rotational_invariance", -drift, 0.0, tolerance=STRUCTURE_TOL, informational=not source.rotation_invariant)
    return report
