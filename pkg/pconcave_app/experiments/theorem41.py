"""Pointwise (p, mu)-concavity check of the solution family: u_mu((1-mu) x0 + mu x1) >= M_p(u0(x0), u1(x1); mu)."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from pconcave_app.config import AppConfig, ExperimentConfig
from pconcave_app.convex_geom import ConvexBody, minkowski_combine, parse_body_literal
from pconcave_app.errors import ConfigError
from pconcave_app.experiments.common import (
    operator_spec,
    resolve_p,
    slack_budget,
    solve_on,
    solve_params,
    subsampled_nodes,
)
from pconcave_app.field import GridFunction, lq_norm, sample_points
from pconcave_app.pde_solve import OperatorSpec, check_source_condition, hopf_boundary_check
from pconcave_app.report import ComparisonReport
from pconcave_app.scalar_means import p_mean, p_mean_array


@dataclass(frozen=True)
class BinaryProblem:
    """The three solved problems on Omega_0, Omega_1 and their mu-combination."""

    spec: OperatorSpec
    p: float
    mu: float
    body0: ConvexBody
    body1: ConvexBody
    body_mu: ConvexBody
    u0: GridFunction
    u1: GridFunction
    u_mu: GridFunction


def prepare(config: ExperimentConfig, report: ComparisonReport) -> BinaryProblem:
    """Check the source condition (or record the waiver) and solve the three problems."""
    p = resolve_p(config)
    spec = operator_spec(config)
    body0 = parse_body_literal(config.body0)
    body1 = parse_body_literal(config.body1)
    condition = check_source_condition(
        spec.source, spec.source, spec.source, config.mu, p, body0, body1, samples=config.samples, seed=config.seed
    )
    report.add_check("source_condition", condition.min_slack, 0.0, tolerance=1e-9, informational=config.waiver)
    if condition.midpoint_min_slack is not None:
        report.add_check("source_beta_concavity", condition.midpoint_min_slack, 0.0, tolerance=1e-9, informational=config.waiver)
    if not condition.passed:
        if condition.witness:
            report.add_witness("source_condition", **condition.witness)
        if not config.waiver:
            raise ConfigError(
                f"source '{spec.source.describe()}' fails the concavity condition for p={p} (min slack {condition.min_slack:.3e}); set waiver=true to run anyway"
            )
        logging.warning("Source condition fails for p=%s; continuing under waiver", p)

    params = solve_params(config)
    body_mu = minkowski_combine(body0, body1, config.mu)
    u0 = solve_on(body0, spec, params)
    u1 = solve_on(body1, spec, params)
    u_mu = solve_on(body_mu, spec, params)
    return BinaryProblem(spec, p, config.mu, body0, body1, body_mu, u0, u1, u_mu)


def max_node_record(problem: BinaryProblem, report: ComparisonReport, name: str = "max_node") -> None:
    lhs = lq_norm(problem.u_mu, math.inf)
    rhs = p_mean(lq_norm(problem.u0, math.inf), lq_norm(problem.u1, math.inf), problem.mu, problem.p)
    report.add_check(name, lhs, rhs)


def run(config: ExperimentConfig, app: AppConfig) -> ComparisonReport:
    report = ComparisonReport(experiment="theorem41", config_echo=config.echo(), epsilon_override=config.epsilon)
    problem = prepare(config, report)
    report.slack_budget = slack_budget((problem.u0, problem.u1, problem.u_mu), problem.spec, with_quadrature=False)

    if problem.p > 0.0:
        for label, gf in (("u0", problem.u0), ("u1", problem.u1)):
            hopf = hopf_boundary_check(gf, config.hopf_exclusion)
            report.add_flag(f"hopf_{label}", hopf.passed)
            report.add_check(f"hopf_{label}_min_slope", hopf.min_slope, 0.0, informational=True)

    x0 = subsampled_nodes(problem.u0, config.pairs_per_axis)
    x1 = subsampled_nodes(problem.u1, config.pairs_per_axis)
    v0 = sample_points(problem.u0, x0)
    v1 = sample_points(problem.u1, x1)
    # all pairs, row i0 against column i1
    combined = (1.0 - problem.mu) * x0[:, None, :] + problem.mu * x1[None, :, :]
    lhs = sample_points(problem.u_mu, combined.reshape(-1, 2)).reshape(len(x0), len(x1))
    rhs = p_mean_array(v0[:, None], v1[None, :], problem.mu, problem.p)
    slack = lhs - rhs
    worst = np.unravel_index(int(np.argmin(slack)), slack.shape)
    record = report.add_check("pointwise_min", lhs[worst], rhs[worst])
    logging.info("theorem41: %s node pairs, min slack %.3e", slack.size, record.slack)
    if record.verdict != "pass":
        report.add_witness(
            "pointwise_min",
            x0=float(x0[worst[0], 0]),
            y0=float(x0[worst[0], 1]),
            x1=float(x1[worst[1], 0]),
            y1=float(x1[worst[1], 1]),
            slack=record.slack,
        )
    max_node_record(problem, report)
    if config.waiver:
        report.waive()
    return report
