"""Torsional rigidity ordering tau(Omega) <= tau(equal-area disc) <= tau(equal-mean-width disc)."""

import logging
import math

from pconcave_app.config import AppConfig, ExperimentConfig
from pconcave_app.convex_geom import ConvexBody, centroid, equal_area_disc, mean_width_disc, parse_body_literal
from pconcave_app.errors import ConfigError
from pconcave_app.experiments.common import operator_spec, slack_budget, solve_on, solve_params
from pconcave_app.pde_solve import POISSON, torsional_rigidity
from pconcave_app.rearrange import urysohn_containment
from pconcave_app.report import ComparisonReport

ANALYTIC_REL_TOL = 0.01


def disc_torsion(radius: float) -> float:
    """tau of a disc of radius R: pi R^4 / 8."""
    return math.pi * radius ** 4 / 8.0


def run(config: ExperimentConfig, app: AppConfig) -> ComparisonReport:
    report = ComparisonReport(experiment="torsion_urysohn", config_echo=config.echo(), epsilon_override=config.epsilon)
    spec = operator_spec(config)
    source = spec.source
    if spec.kind != POISSON or source.kind != "constant" or source.constant != 1.0:
        raise ConfigError("torsion_urysohn needs the poisson operator with source 'constant 1'")
    params = solve_params(config)

    body = parse_body_literal(config.body)
    star: ConvexBody = equal_area_disc(body)
    sharp: ConvexBody = mean_width_disc(body, centroid(body))
    u = solve_on(body, spec, params)
    u_star = solve_on(star, spec, params)
    u_sharp = solve_on(sharp, spec, params)
    report.slack_budget = slack_budget((u, u_star, u_sharp), spec, with_quadrature=True)

    tau, tau_star, tau_sharp = (torsional_rigidity(gf) for gf in (u, u_star, u_sharp))
    logging.info("torsion_urysohn: tau=%.6g, tau_star=%.6g, tau_sharp=%.6g", tau, tau_star, tau_sharp)
    report.add_check("tau_le_tau_equal_area", tau_star, tau)
    report.add_check("tau_equal_area_le_tau_mean_width", tau_sharp, tau_star)
    for name, value, disc in (("tau_equal_area_vs_analytic", tau_star, star), ("tau_mean_width_vs_analytic", tau_sharp, sharp)):
        exact = disc_torsion(disc.radius)
        report.add_check(name, -abs(value - exact) / exact, 0.0, tolerance=ANALYTIC_REL_TOL)
    report.add_flag("urysohn_containment", urysohn_containment(body).passed)
    report.add_check("tau", tau, 0.0, informational=True)
    return report
