"""L^r comparison: ||u_mu||_r >= M_q(||u0||_r, ||u1||_r; mu) with q = pr/(np + r)."""

import logging
import math

from pconcave_app.config import AppConfig, ExperimentConfig
from pconcave_app.convolve import convolution_sup
from pconcave_app.experiments.common import format_exponent, slack_budget
from pconcave_app.experiments.theorem41 import BinaryProblem, prepare
from pconcave_app.field import lq_norm
from pconcave_app.report import CheckRecord, ComparisonReport
from pconcave_app.scalar_means import corollary_exponent, laplacian_corollary_exponent, p_mean


def record_equality_gap(report: ComparisonReport, sup_value: float, target: float) -> CheckRecord:
    """Judged equality sup u_{p,mu} = M_p(max u0, max u1): slack is -|gap|, so only the epsilon band passes."""
    return report.add_check("max_equality_gap", -abs(sup_value - target), 0.0)


def _equality_gap(problem: BinaryProblem, report: ComparisonReport) -> None:
    if not (0.0 <= problem.p < 1.0):
        logging.info("corollary42: no convolution for p=%s, skipping the supremum equality", problem.p)
        return
    target = p_mean(lq_norm(problem.u0, math.inf), lq_norm(problem.u1, math.inf), problem.mu, problem.p)
    record_equality_gap(report, convolution_sup(problem.u0, problem.u1, problem.mu, problem.p), target)


def run(config: ExperimentConfig, app: AppConfig) -> ComparisonReport:
    report = ComparisonReport(experiment="corollary42", config_echo=config.echo(), epsilon_override=config.epsilon)
    problem = prepare(config, report)
    report.slack_budget = slack_budget((problem.u0, problem.u1, problem.u_mu), problem.spec)

    for r in config.r_list:
        q = corollary_exponent(problem.p, r, 2)
        label = format_exponent(r)
        lhs = lq_norm(problem.u_mu, r)
        rhs = p_mean(lq_norm(problem.u0, r), lq_norm(problem.u1, r), problem.mu, q)
        report.add_check(f"lq_norm[r={label}]", lhs, rhs)
        report.add_check(f"exponent_q[r={label}]", q, q, informational=True)
        if r == math.inf:
            _equality_gap(problem, report)
        if config.beta != math.inf and problem.spec.kind == "poisson":
            report.add_check(
                f"laplacian_exponent_q[r={label}]", laplacian_corollary_exponent(config.beta, r, 2), q, informational=True
            )
    if config.waiver:
        report.waive()
    return report
