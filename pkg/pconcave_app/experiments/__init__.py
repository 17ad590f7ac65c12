import logging
import time
from typing import Callable, Dict

from pconcave_app.config import AppConfig, ExperimentConfig
from pconcave_app.experiments import (
    assumption_check,
    corollary42,
    geometry_suite,
    rearrangement65,
    theorem41,
    torsion_urysohn,
)
from pconcave_app.report import ComparisonReport

Runner = Callable[[ExperimentConfig, AppConfig], ComparisonReport]

RUNNERS: Dict[str, Runner] = {
    "theorem41": theorem41.run,
    "corollary42": corollary42.run,
    "rearrangement65": rearrangement65.run,
    "torsion_urysohn": torsion_urysohn.run,
    "geometry_suite": geometry_suite.run,
    "assumption_check": assumption_check.run,
}


def run_experiment(config: ExperimentConfig, app: AppConfig) -> ComparisonReport:
    """Run one experiment and stamp its wall-clock runtime on the report."""
    logging.info("Starting %s (h=%s, p=%s)", config.experiment, config.h, config.p)
    started = time.perf_counter()
    report = RUNNERS[config.experiment](config, app)
    report.runtime_seconds = time.perf_counter() - started
    logging.info(
        "Finished %s in %.2fs: %s (min slack %.3e, eps %.3e)",
        config.experiment,
        report.runtime_seconds,
        report.verdict,
        report.min_slack,
        report.epsilon,
    )
    return report
