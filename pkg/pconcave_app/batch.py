import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

from pconcave_app.config import AppConfig, ExperimentConfig, load_key_value_file
from pconcave_app.errors import EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_PASS, EXIT_USAGE, ConfigError, PConcaveError
from pconcave_app.experiments import run_experiment
from pconcave_app.experiments.presets import PRESETS, preset_config
from pconcave_app.metrics import publish_report

# higher is worse
_SEVERITY = {EXIT_PASS: 0, EXIT_INCONCLUSIVE: 1, EXIT_FAIL: 2, EXIT_USAGE: 3}


def worst_exit_code(codes: Iterable[int]) -> int:
    return max(codes, key=lambda code: _SEVERITY.get(code, 3), default=EXIT_PASS)


def load_config_file(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return ExperimentConfig.from_mapping(load_key_value_file(path), base_dir=path.parent)


def load_experiment(entry: str, base_dir: Optional[Path] = None) -> ExperimentConfig:
    """A preset name or the path of a key=value config file."""
    if entry in PRESETS:
        return preset_config(entry)
    path = Path(entry)
    if not path.is_absolute() and base_dir is not None:
        path = base_dir / path
    return load_config_file(path)


def read_batch_file(path: Union[str, Path]) -> List[str]:
    """One preset or config path per line; blank lines and '#' comments are skipped."""
    entries = []
    for line in Path(path).read_text().splitlines():
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            entries.append(stripped)
    return entries


@dataclass(frozen=True)
class BatchJob:
    stem: str
    config: ExperimentConfig


def _stems(entries: Sequence[str]) -> List[str]:
    """Report file stems: preset name or config file stem, suffixed when repeated."""
    seen: Dict[str, int] = {}
    stems = []
    for entry in entries:
        base = entry if entry in PRESETS else Path(entry).stem
        count = seen.get(base, 0)
        seen[base] = count + 1
        stems.append(base if count == 0 else f"{base}-{count + 1}")
    return stems


def run_job(job: BatchJob, app: AppConfig, client=None, out_dir: Optional[str] = None, fmt: Optional[str] = None) -> int:
    """Run one experiment, write its report and publish it; returns the report's exit code."""
    report = run_experiment(job.config, app)
    report.write(out_dir or app.out_dir, fmt or app.report_format, stem=job.stem)
    publish_report(client, app, report)
    return report.exit_code


def run_batch(
    entries: Sequence[str],
    app: AppConfig,
    client=None,
    out_dir: Optional[str] = None,
    fmt: Optional[str] = None,
    base_dir: Optional[Path] = None,
    **overrides: object,
) -> int:
    """Run every entry concurrently on app.workers threads; the worst job exit code wins."""
    logging.info("Starting batch of %s jobs", len(entries))
    codes: List[int] = []
    jobs: List[BatchJob] = []
    for entry, stem in zip(entries, _stems(entries)):
        try:
            jobs.append(BatchJob(stem=stem, config=load_experiment(entry, base_dir).with_overrides(**overrides)))
        except PConcaveError as exc:
            logging.error("Skipping batch entry %s: %s", entry, exc)
            codes.append(EXIT_USAGE)
    if not jobs:
        return worst_exit_code(codes)

    with ThreadPoolExecutor(max_workers=max(1, min(app.workers, len(jobs)))) as executor:
        future_map = {executor.submit(run_job, job, app, client, out_dir, fmt): job for job in jobs}
        for future in as_completed(future_map):
            job = future_map[future]
            try:
                code = future.result()
            except ConfigError as exc:
                logging.error("Job %s rejected its configuration: %s", job.stem, exc)
                code = EXIT_USAGE
            except PConcaveError as exc:
                logging.error("Job %s failed: %s", job.stem, exc)
                code = EXIT_FAIL
            except Exception:
                logging.exception("Unexpected error in job %s", job.stem)
                code = EXIT_FAIL
            logging.info("Job %s finished with exit code %s", job.stem, code)
            codes.append(code)
    return worst_exit_code(codes)
