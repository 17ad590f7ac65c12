import logging
import math
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

from pconcave_app.errors import ConfigError

EXPERIMENTS = (
    "theorem41",
    "corollary42",
    "rearrangement65",
    "torsion_urysohn",
    "geometry_suite",
    "assumption_check",
)
BODY_KEYWORDS = ("disc", "square", "polygon", "offset", "support")


@dataclass
class AppConfig:
    """Runtime configuration loaded from environment variables (and optionally .env)."""

    out_dir: str = "results"
    report_format: str = "json"
    workers: int = 1
    chunk_size: int = 64
    seed: int = 20240101
    log_level: str = "INFO"

    enable_influx: bool = False
    influx_url: str = "http://localhost:8086"
    influx_token: str = ""
    influx_org: str = "pconcave"
    influx_bucket: str = "pconcave"

    @staticmethod
    def from_env() -> "AppConfig":
        def parse_int(env_name: str, fallback: int) -> int:
            raw = os.getenv(env_name)
            if raw is None:
                return fallback
            try:
                return int(raw)
            except ValueError:
                logging.warning("Invalid value for %s=%s, using default %s", env_name, raw, fallback)
                return fallback

        def parse_bool(env_name: str, fallback: bool) -> bool:
            raw = os.getenv(env_name)
            if raw is None:
                return fallback
            value = raw.strip().lower()
            if value in ("1", "true", "yes", "on"):
                return True
            if value in ("0", "false", "no", "off"):
                return False
            logging.warning("Invalid value for %s=%s, using default %s", env_name, raw, fallback)
            return fallback

        def parse_choice(env_name: str, choices: Tuple[str, ...], fallback: str) -> str:
            raw = os.getenv(env_name)
            if raw is None:
                return fallback
            value = raw.strip().lower()
            if value in choices:
                return value
            logging.warning("Invalid value for %s=%s, using default %s", env_name, raw, fallback)
            return fallback

        workers = parse_int("PCONCAVE_WORKERS", 1)
        if workers <= 0:
            logging.warning("PCONCAVE_WORKERS must be positive, using default of 1")
            workers = 1
        chunk_size = parse_int("PCONCAVE_CHUNK_SIZE", 64)
        if chunk_size <= 0:
            logging.warning("PCONCAVE_CHUNK_SIZE must be positive, using default of 64")
            chunk_size = 64

        return AppConfig(
            out_dir=os.getenv("PCONCAVE_OUT_DIR", "results"),
            report_format=parse_choice("PCONCAVE_FORMAT", ("json", "csv"), "json"),
            workers=workers,
            chunk_size=chunk_size,
            seed=parse_int("PCONCAVE_SEED", 20240101),
            log_level=parse_choice("PCONCAVE_LOG_LEVEL", ("debug", "info", "warning", "error"), "info").upper(),
            enable_influx=parse_bool("ENABLE_INFLUX", False),
            influx_url=os.getenv("INFLUX_URL", "http://localhost:8086"),
            influx_token=os.getenv("INFLUX_TOKEN") or os.getenv("INFLUXDB_TOKEN", ""),
            influx_org=os.getenv("INFLUX_ORG", "pconcave"),
            influx_bucket=os.getenv("INFLUX_BUCKET", "pconcave"),
        )


def configure_logging(level: Optional[str] = None) -> None:
    """Configure root logger for the verifier."""
    logging.basicConfig(
        level=getattr(logging, (level or os.getenv("PCONCAVE_LOG_LEVEL", "INFO")).upper(), logging.INFO),
        format="%(asctime)s [%(levelname)s] %(message)s",
    )


def load_env_from_file(env_path: str = ".env") -> None:
    """
    Populate os.environ using a local .env file when environment variables are not already set.
    Existing environment values take precedence over file entries.
    """
    path = Path(env_path)
    if not path.exists():
        return

    for key, value in load_key_value_file(path).items():
        if key not in os.environ:
            os.environ[key] = value


def load_key_value_file(path: Union[str, Path]) -> Dict[str, str]:
    """Read a plain key=value file; blank lines and '#' comments are skipped."""
    entries: Dict[str, str] = {}
    for line in Path(path).read_text().splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#") or "=" not in stripped:
            continue
        key, value = stripped.split("=", 1)
        key = key.strip()
        if key:
            entries[key] = value.strip()
    return entries


@dataclass(frozen=True)
class ExperimentConfig:
    """One verification job. Frozen so solved fields can be cached per configuration."""

    experiment: str
    body0: str = "square 1"
    body1: str = "disc 0 0 1"
    body: str = "square 1"
    operator: str = "poisson"
    lam: float = 1.0
    Lam: float = 1.0
    source: str = "constant 1"
    K: int = 8
    relaxation: float = 1.7
    dt_safety: float = 0.9
    h: float = 1.0 / 32.0
    tol: float = 1e-8
    max_iters: int = 20000
    p: Union[float, str] = 0.5
    beta: float = math.inf
    mu: float = 0.5
    m: int = 8
    m_list: Tuple[int, ...] = (2, 4, 8)
    r_list: Tuple[float, ...] = (1.0, 2.0, math.inf)
    q_list: Tuple[float, ...] = (1.0, 2.0, math.inf)
    epsilon: Optional[float] = None
    seed: int = 20240101
    samples: int = 2000
    pairs_per_axis: int = 17
    levels: int = 20
    waiver: bool = False
    pucci_method: str = "howard"
    stencil_radius: Optional[float] = None
    hopf_exclusion: float = 1.0

    @staticmethod
    def from_mapping(raw: Mapping[str, str], base_dir: Optional[Path] = None) -> "ExperimentConfig":
        """Validate string entries (from a key=value file or a preset) into a config."""
        if "experiment" not in raw:
            raise ConfigError("missing required key 'experiment'")
        experiment = raw["experiment"].strip()
        if experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment '{experiment}' (expected one of {', '.join(EXPERIMENTS)})")

        aliases = {"lambda": "lam", "Lambda": "Lam"}
        known = {f.name: f for f in fields(ExperimentConfig)}
        values: Dict[str, object] = {"experiment": experiment}
        for key, text in raw.items():
            name = aliases.get(key, key)
            if name == "experiment":
                continue
            if name not in known:
                raise ConfigError(f"unknown configuration key '{key}'")
            values[name] = _convert(name, text)

        for name in ("body0", "body1", "body"):
            if name in values:
                values[name] = _resolve_body(str(values[name]), base_dir)

        config = ExperimentConfig(**values)  # type: ignore[arg-type]
        config.validate()
        return config

    def validate(self) -> None:
        if self.operator not in ("poisson", "pucci_minus"):
            raise ConfigError(f"unknown operator '{self.operator}'")
        if self.pucci_method not in ("howard", "march"):
            raise ConfigError(f"unknown pucci_method '{self.pucci_method}'")
        if not (0.0 < self.lam <= self.Lam):
            raise ConfigError(f"need 0 < lambda <= Lambda, got {self.lam}, {self.Lam}")
        if self.h <= 0.0 or self.tol <= 0.0 or self.max_iters <= 0:
            raise ConfigError("h, tol and max_iters must be positive")
        if not (0.0 < self.mu < 1.0):
            raise ConfigError(f"mu must lie in (0, 1), got {self.mu}")
        if self.epsilon is not None and self.epsilon <= 0.0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.stencil_radius is not None and self.stencil_radius < 1.0:
            raise ConfigError(f"stencil_radius must be at least 1, got {self.stencil_radius}")
        if isinstance(self.p, str) and self.p != "auto-from-beta":
            raise ConfigError(f"p must be a number or 'auto-from-beta', got '{self.p}'")
        if self.m < 1 or any(m < 1 for m in self.m_list):
            raise ConfigError("rotation counts must be positive")
        if self.samples <= 0 or self.pairs_per_axis < 2 or self.levels < 2:
            raise ConfigError("samples, pairs_per_axis and levels are too small")

    def with_overrides(self, **overrides: object) -> "ExperimentConfig":
        updates = {key: value for key, value in overrides.items() if value is not None}
        if not updates:
            return self
        updated = replace(self, **updates)
        updated.validate()
        return updated

    def echo(self) -> Dict[str, str]:
        """String rendering of every field, in declaration order, for report headers."""
        return {f.name: _render(getattr(self, f.name)) for f in fields(self)}


def _convert(name: str, text: str) -> object:
    text = text.strip()
    try:
        if name in ("K", "max_iters", "m", "seed", "samples", "pairs_per_axis", "levels"):
            return int(text)
        if name in ("lam", "Lam", "relaxation", "dt_safety", "h", "tol", "beta", "mu", "epsilon", "hopf_exclusion", "stencil_radius"):
            return _parse_number(text)
        if name == "p":
            return text if text == "auto-from-beta" else _parse_number(text)
        if name == "m_list":
            return tuple(int(item) for item in _split_list(text))
        if name in ("r_list", "q_list"):
            return tuple(_parse_number(item) for item in _split_list(text))
        if name == "waiver":
            lowered = text.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
    except ValueError as exc:
        raise ConfigError(f"invalid value for {name}: '{text}'") from exc
    return text


def _parse_number(text: str) -> float:
    lowered = text.lower()
    if lowered in ("inf", "+inf", "infinity"):
        return math.inf
    if lowered in ("-inf", "-infinity"):
        return -math.inf
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def _split_list(text: str) -> List[str]:
    items = [item.strip() for item in text.replace(";", ",").split(",") if item.strip()]
    if not items:
        raise ValueError(text)
    return items


def _resolve_body(text: str, base_dir: Optional[Path]) -> str:
    keyword = text.split()[0] if text.split() else ""
    if keyword in BODY_KEYWORDS:
        return text
    path = Path(text)
    if not path.is_absolute() and base_dir is not None:
        path = base_dir / path
    if not path.exists():
        raise ConfigError(f"polygon file not found: {text}")
    return str(path)


def _render(value: object) -> str:
    if isinstance(value, tuple):
        return ",".join(_render(item) for item in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)
