"""Shipped experiment presets, in the same key=value form as a config file."""

from typing import Dict

from pconcave_app.config import ExperimentConfig
from pconcave_app.errors import ConfigError

PRESETS: Dict[str, Dict[str, str]] = {
    "square-circle-torsion": {
        "experiment": "theorem41",
        "body0": "square 1",
        "body1": "disc 0 0 1",
        "source": "constant 1",
        "p": "0.5",
        "mu": "0.5",
        "h": "1/64",
    },
    "square-circle-norms": {
        "experiment": "corollary42",
        "body0": "square 1",
        "body1": "disc 0 0 1",
        "source": "constant 1",
        "p": "0.5",
        "mu": "0.5",
        "h": "1/64",
        "r_list": "1,2,inf",
    },
    "beta-concave-source": {
        "experiment": "corollary42",
        "body0": "square 1",
        "body1": "disc 0 0 1",
        "source": "radial beta_cap 2 2",
        "beta": "2",
        "p": "auto-from-beta",
        "mu": "0.5",
        "h": "1/64",
        "r_list": "1,2,inf",
    },
    "pucci-urysohn": {
        "experiment": "rearrangement65",
        "body": "square 1",
        "operator": "pucci_minus",
        "lambda": "1",
        "Lambda": "2",
        "source": "constant 1",
        "p": "0.5",
        "m": "8",
        "h": "1/64",
        "q_list": "1,2,inf",
    },
    "square-rearrangement": {
        "experiment": "rearrangement65",
        "body": "square 1",
        "source": "constant 1",
        "p": "0.5",
        "m": "8",
        "h": "1/64",
        "q_list": "1,2,inf",
    },
    "geometry-suite": {
        "experiment": "geometry_suite",
        "samples": "200",
    },
    "square-torsion-urysohn": {
        "experiment": "torsion_urysohn",
        "body": "square 1",
        "source": "constant 1",
        "h": "1/64",
    },
    "affine-source-assumption": {
        "experiment": "assumption_check",
        "source": "affine 1 0.5 0",
        "p": "1/3",
    },
}


def preset_config(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset '{name}' (expected one of {', '.join(sorted(PRESETS))})")
    return ExperimentConfig.from_mapping(PRESETS[name])
