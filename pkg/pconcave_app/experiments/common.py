"""Helpers shared by the experiment runners: exponent resolution, cached solves and slack budgets."""

import logging
import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from pconcave_app.config import ExperimentConfig
from pconcave_app.convex_geom import ConvexBody, describe_body, parse_body_literal, perimeter
from pconcave_app.convolve import interpolation_slack
from pconcave_app.field import EXTERIOR, GridFunction, lipschitz_estimate
from pconcave_app.pde_solve import OperatorSpec, SolveParams, SourceTerm, solve
from pconcave_app.report import SlackBudget
from pconcave_app.scalar_means import p_from_beta


def resolve_p(config: ExperimentConfig) -> float:
    if config.p == "auto-from-beta":
        p = p_from_beta(config.beta)
        logging.info("Using p=%.6g from beta=%s", p, config.beta)
        return p
    return float(config.p)


def operator_spec(config: ExperimentConfig) -> OperatorSpec:
    return OperatorSpec(
        kind=config.operator,
        lam=config.lam,
        Lam=config.Lam,
        source=SourceTerm.parse(config.source),
        directions=config.K,
    )


def solve_params(config: ExperimentConfig) -> SolveParams:
    return SolveParams(
        h=config.h,
        tol=config.tol,
        max_iters=config.max_iters,
        relaxation=config.relaxation,
        dt_safety=config.dt_safety,
        pucci_method=config.pucci_method,
        stencil_radius=config.stencil_radius,
    )


@lru_cache(maxsize=32)
def _solve_described(description: str, spec: OperatorSpec, params: SolveParams) -> GridFunction:
    return solve(parse_body_literal(description), spec, params)


def solve_on(body: ConvexBody, spec: OperatorSpec, params: SolveParams) -> GridFunction:
    """Solve once per (body, operator, parameters); sampled sources are never cached."""
    if spec.source.kind == "sampled":
        return solve(body, spec, params)
    return _solve_described(describe_body(body), spec, params)


def clear_solve_cache() -> None:
    _solve_described.cache_clear()


def solver_error_bound(fields: Sequence[GridFunction], spec: OperatorSpec) -> float:
    """Residual times the barrier (R^2 - |x|^2)/(4 lambda), R the largest distance of the bodies from the origin."""
    bound = 0.0
    for gf in fields:
        residual = float(gf.meta.get("residual", 0.0))
        radius = float(np.max(gf.body.support_samples))
        bound = max(bound, residual * radius * radius / (4.0 * spec.lam))
    return bound


def quadrature_bound(fields: Sequence[GridFunction]) -> float:
    """Boundary strip of width h along the perimeter, where values stay below L h."""
    return max(perimeter(gf.body) * gf.h * gf.h * lipschitz_estimate(gf) for gf in fields)


def slack_budget(fields: Sequence[GridFunction], spec: OperatorSpec, with_quadrature: bool = True) -> SlackBudget:
    return SlackBudget(
        solver=solver_error_bound(fields, spec),
        interpolation=interpolation_slack(*fields),
        quadrature=quadrature_bound(fields) if with_quadrature else 0.0,
    )


def subsampled_nodes(gf: GridFunction, per_axis: int) -> np.ndarray:
    """Non-exterior nodes on a coarsened per_axis x per_axis index subgrid."""
    ii = np.unique(np.round(np.linspace(0, gf.nx - 1, per_axis)).astype(int))
    jj = np.unique(np.round(np.linspace(0, gf.ny - 1, per_axis)).astype(int))
    points = gf.node_points()
    chosen = [(i, j) for i in ii for j in jj if gf.mask[i, j] != EXTERIOR]
    return np.array([points[i, j] for i, j in chosen]).reshape(-1, 2)


def format_exponent(value: float) -> str:
    return "inf" if value == math.inf else repr(float(value))
