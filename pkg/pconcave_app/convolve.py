"""The (p, mu)-convolution of nonnegative grid fields and its structural diagnostics."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from pconcave_app.convex_geom import POLYGON, ConvexBody, minkowski_combine
from pconcave_app.errors import ArgumentError, InternalError
from pconcave_app.field import (
    EXTERIOR,
    INTERIOR,
    GridFunction,
    bilinear,
    discretize,
    lipschitz_estimate,
    node_values,
    sample,
)
from pconcave_app.scalar_means import PMeanSpec, p_mean, p_mean_array, p_mean_multi

MONOTONE_DRIFT = 1e-12


@dataclass(frozen=True)
class ConvolutionResult:
    """`argmax[i, j]` holds (x0, y0, x1, y1) of the maximizing pair at target node (i, j), NaN where none was scanned."""

    field: GridFunction
    argmax: np.ndarray
    spec: PMeanSpec

    @property
    def mu(self) -> float:
        return self.spec.weights[-1]

    @property
    def p(self) -> float:
        return self.spec.p


def _check_exponent(p: float) -> None:
    if not (0.0 <= p < 1.0):
        raise ArgumentError(f"convolution exponent must lie in [0, 1), got {p}")


def _scan_chunk(
    targets: np.ndarray,
    points0: np.ndarray,
    values0: np.ndarray,
    u1: GridFunction,
    mu: float,
    p: float,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Best value, best candidate index (-1 when none is admissible) and the derived x1 per target."""
    xmin, ymin, xmax, ymax = u1.body.bounding_box()
    best_value = np.zeros(len(targets))
    best_index = np.full(len(targets), -1)
    best_x1 = np.full((len(targets), 2), np.nan)
    for k, target in enumerate(targets):
        x1 = (target[None, :] - (1.0 - mu) * points0) / mu
        near = (x1[:, 0] >= xmin - 1e-12) & (x1[:, 0] <= xmax + 1e-12) & (x1[:, 1] >= ymin - 1e-12) & (x1[:, 1] <= ymax + 1e-12)
        admissible = np.flatnonzero(near)
        if admissible.size:
            depth = u1.body.depth(x1[admissible])
            admissible = admissible[depth >= -1e-12]
        if admissible.size == 0:
            continue
        means = p_mean_array(values0[admissible], np.maximum(bilinear(u1, x1[admissible]), 0.0), mu, p)
        winner = int(np.argmax(means))
        best_value[k] = means[winner]
        best_index[k] = admissible[winner]
        best_x1[k] = x1[admissible[winner]]
    return best_value, best_index, best_x1


def convolve_binary(
    u0: GridFunction,
    u1: GridFunction,
    mu: float,
    p: float,
    h_out: Optional[float] = None,
    workers: int = 1,
    chunk_size: int = 64,
) -> ConvolutionResult:
    """u_{p,mu}(x) = max M_p(u0(x0), u1(x1); mu) over grid nodes x0 of u0 with x1 = (x - (1-mu) x0)/mu in body1.

    The target grid lives on (1-mu) body0 + mu body1. Candidates are scanned in
    row-major order and the first maximizer wins; target chunks are distributed
    over `workers` threads.
    """
    _check_exponent(p)
    if not (0.0 < mu < 1.0):
        raise ArgumentError(f"mu must lie in (0, 1), got {mu}")
    h_out = h_out if h_out is not None else max(u0.h, u1.h)
    target_body = minkowski_combine(u0.body, u1.body, mu)
    target = discretize(target_body, h_out)
    points0, values0 = node_values(u0)
    values0 = np.maximum(values0, 0.0)

    scanned = np.argwhere(target.free)
    target_points = target.node_points()[target.free]
    chunks = [slice(start, start + chunk_size) for start in range(0, len(target_points), chunk_size)]
    best_value = np.zeros(len(target_points))
    best_index = np.full(len(target_points), -1)
    best_x1 = np.full((len(target_points), 2), np.nan)

    logging.info(
        "Convolving %s target nodes against %s candidates (p=%s, mu=%s, %s chunks)",
        len(target_points),
        len(points0),
        p,
        mu,
        len(chunks),
    )
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        future_map = {
            executor.submit(_scan_chunk, target_points[chunk], points0, values0, u1, mu, p): chunk for chunk in chunks
        }
        for future in as_completed(future_map):
            chunk = future_map[future]
            best_value[chunk], best_index[chunk], best_x1[chunk] = future.result()

    values = np.zeros(target.free.shape)
    argmax = np.full(target.free.shape + (4,), np.nan)
    missing = best_index < 0
    if np.any(missing):
        ii, jj = scanned[missing].T
        if np.any(target.mask[ii, jj] == INTERIOR):
            raise InternalError(f"{int(np.count_nonzero(target.mask[ii, jj] == INTERIOR))} interior target nodes have no admissible candidate")
        logging.debug("%s boundary-adjacent target nodes have no admissible candidate", int(np.count_nonzero(missing)))
    found = ~missing
    ii, jj = scanned[found].T
    values[ii, jj] = best_value[found]
    argmax[ii, jj, :2] = points0[best_index[found]]
    argmax[ii, jj, 2:] = best_x1[found]

    spec = PMeanSpec.binary(mu, p)
    result = target.with_values(values, p=p, mu=mu)
    return ConvolutionResult(field=result, argmax=argmax, spec=spec)


def convolution_sup(u0: GridFunction, u1: GridFunction, mu: float, p: float, reach: int = 2) -> float:
    """Maximum of the (p, mu)-convolution, scanned only at the target nodes within `reach`
    spacings of (1-mu) argmax u0 + mu argmax u1, where it is attained."""
    _check_exponent(p)
    if not (0.0 < mu < 1.0):
        raise ArgumentError(f"mu must lie in (0, 1), got {mu}")
    h = max(u0.h, u1.h)
    peak0 = u0.node_points()[np.unravel_index(int(np.argmax(u0.values)), u0.values.shape)]
    peak1 = u1.node_points()[np.unravel_index(int(np.argmax(u1.values)), u1.values.shape)]
    centre = np.round(((1.0 - mu) * peak0 + mu * peak1) / h)
    steps = np.arange(-reach, reach + 1)
    offsets = np.stack(np.meshgrid(steps, steps, indexing="ij"), axis=-1).reshape(-1, 2)
    points0, values0 = node_values(u0)
    best, _, _ = _scan_chunk((centre + offsets) * h, points0, np.maximum(values0, 0.0), u1, mu, p)
    return float(np.max(best, initial=0.0))


def convolve_multi(
    fields: Sequence[GridFunction],
    weights: PMeanSpec,
    p: Optional[float] = None,
    h_out: Optional[float] = None,
    intermediate_h: Optional[float] = None,
    workers: int = 1,
    chunk_size: int = 64,
) -> ConvolutionResult:
    """Left fold v_k = convolve_binary(v_{k-1}, u_k, w_k / (w_1 + ... + w_k)).

    Intermediate folds use `intermediate_h` (default h_out); the last one uses h_out.
    """
    if len(fields) < 2:
        raise ArgumentError(f"convolve_multi needs at least two fields, got {len(fields)}")
    if len(fields) != weights.m:
        raise ArgumentError(f"got {len(fields)} fields for {weights.m} weights")
    p = weights.p if p is None else p
    _check_exponent(p)
    h_out = h_out if h_out is not None else max(f.h for f in fields)
    step_h = intermediate_h if intermediate_h is not None else h_out

    current = fields[0]
    result: Optional[ConvolutionResult] = None
    cumulative = weights.weights[0]
    for k in range(1, len(fields)):
        cumulative += weights.weights[k]
        mu = weights.weights[k] / cumulative
        last = k == len(fields) - 1
        result = convolve_binary(current, fields[k], mu, p, h_out if last else step_h, workers, chunk_size)
        current = result.field
    assert result is not None
    return ConvolutionResult(field=result.field, argmax=result.argmax, spec=PMeanSpec(p=p, weights=weights.weights))


@dataclass(frozen=True)
class MonotoneReport:
    passed: bool
    max_drift: float
    exponents: Tuple[float, ...]
    results: Tuple[ConvolutionResult, ...]


def monotone_in_p_check(
    u0: GridFunction,
    u1: GridFunction,
    mu: float,
    p_list: Sequence[float],
    h_out: Optional[float] = None,
    workers: int = 1,
) -> MonotoneReport:
    """u_{p,mu} <= u_{q,mu} pointwise for consecutive exponents p < q in p_list."""
    exponents = tuple(float(p) for p in p_list)
    if list(exponents) != sorted(exponents):
        raise ArgumentError(f"exponents must be ascending, got {exponents}")
    results = tuple(convolve_binary(u0, u1, mu, p, h_out, workers) for p in exponents)
    drift = 0.0
    for lower, upper in zip(results, results[1:]):
        drift = max(drift, float(np.max(lower.field.values - upper.field.values, initial=0.0)))
    return MonotoneReport(passed=drift <= MONOTONE_DRIFT, max_drift=drift, exponents=exponents, results=results)


@dataclass(frozen=True)
class LagrangeReport:
    max_mismatch: float
    fraction_below: float
    threshold: float
    tested: int
    excluded: int


def _gradient(gf: GridFunction, points: np.ndarray) -> np.ndarray:
    h = gf.h
    dx = (bilinear(gf, points + [h, 0.0]) - bilinear(gf, points - [h, 0.0])) / (2.0 * h)
    dy = (bilinear(gf, points + [0.0, h]) - bilinear(gf, points - [0.0, h])) / (2.0 * h)
    return np.column_stack((dx, dy))


def _near_vertex(body: ConvexBody, points: np.ndarray, radius: float) -> np.ndarray:
    if body.kind != POLYGON or len(points) == 0:
        return np.zeros(len(points), dtype=bool)
    gaps = np.hypot(points[:, None, 0] - body.core[None, :, 0], points[:, None, 1] - body.core[None, :, 1])
    return np.min(gaps, axis=1) <= radius


def lagrange_diagnostic(
    result: ConvolutionResult,
    u0: GridFunction,
    u1: GridFunction,
    p: Optional[float] = None,
    threshold: float = 0.1,
    flat_fraction: float = 0.05,
) -> LagrangeReport:
    """Compare u0^(p-1) Du0 at x0 with u1^(p-1) Du1 at x1 over the recorded argmax pairs.

    Targets within 4 h_out of the boundary, pairs within 2h of a polygon corner
    or of their own boundaries, and pairs where both gradients are below
    flat_fraction of the largest one are excluded.
    """
    p = result.p if p is None else p
    if not (0.0 < p < 1.0):
        raise ArgumentError(f"Lagrange diagnostic needs p in (0, 1), got {p}")
    target = result.field
    scanned = target.free & ~np.isnan(result.argmax[..., 0])
    points = target.node_points()[scanned]
    pairs = result.argmax[scanned]
    x0, x1 = pairs[:, :2], pairs[:, 2:]

    keep = target.body.depth(points) > 4.0 * target.h
    keep &= u0.body.depth(x0) > 2.0 * u0.h
    keep &= u1.body.depth(x1) > 2.0 * u1.h
    keep &= ~_near_vertex(u0.body, x0, 2.0 * u0.h) & ~_near_vertex(u1.body, x1, 2.0 * u1.h)
    v0 = bilinear(u0, x0[keep])
    v1 = bilinear(u1, x1[keep])
    positive = (v0 > 0.0) & (v1 > 0.0)
    g0 = (v0[positive] ** (p - 1.0))[:, None] * _gradient(u0, x0[keep][positive])
    g1 = (v1[positive] ** (p - 1.0))[:, None] * _gradient(u1, x1[keep][positive])
    n0 = np.hypot(g0[:, 0], g0[:, 1])
    n1 = np.hypot(g1[:, 0], g1[:, 1])
    floor = flat_fraction * float(np.max(np.maximum(n0, n1), initial=0.0))
    steep = np.maximum(n0, n1) > floor
    mismatch = np.hypot(*(g0 - g1)[steep].T) / np.maximum(np.maximum(n0, n1)[steep], 1e-300)
    tested = int(mismatch.size)
    excluded = int(len(points) - tested)
    if tested == 0:
        return LagrangeReport(max_mismatch=0.0, fraction_below=0.0, threshold=threshold, tested=0, excluded=excluded)
    return LagrangeReport(
        max_mismatch=float(np.max(mismatch)),
        fraction_below=float(np.mean(mismatch < threshold)),
        threshold=threshold,
        tested=tested,
        excluded=excluded,
    )


@dataclass(frozen=True)
class BoundaryLawReport:
    boundary_max: float
    interior_min: float
    passed: bool


def boundary_law(result: ConvolutionResult) -> BoundaryLawReport:
    """Zero on the boundary nodes of the target body, positive at interior nodes."""
    gf = result.field
    on_boundary = (gf.mask != EXTERIOR) & ~gf.free
    interior = gf.mask == INTERIOR
    boundary_max = float(np.max(np.abs(gf.values[on_boundary]), initial=0.0))
    interior_min = float(np.min(gf.values[interior], initial=math.inf))
    return BoundaryLawReport(boundary_max=boundary_max, interior_min=interior_min, passed=boundary_max == 0.0 and interior_min > 0.0)


@dataclass(frozen=True)
class HypographReport:
    passed: bool
    min_slack: float
    allowance: float
    samples: int
    attained_error: float


def hypograph_spot_check(
    result: ConvolutionResult,
    u0: GridFunction,
    u1: GridFunction,
    samples: int = 500,
    seed: int = 0,
) -> HypographReport:
    """Hypograph of u_{p,mu}^p against the mu-combination of the input hypographs.

    Random points (x0, t0), (x1, t1) under the graphs of u0^p, u1^p combine to a
    point that must lie under the graph of u_{p,mu}^p up to one cell of slope;
    conversely every target node value is attained by its recorded pair.
    """
    p, mu = result.p, result.mu
    if p == 0.0:
        raise ArgumentError("hypograph check needs p > 0")
    rng = np.random.default_rng(seed)
    points0, values0 = node_values(u0)
    points1, values1 = node_values(u1)
    i0 = rng.integers(0, len(points0), size=samples)
    i1 = rng.integers(0, len(points1), size=samples)
    t0 = rng.uniform(0.0, 1.0, size=samples) * np.maximum(values0[i0], 0.0) ** p
    t1 = rng.uniform(0.0, 1.0, size=samples) * np.maximum(values1[i1], 0.0) ** p
    combined = (1.0 - mu) * points0[i0] + mu * points1[i1]
    heights = (1.0 - mu) * t0 + mu * t1
    surface = np.maximum(bilinear(result.field, combined), 0.0) ** p
    allowance = 2.0 * lipschitz_estimate(result.field, power=p) * result.field.h
    slack = surface - heights
    min_slack = float(np.min(slack))

    gf = result.field
    scanned = gf.free & ~np.isnan(result.argmax[..., 0])
    pairs = result.argmax[scanned]
    attained = p_mean_array(
        np.maximum(bilinear(u0, pairs[:, :2]), 0.0),
        np.maximum(bilinear(u1, pairs[:, 2:]), 0.0),
        mu,
        p,
    )
    attained_error = float(np.max(np.abs(attained - gf.values[scanned]), initial=0.0))
    return HypographReport(
        passed=min_slack >= -allowance and attained_error <= 1e-12,
        min_slack=min_slack,
        allowance=allowance,
        samples=samples,
        attained_error=attained_error,
    )


def interpolation_slack(*fields: GridFunction) -> float:
    """2 L h, the allowance for comparing bilinear samples against node values."""
    return max(2.0 * lipschitz_estimate(gf) * gf.h for gf in fields)


def brute_force_binary(u0: GridFunction, u1: GridFunction, mu: float, p: float, h_out: Optional[float] = None) -> GridFunction:
    """Double loop over target nodes and u0 nodes with the same interpolation rule as convolve_binary."""
    h_out = h_out if h_out is not None else max(u0.h, u1.h)
    target = discretize(minkowski_combine(u0.body, u1.body, mu), h_out)
    points0, values0 = node_values(u0)
    nodes = target.node_points()
    values = np.zeros(target.free.shape)
    for i, j in np.argwhere(target.free):
        best = 0.0
        for x0, a in zip(points0, values0):
            x1 = (nodes[i, j] - (1.0 - mu) * x0) / mu
            if u1.body.depth(x1.reshape(1, 2))[0] < -1e-12:
                continue
            b = max(float(bilinear(u1, x1.reshape(1, 2))[0]), 0.0)
            best = max(best, p_mean(max(float(a), 0.0), b, mu, p))
        values[i, j] = best
    return target.with_values(values)


def brute_force_multi(fields: Sequence[GridFunction], p: float, target: GridFunction) -> GridFunction:
    """Equal-weight m-ary scan over node tuples (x_1, ..., x_m) with mean equal to a target node.

    Nodes of all inputs must share one lattice; the last point is derived and must be a node.
    """
    m = len(fields)
    spec = PMeanSpec.equal(m, p)
    clouds = [node_values(f) for f in fields[:-1]]
    last = fields[-1]
    nodes = target.node_points()
    values = np.zeros(target.free.shape)
    for i, j in np.argwhere(target.free):
        best = 0.0
        for combo in _node_tuples(clouds):
            partial = sum(point for point, _ in combo)
            x_last = m * nodes[i, j] - partial
            if last.body.depth(x_last.reshape(1, 2))[0] < -1e-12:
                continue
            tail = max(sample(last, x_last), 0.0)
            candidate = [max(float(v), 0.0) for _, v in combo] + [tail]
            best = max(best, p_mean_multi(candidate, spec))
        values[i, j] = best
    return target.with_values(values)


def _node_tuples(clouds: List[Tuple[np.ndarray, np.ndarray]]):
    if not clouds:
        yield ()
        return
    points, values = clouds[0]
    for rest in _node_tuples(clouds[1:]):
        for point, value in zip(points, values):
            yield ((point, value),) + rest
