"""Mean-width rearrangement: rotation means of the domain and m-ary convolutions of rotated fields."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from pconcave_app.convex_geom import (
    ConvexBody,
    Rotation,
    centroid,
    equal_area_disc,
    hausdorff_distance,
    mean_width,
    mean_width_disc,
    rotate,
    rotation_mean,
    translate,
)
from pconcave_app.convolve import convolve_multi
from pconcave_app.errors import ArgumentError
from pconcave_app.field import (
    EXTERIOR,
    GridFunction,
    discretize,
    lq_norm,
    resample,
    sample_points,
    superlevel_measure,
)
from pconcave_app.scalar_means import PMeanSpec

MEAN_WIDTH_TOL = 1e-9


def rotate_field(u: GridFunction, rotation: Rotation, h: Optional[float] = None) -> GridFunction:
    """u_rho(x) = u(rho^-1 x) on a fresh grid over rho(body)."""
    target = discretize(rotate(u.body, rotation), h if h is not None else u.h)
    pulled_back = rotation.inverse().apply(target.node_points())
    return target.with_values(sample_points(u, pulled_back), rotation=rotation.angle)


def center_on_lattice(u: GridFunction) -> GridFunction:
    """Translate u by a lattice vector so the centroid of its body is as close to the origin as the grid allows."""
    shift = np.round(centroid(u.body) / u.h).astype(int)
    if not np.any(shift):
        return u
    return replace(
        u,
        index_origin=(u.index_origin[0] - int(shift[0]), u.index_origin[1] - int(shift[1])),
        body=translate(u.body, -shift * u.h),
    )


def sharp_domain(body: ConvexBody, m: int) -> ConvexBody:
    return rotation_mean(body, m)


def sharp_rearrangement(
    u: GridFunction,
    p: float,
    m: int,
    h_out: Optional[float] = None,
    workers: int = 1,
    chunk_size: int = 64,
) -> GridFunction:
    """u#_{p,m}: equal-weight (p, 1/m)-convolution of the m equally spaced rotations of u.

    u is first moved so its centroid sits at the origin (up to the lattice).
    """
    if m < 2:
        raise ArgumentError(f"rearrangement needs m >= 2, got {m}")
    if not (0.0 < p < 1.0):
        raise ArgumentError(f"rearrangement exponent must lie in (0, 1), got {p}")
    centred = center_on_lattice(u)
    rotations = Rotation.equally_spaced(m)
    with ThreadPoolExecutor(max_workers=max(1, min(workers, m))) as executor:
        rotated = list(executor.map(lambda rho: rotate_field(centred, rho), rotations))
    result = convolve_multi(rotated, PMeanSpec.equal(m, p), p, h_out, workers=workers, chunk_size=chunk_size)
    logging.info("Rearrangement with m=%s, p=%s: max %.6g on %s nodes", m, p, lq_norm(result.field, math.inf), result.field.values.size)
    return result.field.with_values(result.field.values, m=m, p=p)


@dataclass
class RearrangementRun:
    source: GridFunction
    p: float
    m_list: Tuple[int, ...]
    domains: Dict[int, ConvexBody] = field(default_factory=dict)
    fields: Dict[int, GridFunction] = field(default_factory=dict)
    limit_ball: Optional[ConvexBody] = None

    def write_manifest(self, path: Union[str, Path]) -> Path:
        """Plain-text listing of m, mean width, max value and distance to the limit ball."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [
            f"p={self.p!r}",
            f"source_mean_width={mean_width(self.source.body)!r}",
            f"source_max={lq_norm(self.source, math.inf)!r}",
        ]
        for m in self.m_list:
            domain = self.domains[m]
            lines.append(
                f"m={m} mean_width={mean_width(domain)!r} "
                f"max={lq_norm(self.fields[m], math.inf)!r} "
                f"hausdorff_to_ball={hausdorff_distance(domain, self.limit_ball)!r}"
            )
        path.write_text("\n".join(lines) + "\n")
        return path


def run_rearrangement(
    u: GridFunction,
    p: float,
    m_list: Sequence[int],
    h_out: Optional[float] = None,
    workers: int = 1,
) -> RearrangementRun:
    m_list = tuple(int(m) for m in m_list)
    if list(m_list) != sorted(set(m_list)):
        raise ArgumentError(f"m_list must be strictly increasing, got {m_list}")
    centred = center_on_lattice(u)
    run = RearrangementRun(source=centred, p=p, m_list=m_list, limit_ball=mean_width_disc(centred.body))
    for m in m_list:
        run.domains[m] = sharp_domain(centred.body, m)
        run.fields[m] = sharp_rearrangement(centred, p, m, h_out, workers)
    return run


@dataclass(frozen=True)
class ConvergenceReport:
    m_list: Tuple[int, ...]
    sup_differences: Tuple[float, ...]
    hausdorff: Tuple[float, ...]
    mean_width_drift: float
    passed: bool


def rearrangement_convergence(run: RearrangementRun, slack: float = 0.0) -> ConvergenceReport:
    """Sup differences of consecutive u#_{p,m} on the limit ball's grid and distances of Omega#_m to the ball.

    Passes when the differences are non-increasing or already below `slack`.
    """
    if len(run.m_list) < 3:
        raise ArgumentError("convergence report needs at least three rotation counts")
    reference = discretize(run.limit_ball, run.source.h)
    resampled = [resample(run.fields[m], reference) for m in run.m_list]
    differences = tuple(float(np.max(np.abs(a.values - b.values))) for a, b in zip(resampled, resampled[1:]))
    distances = tuple(hausdorff_distance(run.domains[m], run.limit_ball) for m in run.m_list)
    width = mean_width(run.source.body)
    drift = max(abs(mean_width(run.domains[m]) - width) for m in run.m_list)
    monotone = all(later <= earlier or later <= slack for earlier, later in zip(differences, differences[1:]))
    if not monotone:
        logging.warning("Rearrangement differences are not decreasing: %s", differences)
    return ConvergenceReport(
        m_list=run.m_list,
        sup_differences=differences,
        hausdorff=distances,
        mean_width_drift=drift,
        passed=monotone and drift <= MEAN_WIDTH_TOL,
    )


@dataclass(frozen=True)
class GrowthReport:
    levels: Tuple[float, ...]
    slacks: Tuple[float, ...]
    min_slack: float
    allowance: float
    passed: bool


def superlevel_growth(u: GridFunction, rearranged: GridFunction, levels: int = 20, allowance: float = 0.0) -> GrowthReport:
    """|{u# >= t}| - |{u >= t}| at `levels` equally spaced levels strictly between 0 and max u."""
    top = lq_norm(u, math.inf)
    ts = tuple(float(t) for t in np.linspace(0.0, top, levels + 2)[1:-1])
    slacks = tuple(superlevel_measure(rearranged, t) - superlevel_measure(u, t) for t in ts)
    worst = min(slacks) if slacks else 0.0
    return GrowthReport(levels=ts, slacks=slacks, min_slack=worst, allowance=allowance, passed=worst >= -allowance)


@dataclass(frozen=True)
class ContainmentReport:
    level: float
    min_slack: float
    samples: int
    passed: bool


def level_set_containment(
    u: GridFunction,
    rearranged: GridFunction,
    m: int,
    level: float,
    samples: int = 200,
    seed: int = 0,
    allowance: float = 0.0,
) -> ContainmentReport:
    """Spot check that (1/m) sum_i rho_i {u >= t} lies inside {u#_{p,m} >= t}.

    u must be the centred source the rearrangement was built from.
    """
    selected = (u.mask != EXTERIOR) & (u.values >= level)
    points = u.node_points()[selected]
    if len(points) == 0:
        return ContainmentReport(level=level, min_slack=0.0, samples=0, passed=True)
    rng = np.random.default_rng(seed)
    rotations = Rotation.equally_spaced(m)
    combined = np.zeros((samples, 2))
    for rotation in rotations:
        combined += rotation.apply(points[rng.integers(0, len(points), size=samples)])
    combined /= m
    slack = sample_points(rearranged, combined) - level
    worst = float(np.min(slack))
    return ContainmentReport(level=level, min_slack=worst, samples=samples, passed=worst >= -allowance)


@dataclass(frozen=True)
class UrysohnReport:
    equal_area_radius: float
    half_mean_width: float
    passed: bool


def urysohn_containment(body: ConvexBody) -> UrysohnReport:
    """The equal-area disc is no wider than the mean width: sqrt(|K|/pi) <= w(K)/2."""
    radius = equal_area_disc(body).radius
    half_width = 0.5 * mean_width(body)
    return UrysohnReport(equal_area_radius=radius, half_mean_width=half_width, passed=radius <= half_width + 1e-12)


def rearranged_norms(u: GridFunction, rearranged: GridFunction, v: GridFunction, exponents: Sequence[float]) -> List[Tuple[float, float, float, float]]:
    """(q, ||u||_q, ||u#||_q, ||v||_q) for each exponent."""
    return [(q, lq_norm(u, q), lq_norm(rearranged, q), lq_norm(v, q)) for q in exponents]
