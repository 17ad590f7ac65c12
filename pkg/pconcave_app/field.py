"""Grid-sampled fields over convex bodies: masking, interpolation, norms and level sets."""

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid

from pconcave_app.convex_geom import CONTAIN_TOL, ConvexBody, contains_points, inradius
from pconcave_app.errors import ArgumentError, ResolutionError

EXTERIOR = 0
BOUNDARY = 1
INTERIOR = 2

# neighbour order used by boundary_distances: +x, -x, +y, -y
NEIGHBOUR_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))
_BISECTION_STEPS = 48
_SNAP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values on the lattice h*Z^2 restricted to a box around `body`.

    Node (i, j) sits at ((index_origin[0] + i) h, (index_origin[1] + j) h), so grids
    of equal spacing share their nodes exactly. `free` marks the unknowns of a
    Dirichlet problem (nodes strictly inside the body); nodes on the boundary are
    non-exterior but carry the boundary value 0.
    """

    index_origin: Tuple[int, int]
    h: float
    values: np.ndarray
    mask: np.ndarray
    free: np.ndarray
    body: ConvexBody
    crossings: np.ndarray
    cell_weights: np.ndarray
    meta: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in ("values", "mask", "free", "crossings", "cell_weights"):
            getattr(self, name).setflags(write=False)
        object.__setattr__(self, "meta", MappingProxyType(dict(self.meta)))

    @property
    def nx(self) -> int:
        return self.values.shape[0]

    @property
    def ny(self) -> int:
        return self.values.shape[1]

    @property
    def origin(self) -> np.ndarray:
        return np.array(self.index_origin, dtype=float) * self.h

    @property
    def xs(self) -> np.ndarray:
        return (self.index_origin[0] + np.arange(self.nx)) * self.h

    @property
    def ys(self) -> np.ndarray:
        return (self.index_origin[1] + np.arange(self.ny)) * self.h

    @property
    def boundary_distances(self) -> np.ndarray:
        """Fractional arm lengths (units of h) along +x, -x, +y, -y at boundary-adjacent unknowns; NaN elsewhere."""
        present = (self.mask == BOUNDARY) & self.free
        return np.where(present[..., None], self.crossings, np.nan)

    def node_points(self) -> np.ndarray:
        x, y = np.meshgrid(self.xs, self.ys, indexing="ij")
        return np.stack((x, y), axis=-1)

    def with_values(self, values: np.ndarray, dirichlet: bool = True, **meta: object) -> "GridFunction":
        """Copy with new values. Exterior nodes are forced to 0, and so are boundary
        nodes unless `dirichlet` is False (for data fields such as sources)."""
        values = np.array(values, dtype=float)
        if values.shape != self.values.shape:
            raise ArgumentError(f"expected values of shape {self.values.shape}, got {values.shape}")
        values[~self.free if dirichlet else self.mask == EXTERIOR] = 0.0
        merged = dict(self.meta)
        merged.update(meta)
        return GridFunction(
            index_origin=self.index_origin,
            h=self.h,
            values=values,
            mask=self.mask,
            free=self.free,
            body=self.body,
            crossings=self.crossings,
            cell_weights=self.cell_weights,
            meta=merged,
        )


def _shift(array: np.ndarray, di: int, dj: int, fill: object) -> np.ndarray:
    """out[i, j] = array[i + di, j + dj], `fill` where that index leaves the array."""
    out = np.full_like(array, fill)
    nx, ny = array.shape[:2]
    src_i = slice(max(di, 0), nx + min(di, 0))
    dst_i = slice(max(-di, 0), nx + min(-di, 0))
    src_j = slice(max(dj, 0), ny + min(dj, 0))
    dst_j = slice(max(-dj, 0), ny + min(-dj, 0))
    out[dst_i, dst_j] = array[src_i, src_j]
    return out


def bisect_crossings(body: ConvexBody, starts: np.ndarray, step: np.ndarray) -> np.ndarray:
    """Largest t in [0, 1] with starts + t*step still inside the body (depth > 0)."""
    lo = np.zeros(len(starts))
    hi = np.ones(len(starts))
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        inside = body.depth(starts + mid[:, None] * step) > 0.0
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return 0.5 * (lo + hi)


def discretize(body: ConvexBody, h: float) -> GridFunction:
    """Zero-valued field on the h-lattice over `body`, with mask, arm lengths and cell weights."""
    if not h > 0.0:
        raise ArgumentError(f"grid spacing must be positive, got {h}")
    radius = inradius(body)
    if h > radius / 3.0 * (1.0 + 1e-6):
        raise ResolutionError(f"body too thin for h={h}: inradius {radius:.4g} needs h <= {radius / 3.0:.4g}")

    xmin, ymin, xmax, ymax = body.bounding_box()
    i0, i1 = math.floor(xmin / h) - 1, math.ceil(xmax / h) + 1
    j0, j1 = math.floor(ymin / h) - 1, math.ceil(ymax / h) + 1
    nx, ny = i1 - i0 + 1, j1 - j0 + 1
    x, y = np.meshgrid(np.arange(i0, i1 + 1) * h, np.arange(j0, j1 + 1) * h, indexing="ij")
    points = np.stack((x, y), axis=-1)

    depth = body.depth(points.reshape(-1, 2)).reshape(nx, ny)
    contained = depth >= -CONTAIN_TOL
    free = depth > 1e-10 * h

    crossings = np.ones((nx, ny, 4))
    halves = np.zeros((nx, ny, 4))
    not_free_neighbour = np.zeros((nx, ny), dtype=bool)
    for k, (di, dj) in enumerate(NEIGHBOUR_STEPS):
        neighbour_contained = _shift(contained, di, dj, False)
        not_free_neighbour |= ~_shift(free, di, dj, False)
        leaving = contained & ~neighbour_contained
        if np.any(leaving):
            step = np.array([di * h, dj * h])
            crossings[leaving, k] = bisect_crossings(body, points[leaving], step)
        halves[..., k] = np.where(neighbour_contained, 0.5, crossings[..., k])

    mask = np.full((nx, ny), EXTERIOR, dtype=np.int8)
    mask[contained] = INTERIOR
    mask[contained & (~free | not_free_neighbour)] = BOUNDARY

    fraction_x = halves[..., 0] + halves[..., 1]
    fraction_y = halves[..., 2] + halves[..., 3]
    cell_weights = np.where(contained, h * h * fraction_x * fraction_y, 0.0)
    crossings[~contained] = np.nan

    return GridFunction(
        index_origin=(i0, j0),
        h=float(h),
        values=np.zeros((nx, ny)),
        mask=mask,
        free=free,
        body=body,
        crossings=crossings,
        cell_weights=cell_weights,
    )


def bilinear_weights(gf: GridFunction, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Lower-left cell indices (i, j), the four corner weights (n, 4) ordered
    (i, j), (i+1, j), (i, j+1), (i+1, j+1), and an on-grid flag per point."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    s = pts[:, 0] / gf.h - gf.index_origin[0]
    t = pts[:, 1] / gf.h - gf.index_origin[1]
    s = np.where(np.abs(s - np.round(s)) < _SNAP_TOL, np.round(s), s)
    t = np.where(np.abs(t - np.round(t)) < _SNAP_TOL, np.round(t), t)
    on_grid = (s >= 0.0) & (s <= gf.nx - 1) & (t >= 0.0) & (t <= gf.ny - 1)
    i = np.clip(np.floor(s).astype(int), 0, gf.nx - 2)
    j = np.clip(np.floor(t).astype(int), 0, gf.ny - 2)
    fs = np.clip(s - i, 0.0, 1.0)
    ft = np.clip(t - j, 0.0, 1.0)
    weights = np.column_stack(((1.0 - fs) * (1.0 - ft), fs * (1.0 - ft), (1.0 - fs) * ft, fs * ft))
    return i, j, weights, on_grid


def bilinear(gf: GridFunction, points: np.ndarray) -> np.ndarray:
    """Bilinear interpolation of the stored values (exterior nodes hold 0); 0 off the grid."""
    pts = np.asarray(points, dtype=float)
    shape = pts.shape[:-1]
    i, j, w, on_grid = bilinear_weights(gf, pts)
    v = gf.values
    out = w[:, 0] * v[i, j] + w[:, 1] * v[i + 1, j] + w[:, 2] * v[i, j + 1] + w[:, 3] * v[i + 1, j + 1]
    return np.where(on_grid, out, 0.0).reshape(shape)


def sample_points(gf: GridFunction, points: np.ndarray) -> np.ndarray:
    """Vectorised `sample`: bilinear inside the body, 0 outside."""
    pts = np.asarray(points, dtype=float)
    values = bilinear(gf, pts)
    return np.where(contains_points(gf.body, pts), values, 0.0)


def sample(gf: GridFunction, x) -> float:
    return float(sample_points(gf, np.asarray(x, dtype=float).reshape(1, 2))[0])


def lq_norm(gf: GridFunction, q: float) -> float:
    """Clipped-cell quadrature of (sum w |u|^q)^(1/q); max over nodes for q = inf."""
    if not q > 0.0:
        raise ArgumentError(f"norm exponent must be positive, got {q}")
    inside = gf.mask != EXTERIOR
    magnitudes = np.abs(gf.values[inside])
    if q == math.inf:
        return float(np.max(magnitudes)) if magnitudes.size else 0.0
    total = float(np.sum(gf.cell_weights[inside] * magnitudes ** q))
    return total ** (1.0 / q)


def superlevel_measure(gf: GridFunction, t: float) -> float:
    """Clipped-cell area of the nodes with value >= t."""
    if t < 0.0:
        raise ArgumentError(f"level must be nonnegative, got {t}")
    selected = (gf.mask != EXTERIOR) & (gf.values >= t)
    return float(np.sum(gf.cell_weights[selected]))


def layer_cake_norm(gf: GridFunction, q: float, levels: int = 200) -> float:
    """int_0^max q t^(q-1) |{u >= t}| dt by the composite trapezoid rule, i.e. ||u||_q^q."""
    top = lq_norm(gf, math.inf)
    if top == 0.0:
        return 0.0
    ts = np.linspace(0.0, top, levels + 1)
    measures = np.array([superlevel_measure(gf, float(t)) for t in ts])
    weights = np.zeros_like(ts)
    weights[1:] = q * ts[1:] ** (q - 1.0)
    if q == 1.0:
        weights[0] = 1.0
    return float(trapezoid(weights * measures, ts))


def lipschitz_estimate(gf: GridFunction, power: float = 1.0) -> float:
    """Max finite-difference slope of u^power over neighbouring non-exterior nodes."""
    inside = gf.mask != EXTERIOR
    values = np.power(np.maximum(gf.values, 0.0), power)
    best = 0.0
    for di, dj in NEIGHBOUR_STEPS[::2]:
        pair = inside & _shift(inside, di, dj, False)
        if np.any(pair):
            diff = np.abs(_shift(values, di, dj, 0.0) - values)[pair]
            best = max(best, float(np.max(diff)) / gf.h)
    return best


def resample(gf: GridFunction, target: GridFunction) -> GridFunction:
    """`gf` sampled at the nodes of `target` (zero outside gf's body)."""
    values = sample_points(gf, target.node_points())
    return target.with_values(values)


def node_values(gf: GridFunction, selector: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
    """(points, values) of the selected nodes in row-major order; default the non-exterior nodes."""
    if selector is None:
        selector = gf.mask != EXTERIOR
    return gf.node_points()[selector], gf.values[selector]
