"""Planar convex bodies: exact polygon calculus and sampled support functions.

A body with a closed form is stored as a core polygon (which may degenerate to a
segment or a single point) offset by a radius. Polygons have radius 0 and discs
a one-point core, so Minkowski combinations and rotation means of these bodies
stay exact. Bodies built from support samples alone have no core and are
handled through the sampled support inequalities.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from pconcave_app.errors import ArgumentError

DEFAULT_DIRECTIONS = 720
CONTAIN_TOL = 1e-12
COLLINEAR_TOL = 1e-12
UNIT_TOL = 1e-9
_POINT_CHUNK = 4096

POLYGON = "polygon"
DISC = "disc"
SUPPORT_ONLY = "support-only"


@dataclass(frozen=True)
class DirectionGrid:
    """M equally spaced unit directions xi_j = (cos 2 pi j / M, sin 2 pi j / M)."""

    count: int = DEFAULT_DIRECTIONS

    def __post_init__(self) -> None:
        if self.count < 8 or self.count % 4 != 0:
            raise ArgumentError(f"direction count must be >= 8 and divisible by 4, got {self.count}")

    @property
    def step(self) -> float:
        return 2.0 * math.pi / self.count

    @property
    def angles(self) -> np.ndarray:
        return np.arange(self.count) * self.step

    @property
    def directions(self) -> np.ndarray:
        angles = self.angles
        return np.column_stack((np.cos(angles), np.sin(angles)))


@dataclass(frozen=True)
class Rotation:
    """Rotation of the plane about the origin by `angle` radians."""

    angle: float

    @property
    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.angle), math.sin(self.angle)
        # quarter turns map the lattice onto itself only with exact 0/1 entries
        if abs(c) < 1e-15:
            c, s = 0.0, math.copysign(1.0, s)
        elif abs(s) < 1e-15:
            c, s = math.copysign(1.0, c), 0.0
        return np.array([[c, -s], [s, c]])

    def apply(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=float) @ self.matrix.T

    def inverse(self) -> "Rotation":
        return Rotation(-self.angle)

    @staticmethod
    def equally_spaced(m: int) -> List["Rotation"]:
        return [Rotation(2.0 * math.pi * i / m) for i in range(m)]


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


class ConvexBody:
    """A planar convex body with its support function cached on a DirectionGrid.

    Use the `polygon`, `disc` and `from_support` constructors; instances are
    immutable and safe to share between threads.
    """

    def __init__(
        self,
        kind: str,
        grid: DirectionGrid,
        support_samples: np.ndarray,
        core: Optional[np.ndarray] = None,
        radius: float = 0.0,
    ) -> None:
        self.kind = kind
        self.grid = grid
        self.core = None if core is None else _frozen(np.reshape(core, (-1, 2)))
        self.radius = float(radius)
        self.support_samples = _frozen(support_samples)
        self._normals: Optional[np.ndarray] = None
        self._offsets: Optional[np.ndarray] = None
        if self.core is not None and len(self.core) >= 3:
            self._normals, self._offsets = _edge_halfplanes(self.core)
        self.outline = self.core if kind == POLYGON else _outline_from_support(self.support_samples, grid)

    @staticmethod
    def polygon(vertices: Union[Sequence[Sequence[float]], np.ndarray], grid: Optional[DirectionGrid] = None) -> "ConvexBody":
        grid = grid or DirectionGrid()
        cleaned = _clean_polygon(np.asarray(vertices, dtype=float))
        return ConvexBody(POLYGON, grid, _core_support(cleaned, 0.0, grid.directions), core=cleaned)

    @staticmethod
    def disc(center: Sequence[float], radius: float, grid: Optional[DirectionGrid] = None) -> "ConvexBody":
        if not radius > 0.0:
            raise ArgumentError(f"disc radius must be positive, got {radius}")
        grid = grid or DirectionGrid()
        core = np.asarray(center, dtype=float).reshape(1, 2)
        return ConvexBody(DISC, grid, _core_support(core, radius, grid.directions), core=core, radius=radius)

    @staticmethod
    def offset(core: np.ndarray, radius: float, grid: Optional[DirectionGrid] = None) -> "ConvexBody":
        """Support-only body core + radius*B with its exact closed form retained."""
        grid = grid or DirectionGrid()
        core = np.asarray(core, dtype=float).reshape(-1, 2)
        if len(core) < 3 and radius <= 0.0:
            raise ArgumentError("offset body needs a proper polygon core or a positive radius")
        return ConvexBody(SUPPORT_ONLY, grid, _core_support(core, radius, grid.directions), core=core, radius=radius)

    @staticmethod
    def from_support(samples: np.ndarray, grid: Optional[DirectionGrid] = None) -> "ConvexBody":
        samples = np.asarray(samples, dtype=float)
        grid = grid or DirectionGrid(len(samples))
        if samples.shape != (grid.count,):
            raise ArgumentError(f"expected {grid.count} support samples, got shape {samples.shape}")
        return ConvexBody(SUPPORT_ONLY, grid, samples)

    @property
    def has_closed_form(self) -> bool:
        return self.core is not None

    @property
    def vertices(self) -> Optional[np.ndarray]:
        return self.outline

    @property
    def center(self) -> np.ndarray:
        if self.kind != DISC:
            raise ArgumentError("only disc bodies have a center")
        return self.core[0]

    def depth(self, points: np.ndarray) -> np.ndarray:
        """Signed margin to the boundary: positive inside, zero on the boundary, negative outside."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        if self.core is None:
            return _support_depth(self.support_samples, self.grid.directions, pts)
        if self._normals is not None:
            inner = np.min(self._offsets[None, :] - pts @ self._normals.T, axis=1)
            if self.radius == 0.0:
                return inner
            result = inner + self.radius
            outside = inner < 0.0
            if np.any(outside):
                result[outside] = self.radius - _distance_to_core(self.core, pts[outside])
            return result
        return self.radius - _distance_to_core(self.core, pts)

    def bounding_box(self) -> Tuple[float, float, float, float]:
        quarter = self.grid.count // 4
        s = self.support_samples
        return (-s[2 * quarter], -s[3 * quarter], s[0], s[quarter])

    def __repr__(self) -> str:
        return f"ConvexBody(kind={self.kind!r}, area={area(self):.6g}, mean_width={mean_width(self):.6g})"


def _edge_halfplanes(core: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    edges = np.roll(core, -1, axis=0) - core
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    normals = np.column_stack((edges[:, 1], -edges[:, 0])) / lengths[:, None]
    offsets = np.einsum("ij,ij->i", normals, core)
    normals.setflags(write=False)
    offsets.setflags(write=False)
    return normals, offsets


def _core_support(core: np.ndarray, radius: float, directions: np.ndarray) -> np.ndarray:
    return np.max(core @ directions.T, axis=0) + radius


def _support_depth(samples: np.ndarray, directions: np.ndarray, pts: np.ndarray) -> np.ndarray:
    out = np.empty(len(pts))
    for start in range(0, len(pts), _POINT_CHUNK):
        chunk = pts[start : start + _POINT_CHUNK]
        out[start : start + _POINT_CHUNK] = np.min(samples[None, :] - chunk @ directions.T, axis=1)
    return out


def _distance_to_core(core: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Euclidean distance from points to the boundary/segment/point described by `core`."""
    if len(core) == 1:
        return np.hypot(pts[:, 0] - core[0, 0], pts[:, 1] - core[0, 1])
    starts = core if len(core) >= 3 else core[:1]
    ends = np.roll(core, -1, axis=0) if len(core) >= 3 else core[1:2]
    best = np.full(len(pts), np.inf)
    for a, b in zip(starts, ends):
        ab = b - a
        denom = float(ab @ ab)
        rel = pts - a
        t = np.clip(rel @ ab / denom, 0.0, 1.0) if denom > 0.0 else np.zeros(len(pts))
        closest = a + t[:, None] * ab
        best = np.minimum(best, np.hypot(pts[:, 0] - closest[:, 0], pts[:, 1] - closest[:, 1]))
    return best


def _outline_from_support(samples: np.ndarray, grid: DirectionGrid) -> np.ndarray:
    """Polygon cut out by consecutive sampled supporting lines."""
    dirs = grid.directions
    nxt = np.roll(dirs, -1, axis=0)
    h0, h1 = samples, np.roll(samples, -1)
    det = dirs[:, 0] * nxt[:, 1] - dirs[:, 1] * nxt[:, 0]
    x = (h0 * nxt[:, 1] - h1 * dirs[:, 1]) / det
    y = (dirs[:, 0] * h1 - nxt[:, 0] * h0) / det
    pts = np.column_stack((x, y))
    if _signed_area(pts) <= 0.0:
        raise ArgumentError("support samples do not describe a convex body with interior")
    return _frozen(pts)


def _signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _polygon_perimeter(vertices: np.ndarray) -> float:
    if len(vertices) == 1:
        return 0.0
    if len(vertices) == 2:
        return 2.0 * float(np.hypot(*(vertices[1] - vertices[0])))
    edges = np.roll(vertices, -1, axis=0) - vertices
    return float(np.sum(np.hypot(edges[:, 0], edges[:, 1])))


def _clean_polygon(vertices: np.ndarray) -> np.ndarray:
    """Counterclockwise vertex list with duplicate and collinear vertices removed."""
    if vertices.ndim != 2 or vertices.shape[1] != 2 or len(vertices) < 3:
        raise ArgumentError("a polygon needs at least 3 vertices given as (x, y) pairs")
    if not np.all(np.isfinite(vertices)):
        raise ArgumentError("polygon vertices must be finite")
    scale = max(1.0, float(np.max(np.abs(vertices))))
    tol = COLLINEAR_TOL * scale * scale
    if _signed_area(vertices) < 0.0:
        vertices = vertices[::-1]
    while True:
        if len(vertices) < 3:
            raise ArgumentError("degenerate polygon: fewer than 3 non-collinear vertices")
        incoming = vertices - np.roll(vertices, 1, axis=0)
        outgoing = np.roll(vertices, -1, axis=0) - vertices
        cross = incoming[:, 0] * outgoing[:, 1] - incoming[:, 1] * outgoing[:, 0]
        dot = np.einsum("ij,ij->i", incoming, outgoing)
        if np.any(cross < -tol):
            raise ArgumentError("vertex list does not define a convex polygon")
        redundant = np.flatnonzero(cross <= tol)
        if redundant.size == 0:
            break
        index = int(redundant[0])
        if dot[index] < 0.0 and np.hypot(*incoming[index]) > 0.0 and np.hypot(*outgoing[index]) > 0.0:
            raise ArgumentError("vertex list folds back on itself")
        vertices = np.delete(vertices, index, axis=0)
    if _signed_area(vertices) <= tol:
        raise ArgumentError("degenerate polygon: zero area")
    return vertices


def _minkowski_vertices(parts: Sequence[np.ndarray]) -> np.ndarray:
    """Vertices of the Minkowski sum of convex polygons (points and segments allowed).

    Edge vectors of all parts are merged in order of polar angle starting from the
    sum of the lowest vertices; edges whose angles agree within the collinear
    tolerance are fused.
    """
    start = np.zeros(2)
    edge_list = []
    for part in parts:
        part = np.asarray(part, dtype=float).reshape(-1, 2)
        lowest = np.lexsort((part[:, 0], part[:, 1]))[0]
        start = start + part[lowest]
        if len(part) >= 2:
            edge_list.append(np.roll(part, -1, axis=0) - part)
    if not edge_list:
        return start.reshape(1, 2)
    edges = np.concatenate(edge_list)
    edges = edges[np.hypot(edges[:, 0], edges[:, 1]) > 1e-15]
    if len(edges) == 0:
        return start.reshape(1, 2)
    angles = np.mod(np.arctan2(edges[:, 1], edges[:, 0]), 2.0 * math.pi)
    angles[angles > 2.0 * math.pi - COLLINEAR_TOL] = 0.0
    order = np.argsort(angles, kind="stable")
    angles, edges = angles[order], edges[order]

    merged = [edges[0].copy()]
    last_angle = angles[0]
    for angle, edge in zip(angles[1:], edges[1:]):
        if angle - last_angle <= COLLINEAR_TOL:
            merged[-1] += edge
        else:
            merged.append(edge.copy())
            last_angle = angle
    steps = np.array(merged)
    vertices = start + np.vstack((np.zeros((1, 2)), np.cumsum(steps[:-1], axis=0)))
    return vertices


def support_values(body: ConvexBody, directions: np.ndarray) -> np.ndarray:
    """Support function at many unit directions (rows of `directions`)."""
    directions = np.asarray(directions, dtype=float).reshape(-1, 2)
    if body.core is not None:
        return _core_support(body.core, body.radius, directions)
    return _interpolate_samples(body, np.arctan2(directions[:, 1], directions[:, 0]))


def _interpolate_samples(body: ConvexBody, angles: np.ndarray) -> np.ndarray:
    position = np.mod(angles, 2.0 * math.pi) / body.grid.step
    lower = np.floor(position).astype(int) % body.grid.count
    frac = position - np.floor(position)
    upper = (lower + 1) % body.grid.count
    return (1.0 - frac) * body.support_samples[lower] + frac * body.support_samples[upper]


def _samples_on(body: ConvexBody, grid: DirectionGrid) -> np.ndarray:
    if body.grid == grid:
        return np.asarray(body.support_samples)
    return support_values(body, grid.directions)


def support_eval(body: ConvexBody, xi: Sequence[float]) -> float:
    xi = np.asarray(xi, dtype=float).reshape(2)
    norm = float(np.hypot(xi[0], xi[1]))
    if abs(norm - 1.0) > UNIT_TOL:
        raise ArgumentError(f"direction must have unit norm, got |xi|={norm}")
    if body.core is not None:
        return float(np.max(body.core @ xi) + body.radius)
    index = int(round(math.atan2(xi[1], xi[0]) / body.grid.step)) % body.grid.count
    return float(body.support_samples[index])


def minkowski_combine(b0: ConvexBody, b1: ConvexBody, mu: float) -> ConvexBody:
    """(1 - mu) b0 + mu b1."""
    if not (0.0 < mu < 1.0):
        raise ArgumentError(f"mu must lie in (0, 1), got {mu}")
    grid = b0.grid
    samples = (1.0 - mu) * _samples_on(b0, grid) + mu * _samples_on(b1, grid)
    if b0.core is None or b1.core is None:
        return ConvexBody.from_support(samples, grid)
    core = _minkowski_vertices([(1.0 - mu) * b0.core, mu * b1.core])
    radius = (1.0 - mu) * b0.radius + mu * b1.radius
    if b0.kind == POLYGON and b1.kind == POLYGON:
        return ConvexBody.polygon(core, grid)
    return ConvexBody(SUPPORT_ONLY, grid, samples, core=core, radius=radius)


def scale(body: ConvexBody, factor: float) -> ConvexBody:
    if not factor > 0.0:
        raise ArgumentError(f"scale factor must be positive, got {factor}")
    if body.core is None:
        return ConvexBody.from_support(factor * body.support_samples, body.grid)
    return _rebuild(body, factor * body.core, factor * body.radius)


def translate(body: ConvexBody, shift: Sequence[float]) -> ConvexBody:
    shift = np.asarray(shift, dtype=float).reshape(2)
    if body.core is None:
        return ConvexBody.from_support(body.support_samples + body.grid.directions @ shift, body.grid)
    return _rebuild(body, body.core + shift, body.radius)


def rotate(body: ConvexBody, rotation: Rotation) -> ConvexBody:
    if body.core is None:
        return ConvexBody.from_support(_interpolate_samples(body, body.grid.angles - rotation.angle), body.grid)
    return _rebuild(body, rotation.apply(body.core), body.radius)


def _rebuild(body: ConvexBody, core: np.ndarray, radius: float) -> ConvexBody:
    if body.kind == POLYGON:
        return ConvexBody.polygon(core, body.grid)
    if body.kind == DISC:
        return ConvexBody.disc(core[0], radius, body.grid)
    return ConvexBody.offset(core, radius, body.grid)


def area(body: ConvexBody) -> float:
    """Shoelace for polygons, pi r^2 for discs, Steiner's formula for offset bodies.

    Bodies known only through samples use the quadrature (1/2) int (h^2 - h'^2).
    """
    if body.core is None:
        return area_quadrature(body)
    core_area = _signed_area(body.core) if len(body.core) >= 3 else 0.0
    r = body.radius
    return core_area + r * _polygon_perimeter(body.core) + math.pi * r * r


def area_quadrature(body: ConvexBody) -> float:
    h = np.asarray(body.support_samples)
    step = body.grid.step
    derivative = (np.roll(h, -1) - np.roll(h, 1)) / (2.0 * step)
    return 0.5 * float(np.sum(h * h - derivative * derivative)) * step


def perimeter(body: ConvexBody) -> float:
    if body.core is None:
        return math.pi * mean_width_quadrature(body)
    return _polygon_perimeter(body.core) + 2.0 * math.pi * body.radius


def mean_width(body: ConvexBody) -> float:
    """Perimeter / pi: exact for closed forms, trapezoid rule on the samples otherwise."""
    if body.core is None:
        return mean_width_quadrature(body)
    return _polygon_perimeter(body.core) / math.pi + 2.0 * body.radius


def mean_width_quadrature(body: ConvexBody) -> float:
    return 2.0 * float(np.sum(body.support_samples)) / body.grid.count


def minimal_width(body: ConvexBody) -> float:
    h = np.asarray(body.support_samples)
    return float(np.min(h + np.roll(h, -body.grid.count // 2)))


def inradius(body: ConvexBody) -> float:
    """Radius of the largest inscribed disc (Chebyshev centre LP over the bounding half-planes)."""
    if body.kind == DISC:
        return body.radius
    if body.core is not None and body._normals is None:
        return body.radius
    if body._normals is not None:
        normals, offsets = body._normals, body._offsets
    else:
        normals, offsets = body.grid.directions, np.asarray(body.support_samples)
    a_ub = np.column_stack((normals, np.ones(len(normals))))
    result = linprog(c=[0.0, 0.0, -1.0], A_ub=a_ub, b_ub=offsets, bounds=[(None, None), (None, None), (0.0, None)], method="highs")
    if not result.success:
        raise ArgumentError(f"inradius LP failed: {result.message}")
    return float(result.x[2]) + body.radius


def centroid(body: ConvexBody) -> np.ndarray:
    if body.kind == DISC:
        return np.array(body.center)
    vertices = np.asarray(body.outline)
    x, y = vertices[:, 0], vertices[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = 0.5 * float(np.sum(cross))
    cx = float(np.sum((x + xn) * cross)) / (6.0 * a)
    cy = float(np.sum((y + yn) * cross)) / (6.0 * a)
    return np.array([cx, cy])


def contains(body: ConvexBody, x: Sequence[float]) -> bool:
    return bool(contains_points(body, np.asarray(x, dtype=float).reshape(1, 2))[0])


def contains_points(body: ConvexBody, points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    shape = pts.shape[:-1]
    return (body.depth(pts.reshape(-1, 2)) >= -CONTAIN_TOL).reshape(shape)


def hausdorff_distance(b0: ConvexBody, b1: ConvexBody) -> float:
    """Sup-norm distance of the support functions on b0's direction grid."""
    grid = b0.grid
    return float(np.max(np.abs(_samples_on(b0, grid) - _samples_on(b1, grid))))


def rotation_mean(body: ConvexBody, m: int) -> ConvexBody:
    """(1/m)(rho_1 body + ... + rho_m body) with rho_i the rotation by 2 pi (i-1)/m."""
    if m < 1:
        raise ArgumentError(f"rotation mean needs m >= 1, got {m}")
    if m == 1:
        return body
    rotations = Rotation.equally_spaced(m)
    grid = body.grid
    samples = np.zeros(grid.count)
    for rotation in rotations:
        samples += support_values(body, rotation.inverse().apply(grid.directions))
    samples /= m
    if body.core is None:
        return ConvexBody.from_support(samples, grid)
    if body.kind == DISC:
        center = np.mean([rotation.apply(body.core[0]) for rotation in rotations], axis=0)
        return ConvexBody.disc(center, body.radius, grid)
    core = _minkowski_vertices([rotation.apply(body.core) / m for rotation in rotations])
    logging.debug("Rotation mean with m=%s has a %s-vertex core", m, len(core))
    return ConvexBody(SUPPORT_ONLY, grid, samples, core=core, radius=body.radius)


def equal_area_disc(body: ConvexBody) -> ConvexBody:
    """Disc of the same area centred at the centroid."""
    return ConvexBody.disc(centroid(body), math.sqrt(area(body) / math.pi), body.grid)


def mean_width_disc(body: ConvexBody, center: Sequence[float] = (0.0, 0.0)) -> ConvexBody:
    """Disc whose diameter is the mean width of the body."""
    return ConvexBody.disc(center, 0.5 * mean_width(body), body.grid)


def support_subadditivity_slack(body: ConvexBody, rng: np.random.Generator, samples: int = 500) -> float:
    """min over random X, Y of h(X) + h(Y) - h(X + Y), with h extended positively homogeneously."""
    x = rng.normal(size=(samples, 2))
    y = rng.normal(size=(samples, 2))
    return float(np.min(_homogeneous_support(body, x) + _homogeneous_support(body, y) - _homogeneous_support(body, x + y)))


def _homogeneous_support(body: ConvexBody, vectors: np.ndarray) -> np.ndarray:
    norms = np.hypot(vectors[:, 0], vectors[:, 1])
    safe = np.where(norms > 0.0, norms, 1.0)
    return norms * support_values(body, vectors / safe[:, None])


def random_convex_polygon(rng: np.random.Generator, n_points: int = 10, radius: float = 1.0, grid: Optional[DirectionGrid] = None) -> ConvexBody:
    """Convex hull of uniform points in a square, retried until it has at least 3 vertices."""
    for _ in range(100):
        points = rng.uniform(-radius, radius, size=(n_points, 2)) + rng.uniform(-radius, radius, size=2)
        hull = ConvexHull(points)
        if len(hull.vertices) >= 3:
            return ConvexBody.polygon(points[hull.vertices], grid)
    raise ArgumentError("could not draw a nondegenerate random polygon")


def square(half_side: float, grid: Optional[DirectionGrid] = None) -> ConvexBody:
    a = float(half_side)
    return ConvexBody.polygon([(-a, -a), (a, -a), (a, a), (-a, a)], grid)


def load_polygon_file(path: Union[str, Path], grid: Optional[DirectionGrid] = None) -> ConvexBody:
    """Read 'x y' vertex lines (counterclockwise, '#' comments) into a polygon body."""
    vertices = []
    for number, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise ArgumentError(f"{path}:{number}: expected 'x y', got '{stripped}'")
        try:
            vertices.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise ArgumentError(f"{path}:{number}: invalid coordinate in '{stripped}'") from exc
    return ConvexBody.polygon(vertices, grid)


def parse_body_literal(text: str, grid: Optional[DirectionGrid] = None) -> ConvexBody:
    """Build a body from 'disc cx cy r', 'square a', 'polygon x1 y1 ...', 'offset r x1 y1 ...',
    'support v0 v1 ...' or a polygon file path."""
    tokens = text.split()
    if not tokens:
        raise ArgumentError("empty body description")
    keyword, args = tokens[0], tokens[1:]
    try:
        numbers = [float(token) for token in args]
    except ValueError as exc:
        if keyword in ("disc", "square", "polygon", "offset", "support"):
            raise ArgumentError(f"invalid number in body description '{text}'") from exc
        numbers = []
    if keyword == "disc":
        if len(numbers) != 3:
            raise ArgumentError(f"disc needs 'disc cx cy r', got '{text}'")
        return ConvexBody.disc(numbers[:2], numbers[2], grid)
    if keyword == "square":
        if len(numbers) != 1:
            raise ArgumentError(f"square needs 'square a', got '{text}'")
        return square(numbers[0], grid)
    if keyword == "polygon":
        if len(numbers) < 6 or len(numbers) % 2:
            raise ArgumentError(f"polygon needs an even list of at least 6 coordinates, got '{text}'")
        return ConvexBody.polygon(np.reshape(numbers, (-1, 2)), grid)
    if keyword == "offset":
        if len(numbers) < 3 or len(numbers) % 2 == 0:
            raise ArgumentError(f"offset needs 'offset r x1 y1 ...', got '{text}'")
        return ConvexBody.offset(np.reshape(numbers[1:], (-1, 2)), numbers[0], grid)
    if keyword == "support":
        return ConvexBody.from_support(np.asarray(numbers), grid or DirectionGrid(len(numbers)))
    return load_polygon_file(text, grid)


def describe_body(body: ConvexBody) -> str:
    """Inverse of parse_body_literal, using repr for lossless floats."""

    def join(values: np.ndarray) -> str:
        return " ".join(repr(float(v)) for v in np.ravel(values))

    if body.kind == POLYGON:
        return f"polygon {join(body.core)}"
    if body.kind == DISC:
        return f"disc {join(body.center)} {body.radius!r}"
    if body.core is not None:
        return f"offset {body.radius!r} {join(body.core)}"
    return f"support {join(body.support_samples)}"
