"""Monotone finite-difference solvers for Dirichlet problems on convex bodies.

Both operators share one discretization: a directional second difference along a
unit vector e uses arms of length r*h (bilinear interpolation at the far ends),
shortened Shortley-Weller style where the arm leaves the body and the boundary
value 0 is used there. The axis frame (e = x, y) with r = 1 is the 5-point
Laplacian.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.optimize import brentq
from scipy.sparse.linalg import spsolve

from pconcave_app.convex_geom import POLYGON, ConvexBody, Rotation
from pconcave_app.errors import ArgumentError, SolverError
from pconcave_app.field import (
    BOUNDARY,
    GridFunction,
    bilinear,
    bilinear_weights,
    bisect_crossings,
    discretize,
    lq_norm,
)
from pconcave_app.scalar_means import beta_from_p, p_mean_array

POISSON = "poisson"
PUCCI_MINUS = "pucci_minus"
SOURCE_KINDS = ("constant", "radial", "affine", "sampled")
RADIAL_PROFILES = ("quadratic", "beta_cap")


@dataclass(frozen=True)
class SourceTerm:
    """Nonnegative source f(x).

    constant: f = c; radial "quadratic": f = c|x|^2; radial "beta_cap":
    f = c (1 - |x|^2/R^2)_+^(1/beta); affine: f = max(0, c + a.x); sampled:
    bilinear interpolation of a grid field.
    """

    kind: str = "constant"
    constant: float = 1.0
    profile: str = ""
    beta: float = math.inf
    radius: float = 1.0
    slope: Tuple[float, float] = (0.0, 0.0)
    samples: Optional[GridFunction] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in SOURCE_KINDS:
            raise ArgumentError(f"unknown source kind '{self.kind}'")
        if self.kind in ("constant", "radial") and self.constant < 0.0:
            raise ArgumentError(f"source must be nonnegative, got constant {self.constant}")
        if self.kind == "radial" and self.profile not in RADIAL_PROFILES:
            raise ArgumentError(f"unknown radial profile '{self.profile}'")
        if self.kind == "radial" and self.profile == "beta_cap" and not (self.beta > 0.0 and self.radius > 0.0):
            raise ArgumentError("beta_cap needs beta > 0 and R > 0")
        if self.kind == "sampled":
            if self.samples is None:
                raise ArgumentError("sampled source needs a grid field")
            if np.any(self.samples.values < 0.0):
                raise ArgumentError("sampled source has negative values")

    @staticmethod
    def of_constant(c: float) -> "SourceTerm":
        return SourceTerm(kind="constant", constant=float(c))

    @staticmethod
    def radial(profile: str, scale: float = 1.0, beta: float = math.inf, radius: float = 1.0) -> "SourceTerm":
        return SourceTerm(kind="radial", constant=float(scale), profile=profile, beta=float(beta), radius=float(radius))

    @staticmethod
    def affine(c: float, a1: float, a2: float) -> "SourceTerm":
        return SourceTerm(kind="affine", constant=float(c), slope=(float(a1), float(a2)))

    @staticmethod
    def sampled(gf: GridFunction) -> "SourceTerm":
        return SourceTerm(kind="sampled", samples=gf)

    @staticmethod
    def parse(text: str) -> "SourceTerm":
        """'constant c', 'radial quadratic [c]', 'radial beta_cap beta R [c]', 'affine c a1 a2'."""
        tokens = text.split()
        try:
            if tokens[0] == "constant" and len(tokens) == 2:
                return SourceTerm.of_constant(float(tokens[1]))
            if tokens[0] == "affine" and len(tokens) == 4:
                return SourceTerm.affine(*(float(t) for t in tokens[1:]))
            if tokens[0] == "radial" and len(tokens) >= 2:
                if tokens[1] == "quadratic" and len(tokens) in (2, 3):
                    return SourceTerm.radial("quadratic", float(tokens[2]) if len(tokens) == 3 else 1.0)
                if tokens[1] == "beta_cap" and len(tokens) in (4, 5):
                    scale = float(tokens[4]) if len(tokens) == 5 else 1.0
                    return SourceTerm.radial("beta_cap", scale, beta=float(tokens[2]), radius=float(tokens[3]))
        except (IndexError, ValueError) as exc:
            raise ArgumentError(f"invalid source description '{text}'") from exc
        raise ArgumentError(f"invalid source description '{text}'")

    def describe(self) -> str:
        if self.kind == "constant":
            return f"constant {self.constant!r}"
        if self.kind == "affine":
            return f"affine {self.constant!r} {self.slope[0]!r} {self.slope[1]!r}"
        if self.kind == "radial" and self.profile == "quadratic":
            return f"radial quadratic {self.constant!r}"
        if self.kind == "radial":
            return f"radial beta_cap {self.beta!r} {self.radius!r} {self.constant!r}"
        return "sampled"

    @property
    def rotation_invariant(self) -> bool:
        return self.kind in ("constant", "radial")

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        shape = pts.shape[:-1]
        pts = pts.reshape(-1, 2)
        if self.kind == "constant":
            out = np.full(len(pts), self.constant)
        elif self.kind == "affine":
            out = np.maximum(0.0, self.constant + pts @ np.asarray(self.slope))
        elif self.kind == "radial":
            r2 = np.einsum("ij,ij->i", pts, pts)
            if self.profile == "quadratic":
                out = self.constant * r2
            else:
                base = np.maximum(0.0, 1.0 - r2 / self.radius ** 2)
                out = self.constant * (np.ones_like(base) * (base > 0.0) if self.beta == math.inf else base ** (1.0 / self.beta))
        else:
            out = np.maximum(0.0, bilinear(self.samples, pts))
        return out.reshape(shape)


@dataclass(frozen=True)
class OperatorSpec:
    """Poisson (Laplacian + f) or Pucci M^-_{lam,Lam} + f with K orthogonal frames."""

    kind: str = POISSON
    lam: float = 1.0
    Lam: float = 1.0
    source: SourceTerm = field(default_factory=SourceTerm)
    directions: int = 8

    def __post_init__(self) -> None:
        if self.kind not in (POISSON, PUCCI_MINUS):
            raise ArgumentError(f"unknown operator kind '{self.kind}'")
        if not (0.0 < self.lam <= self.Lam):
            raise ArgumentError(f"need 0 < lambda <= Lambda, got {self.lam}, {self.Lam}")
        if self.kind == PUCCI_MINUS and self.directions < 2:
            raise ArgumentError(f"Pucci scheme needs at least 2 frames, got {self.directions}")

    def with_source(self, source: SourceTerm) -> "OperatorSpec":
        return OperatorSpec(self.kind, self.lam, self.Lam, source, self.directions)


def default_stencil_radius(h: float) -> float:
    """Arm length, in lattice units, of the rotated Pucci frames: sqrt(1/h) but never below 2."""
    return max(2.0, math.sqrt(1.0 / h))


@dataclass(frozen=True)
class SolveParams:
    h: float
    tol: float = 1e-8
    max_iters: int = 20000
    pseudo_dt: Optional[float] = None
    relaxation: float = 1.7
    dt_safety: float = 0.9
    pucci_method: str = "howard"
    stencil_radius: Optional[float] = None
    check_every: int = 10

    def __post_init__(self) -> None:
        if not self.h > 0.0:
            raise ArgumentError(f"h must be positive, got {self.h}")
        if not self.tol > 0.0:
            raise ArgumentError(f"tol must be positive, got {self.tol}")
        if self.max_iters <= 0:
            raise ArgumentError(f"max_iters must be positive, got {self.max_iters}")
        if not (0.0 < self.relaxation < 2.0):
            raise ArgumentError(f"relaxation must lie in (0, 2), got {self.relaxation}")
        if not (0.0 < self.dt_safety <= 1.0):
            raise ArgumentError(f"dt_safety must lie in (0, 1], got {self.dt_safety}")
        if self.pucci_method not in ("howard", "march"):
            raise ArgumentError(f"unknown pucci_method '{self.pucci_method}'")
        if self.stencil_radius is not None and self.stencil_radius < 1.0:
            raise ArgumentError(f"stencil_radius must be at least 1, got {self.stencil_radius}")

    @property
    def arm_radius(self) -> float:
        """Pucci arm length in lattice units; grows like h^(-1/2) unless fixed."""
        if self.stencil_radius is not None:
            return self.stencil_radius
        return default_stencil_radius(self.h)


@dataclass(frozen=True)
class _Stencils:
    unknowns: np.ndarray
    points: np.ndarray
    trace: sparse.csr_matrix
    frames: List[Tuple[sparse.csr_matrix, sparse.csr_matrix]]


def _unknown_numbers(gf: GridFunction) -> np.ndarray:
    numbers = np.full(gf.free.shape, -1, dtype=int)
    numbers[gf.free] = np.arange(int(np.count_nonzero(gf.free)))
    return numbers


def _directional_operator(gf: GridFunction, numbers: np.ndarray, points: np.ndarray, direction: np.ndarray, radius: float) -> sparse.csr_matrix:
    """Second difference along `direction` at every unknown, as a sparse matrix on the unknowns."""
    n = len(points)
    reach = radius * gf.h
    threshold = 1e-10 * gf.h
    rows, cols, vals = [np.arange(n)], [np.arange(n)], []
    arms, ends, inside_flags = [], [], []
    for sign in (1.0, -1.0):
        step = sign * reach * direction
        end = points + step
        inside = gf.body.depth(end) > threshold
        arm = np.ones(n)
        if np.any(~inside):
            arm[~inside] = bisect_crossings(gf.body, points[~inside], step)
        arms.append(arm * reach)
        ends.append(end)
        inside_flags.append(inside)
    plus, minus = arms
    vals.append(-2.0 / (plus * minus))
    for arm, other, end, inside in ((plus, minus, ends[0], inside_flags[0]), (minus, plus, ends[1], inside_flags[1])):
        coefficient = 2.0 / (arm * (arm + other))
        rows_in = np.flatnonzero(inside)
        i, j, weights, _ = bilinear_weights(gf, end[rows_in])
        for corner, (di, dj) in enumerate(((0, 0), (1, 0), (0, 1), (1, 1))):
            target = numbers[i + di, j + dj]
            keep = (target >= 0) & (weights[:, corner] > 0.0)
            rows.append(rows_in[keep])
            cols.append(target[keep])
            vals.append(coefficient[rows_in[keep]] * weights[keep, corner])
    matrix = sparse.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    return matrix.tocsr()


def _build_stencils(gf: GridFunction, frames: int, radius: float) -> _Stencils:
    numbers = _unknown_numbers(gf)
    points = gf.node_points()[gf.free]
    built = []
    for k in range(frames):
        theta = math.pi * k / (2 * frames)
        along = np.array([math.cos(theta), math.sin(theta)])
        across = np.array([-math.sin(theta), math.cos(theta)])
        frame_radius = 1.0 if k == 0 else radius
        built.append(
            (
                _directional_operator(gf, numbers, points, along, frame_radius),
                _directional_operator(gf, numbers, points, across, frame_radius),
            )
        )
    trace = (built[0][0] + built[0][1]).tocsr()
    return _Stencils(unknowns=numbers, points=points, trace=trace, frames=built)


def _source_values(spec: OperatorSpec, points: np.ndarray) -> np.ndarray:
    values = spec.source.evaluate(points)
    if np.any(values < 0.0):
        raise ArgumentError("source term is negative on the body")
    return values


def _to_field(gf: GridFunction, unknowns: np.ndarray, **meta: object) -> GridFunction:
    values = np.zeros(gf.free.shape)
    values[gf.free] = np.maximum(unknowns, 0.0)
    return gf.with_values(values, **meta)


def laplacian_scheme_value(u: GridFunction) -> np.ndarray:
    """5-point (Shortley-Weller) Laplacian of u at the unknowns, NaN elsewhere."""
    stencils = _build_stencils(u, 1, 1.0)
    out = np.full(u.free.shape, np.nan)
    out[u.free] = stencils.trace @ u.values[u.free]
    return out


def _pucci_apply(stencils: _Stencils, u: np.ndarray, lam: float, Lam: float) -> Tuple[np.ndarray, np.ndarray, List[Tuple[np.ndarray, np.ndarray]]]:
    diffs = [(first @ u, second @ u) for first, second in stencils.frames]
    negative = np.stack([np.minimum(d1, 0.0) + np.minimum(d2, 0.0) for d1, d2 in diffs])
    choice = np.argmin(negative, axis=0)
    value = lam * (stencils.trace @ u) + (Lam - lam) * negative[choice, np.arange(len(u))]
    return value, choice, diffs


def pucci_scheme_value(u: GridFunction, spec: OperatorSpec, stencil_radius: Optional[float] = None) -> np.ndarray:
    """Discrete M^-_h(u) at the unknowns (NaN elsewhere), without the source."""
    radius = stencil_radius if stencil_radius is not None else default_stencil_radius(u.h)
    stencils = _build_stencils(u, spec.directions, radius)
    value, _, _ = _pucci_apply(stencils, u.values[u.free], spec.lam, spec.Lam)
    out = np.full(u.free.shape, np.nan)
    out[u.free] = value
    return out


def solve_poisson(body: ConvexBody, f: SourceTerm, params: SolveParams) -> GridFunction:
    """Red-black successive over-relaxation for Laplacian u + f = 0, u = 0 on the boundary."""
    gf = discretize(body, params.h)
    stencils = _build_stencils(gf, 1, 1.0)
    rhs = _source_values(OperatorSpec(source=f), stencils.points)
    threshold = params.tol * max(1.0, float(np.max(rhs, initial=0.0)))
    matrix = stencils.trace
    diag = matrix.diagonal()
    ii, jj = np.nonzero(gf.free)
    red = (ii + jj) % 2 == 0
    colours = (red, ~red)
    omega = params.relaxation

    u = np.zeros(len(rhs))
    residual = _scaled_residual(rhs, diag, params.h)
    iterations = 0
    while residual > threshold:
        if iterations >= params.max_iters:
            raise SolverError("Poisson sweeps did not converge", residual, iterations)
        for colour in colours:
            r = matrix @ u + rhs
            u[colour] -= omega * r[colour] / diag[colour]
        iterations += 1
        if iterations % params.check_every == 0 or iterations >= params.max_iters:
            residual = _scaled_residual(matrix @ u + rhs, diag, params.h)
            logging.debug("Poisson sweep %s: residual %.3e", iterations, residual)
    logging.info("Poisson solve on %s unknowns: %s sweeps, residual %.2e", len(u), iterations, residual)
    return _to_field(gf, u, operator=POISSON, residual=residual, iterations=iterations, source=f.describe())


def solve_pucci(body: ConvexBody, spec: OperatorSpec, params: SolveParams) -> GridFunction:
    """Wide-stencil monotone scheme for M^-(D^2 u) + f = 0.

    Policy iteration supplies the starting guess when pucci_method is "howard";
    explicit pseudo-time steps u += dt (M^-_h u + f) finish the solve and are the
    whole solve for "march".
    """
    if spec.kind != PUCCI_MINUS:
        raise ArgumentError(f"solve_pucci needs a pucci_minus operator, got {spec.kind}")
    stability = params.h * params.h / (4.0 * spec.Lam)
    pseudo_dt = params.pseudo_dt if params.pseudo_dt is not None else params.dt_safety * stability
    if not (0.0 < pseudo_dt <= stability):
        raise ArgumentError(f"pseudo_dt={pseudo_dt} violates the monotone bound h^2/(4 Lambda)={stability}")

    gf = discretize(body, params.h)
    stencils = _build_stencils(gf, spec.directions, params.arm_radius)
    rhs = _source_values(spec, stencils.points)
    threshold = params.tol * max(1.0, float(np.max(rhs, initial=0.0)))
    lam, Lam = spec.lam, spec.Lam

    u = np.zeros(len(rhs))
    policy_steps = 0
    if params.pucci_method == "howard" and len(u):
        u, policy_steps = _policy_iteration(stencils, rhs, lam, Lam)

    local_diag = lam * np.abs(stencils.trace.diagonal()) + (Lam - lam) * np.max(
        np.stack([np.abs(d1.diagonal()) + np.abs(d2.diagonal()) for d1, d2 in stencils.frames]), axis=0
    )
    dt = np.minimum(pseudo_dt, params.dt_safety / np.maximum(local_diag, 1e-300))

    iterations = 0
    value, _, _ = _pucci_apply(stencils, u, lam, Lam)
    update = value + rhs
    residual = _scaled_residual(update, local_diag, params.h)
    while residual > threshold:
        if iterations >= params.max_iters:
            raise SolverError("Pucci pseudo-time marching did not converge", residual, iterations)
        u = u + dt * update
        value, _, _ = _pucci_apply(stencils, u, lam, Lam)
        update = value + rhs
        residual = _scaled_residual(update, local_diag, params.h)
        iterations += 1
        if iterations % 1000 == 0:
            logging.debug("Pucci step %s: residual %.3e", iterations, residual)
    logging.info(
        "Pucci solve on %s unknowns: %s policy steps, %s marching steps, residual %.2e",
        len(u),
        policy_steps,
        iterations,
        residual,
    )
    return _to_field(
        gf,
        u,
        operator=PUCCI_MINUS,
        residual=residual,
        iterations=iterations + policy_steps,
        source=spec.source.describe(),
        stencil_radius=params.arm_radius,
    )


def _policy_iteration(stencils: _Stencils, rhs: np.ndarray, lam: float, Lam: float, max_policies: int = 50) -> Tuple[np.ndarray, int]:
    """Howard's algorithm: freeze the minimizing frame and the active signs, solve the linear system, repeat."""
    u = np.zeros(len(rhs))
    previous: Optional[bytes] = None
    for step in range(max_policies):
        _, choice, diffs = _pucci_apply(stencils, u, lam, Lam)
        matrix = lam * stencils.trace
        active = np.zeros((len(u), 2), dtype=bool)
        for k, ((first, second), (d1, d2)) in enumerate(zip(stencils.frames, diffs)):
            selected = choice == k
            active[:, 0] |= selected & (d1 < 0.0)
            active[:, 1] |= selected & (d2 < 0.0)
            matrix = matrix + (Lam - lam) * (
                sparse.diags((selected & (d1 < 0.0)).astype(float)) @ first
                + sparse.diags((selected & (d2 < 0.0)).astype(float)) @ second
            )
        policy = choice.tobytes() + active.tobytes()
        if policy == previous:
            return u, step
        previous = policy
        u = spsolve(sparse.csc_matrix(matrix), -rhs)
    return u, max_policies


def _scaled_residual(residual: np.ndarray, diag: np.ndarray, h: float) -> float:
    """Max residual, with rows whose stencil is stiffer than the interior 5-point one scaled down to it."""
    if residual.size == 0:
        return 0.0
    scale = np.minimum(1.0, (4.0 / (h * h)) / np.maximum(np.abs(diag), 1e-300))
    return float(np.max(np.abs(residual) * scale))


def solve(body: ConvexBody, spec: OperatorSpec, params: SolveParams) -> GridFunction:
    if spec.kind == POISSON:
        return solve_poisson(body, spec.source, params)
    return solve_pucci(body, spec, params)


def torsional_rigidity(gf: GridFunction) -> float:
    """Integral of the torsion solution over the body."""
    return lq_norm(gf, 1.0)


@dataclass(frozen=True)
class HopfReport:
    min_slope: float
    mean_slope: float
    tested: int
    excluded: int
    passed: bool


def hopf_boundary_check(gf: GridFunction, exclusion: float = 1.0) -> HopfReport:
    """Inward slope u(x)/dist(x, boundary) at boundary-adjacent unknowns.

    For polygons, nodes whose nearest boundary point lies within exclusion*h of a
    vertex are skipped.
    """
    selected = (gf.mask == BOUNDARY) & gf.free
    points = gf.node_points()[selected]
    values = gf.values[selected]
    distance = gf.body.depth(points)
    keep = np.ones(len(points), dtype=bool)
    body = gf.body
    if body.kind == POLYGON and len(points):
        normals, offsets = body._normals, body._offsets
        margins = offsets[None, :] - points @ normals.T
        nearest = np.argmin(margins, axis=1)
        feet = points + margins[np.arange(len(points)), nearest][:, None] * normals[nearest]
        to_vertex = np.min(np.hypot(feet[:, None, 0] - body.core[None, :, 0], feet[:, None, 1] - body.core[None, :, 1]), axis=1)
        keep = to_vertex > exclusion * gf.h
    slopes = values[keep] / distance[keep]
    if slopes.size == 0:
        return HopfReport(min_slope=0.0, mean_slope=0.0, tested=0, excluded=int(np.count_nonzero(~keep)), passed=False)
    min_slope = float(np.min(slopes))
    return HopfReport(
        min_slope=min_slope,
        mean_slope=float(np.mean(slopes)),
        tested=int(slopes.size),
        excluded=int(np.count_nonzero(~keep)),
        passed=min_slope > 0.0,
    )


def pucci_minus_value(matrix: np.ndarray, lam: float, Lam: float) -> float:
    eig = np.linalg.eigvalsh(np.asarray(matrix, dtype=float))
    return float(lam * np.sum(eig[eig > 0.0]) + Lam * np.sum(eig[eig < 0.0]))


def pucci_plus_value(matrix: np.ndarray, lam: float, Lam: float) -> float:
    eig = np.linalg.eigvalsh(np.asarray(matrix, dtype=float))
    return float(Lam * np.sum(eig[eig > 0.0]) + lam * np.sum(eig[eig < 0.0]))


def operator_value(spec: OperatorSpec, x: Sequence[float], matrix: np.ndarray) -> float:
    """F(x, u, Du, A) for the implemented operators; the source depends on x only."""
    source = float(spec.source.evaluate(np.asarray(x, dtype=float).reshape(1, 2))[0])
    if spec.kind == POISSON:
        return float(np.trace(matrix)) + source
    return pucci_minus_value(matrix, spec.lam, spec.Lam) + source


def transformed_operator_value(spec: OperatorSpec, p: float, theta: Sequence[float], x: Sequence[float], t: float, matrix: np.ndarray) -> float:
    """G_p(x, t, A) = F(x, t^(1/p), t^(1/p - 1) theta, t^(1/p - 3) A), and F(x, e^t, e^t theta, e^t A) at p = 0."""
    if p < 0.0:
        raise ArgumentError(f"p must be nonnegative, got {p}")
    matrix = np.asarray(matrix, dtype=float)
    if p == 0.0:
        return operator_value(spec, x, math.exp(t) * matrix)
    if not t > 0.0:
        raise ArgumentError(f"t must be positive for p > 0, got {t}")
    return operator_value(spec, x, t ** (1.0 / p - 3.0) * matrix)


def _sample_in_body(body: ConvexBody, count: int, rng: np.random.Generator) -> np.ndarray:
    xmin, ymin, xmax, ymax = body.bounding_box()
    accepted: List[np.ndarray] = []
    total = 0
    while total < count:
        candidates = rng.uniform((xmin, ymin), (xmax, ymax), size=(2 * count, 2))
        inside = candidates[body.depth(candidates) >= 0.0]
        accepted.append(inside)
        total += len(inside)
    return np.concatenate(accepted)[:count]


def _sample_levels(p: float, count: int, rng: np.random.Generator) -> np.ndarray:
    if p == 0.0:
        return rng.uniform(-2.0, 2.0, size=count)
    return rng.uniform(1e-3, 2.0, size=count)


def _g_transform(source: SourceTerm, p: float, points: np.ndarray, t: np.ndarray) -> np.ndarray:
    values = source.evaluate(points)
    if p == 0.0:
        return np.exp(-t) * values
    return t ** (3.0 - 1.0 / p) * values


@dataclass(frozen=True)
class SourceCheckReport:
    passed: bool
    min_slack: float
    samples: int
    witness: Optional[Dict[str, float]]
    midpoint_passed: Optional[bool] = None
    midpoint_min_slack: Optional[float] = None
    beta: Optional[float] = None


def check_source_condition(
    f0: SourceTerm,
    f1: SourceTerm,
    fmu: SourceTerm,
    mu: float,
    p: float,
    body0: ConvexBody,
    body1: ConvexBody,
    samples: int = 2000,
    seed: int = 0,
) -> SourceCheckReport:
    """Sampled test of g_mu(x_mix, t_mix) >= (1-mu) g_0(x0, t0) + mu g_1(x1, t1).

    g_p(x, t) = t^(3 - 1/p) f(x) for p > 0 and e^(-t) f(x) for p = 0. The sources
    depend on x only, so the gradient slot of g plays no role. When the three
    sources coincide, f is also tested for beta-concavity at midpoints with
    beta = p / (1 - 2p).
    """
    if not (0.0 < mu < 1.0):
        raise ArgumentError(f"mu must lie in (0, 1), got {mu}")
    if p < 0.0:
        raise ArgumentError(f"p must be nonnegative, got {p}")
    rng = np.random.default_rng(seed)
    x0 = _sample_in_body(body0, samples, rng)
    x1 = _sample_in_body(body1, samples, rng)
    t0 = _sample_levels(p, samples, rng)
    t1 = _sample_levels(p, samples, rng)
    lhs = _g_transform(fmu, p, (1.0 - mu) * x0 + mu * x1, (1.0 - mu) * t0 + mu * t1)
    rhs = (1.0 - mu) * _g_transform(f0, p, x0, t0) + mu * _g_transform(f1, p, x1, t1)
    slack = lhs - rhs
    tolerance = 1e-9 * np.maximum(1.0, np.abs(rhs))
    worst = int(np.argmin(slack + tolerance))
    passed = bool(np.all(slack >= -tolerance))
    witness = None
    if not passed:
        witness = {
            "x0": float(x0[worst, 0]),
            "y0": float(x0[worst, 1]),
            "x1": float(x1[worst, 0]),
            "y1": float(x1[worst, 1]),
            "t0": float(t0[worst]),
            "t1": float(t1[worst]),
            "lhs": float(lhs[worst]),
            "rhs": float(rhs[worst]),
        }

    midpoint_passed = midpoint_slack = beta = None
    if f0 == f1 == fmu and 0.0 < p <= 0.5:
        beta = beta_from_p(p)
        a = f0.evaluate(x0)
        b = f0.evaluate(x1)
        middle = f0.evaluate(0.5 * (x0 + x1))
        mid_slack = middle - p_mean_array(a, b, 0.5, beta)
        midpoint_slack = float(np.min(mid_slack))
        midpoint_passed = bool(np.all(mid_slack >= -1e-9 * np.maximum(1.0, np.abs(middle))))
        passed = passed and midpoint_passed
    return SourceCheckReport(
        passed=passed,
        min_slack=float(np.min(slack)),
        samples=samples,
        witness=witness,
        midpoint_passed=midpoint_passed,
        midpoint_min_slack=midpoint_slack,
        beta=beta,
    )


@dataclass(frozen=True)
class WeakAssumptionReport:
    passed: bool
    min_slack: float
    samples: int
    witness: Optional[Dict[str, float]]


def _random_symmetric(rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(2, 2))
    return 0.5 * (a + a.T)


def _zero_set_point(spec: OperatorSpec, p: float, x: np.ndarray, t: float, base: np.ndarray) -> np.ndarray:
    """base + c I on the zero set of G_p(x, t, .); G is increasing in c by ellipticity."""
    identity = np.eye(2)

    def g(c: float) -> float:
        return transformed_operator_value(spec, p, (0.0, 0.0), x, t, base + c * identity)

    lo, hi = -1.0, 1.0
    while g(lo) > 0.0:
        lo *= 2.0
    while g(hi) < 0.0:
        hi *= 2.0
    return base + brentq(g, lo, hi, xtol=1e-14) * identity


def check_weak_assumption(
    spec0: OperatorSpec,
    spec1: OperatorSpec,
    spec_mu: OperatorSpec,
    mu: float,
    p: float,
    body0: ConvexBody,
    body1: ConvexBody,
    samples: int = 200,
    seed: int = 0,
) -> WeakAssumptionReport:
    """Sampled weak assumption: G_mu >= 0 at mu-combinations of zero-set points of G_0 and G_1."""
    rng = np.random.default_rng(seed)
    x0 = _sample_in_body(body0, samples, rng)
    x1 = _sample_in_body(body1, samples, rng)
    t0 = _sample_levels(p, samples, rng)
    t1 = _sample_levels(p, samples, rng)
    worst_slack = math.inf
    witness = None
    for k in range(samples):
        a0 = _zero_set_point(spec0, p, x0[k], float(t0[k]), _random_symmetric(rng))
        a1 = _zero_set_point(spec1, p, x1[k], float(t1[k]), _random_symmetric(rng))
        x_mix = (1.0 - mu) * x0[k] + mu * x1[k]
        t_mix = (1.0 - mu) * t0[k] + mu * t1[k]
        value = transformed_operator_value(spec_mu, p, (0.0, 0.0), x_mix, t_mix, (1.0 - mu) * a0 + mu * a1)
        scale = 1.0 + float(np.max(np.abs(a0))) + float(np.max(np.abs(a1)))
        normalized = value / scale
        if normalized < worst_slack:
            worst_slack = normalized
            witness = {"x": float(x_mix[0]), "y": float(x_mix[1]), "t": float(t_mix), "G": float(value)}
    passed = worst_slack >= -1e-9
    return WeakAssumptionReport(passed=passed, min_slack=float(worst_slack), samples=samples, witness=None if passed else witness)


def check_sharp_convexity(spec: OperatorSpec, p: float, body: ConvexBody, samples: int = 200, seed: int = 0) -> WeakAssumptionReport:
    """Sampled convexity of {(x, t, A): G_p(x, t, A) >= 0} for a single operator."""
    rng = np.random.default_rng(seed)
    x = _sample_in_body(body, 2 * samples, rng)
    t = _sample_levels(p, 2 * samples, rng)
    weights = rng.uniform(0.0, 1.0, size=samples)
    worst = math.inf
    witness = None
    for k in range(samples):
        inside = []
        for index in (2 * k, 2 * k + 1):
            on_zero = _zero_set_point(spec, p, x[index], float(t[index]), _random_symmetric(rng))
            inside.append(on_zero + rng.uniform(0.0, 1.0) * np.eye(2))
        w = weights[k]
        x_mix = (1.0 - w) * x[2 * k] + w * x[2 * k + 1]
        t_mix = (1.0 - w) * t[2 * k] + w * t[2 * k + 1]
        value = transformed_operator_value(spec, p, (0.0, 0.0), x_mix, t_mix, (1.0 - w) * inside[0] + w * inside[1])
        normalized = value / (1.0 + float(np.max(np.abs(inside[0]))) + float(np.max(np.abs(inside[1]))))
        if normalized < worst:
            worst = normalized
            witness = {"x": float(x_mix[0]), "y": float(x_mix[1]), "t": float(t_mix), "G": float(value)}
    passed = worst >= -1e-9
    return WeakAssumptionReport(passed=passed, min_slack=float(worst), samples=samples, witness=None if passed else witness)


def check_rotational_invariance(spec: OperatorSpec, samples: int = 200, seed: int = 0, radius: float = 1.0) -> float:
    """max |F(rho x, rho A rho^T) - F(x, A)| over random rotations, points and matrices."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        rotation = Rotation(float(rng.uniform(0.0, 2.0 * math.pi)))
        x = rng.uniform(-radius, radius, size=2)
        a = _random_symmetric(rng)
        r = rotation.matrix
        rotated = operator_value(spec, rotation.apply(x), r @ a @ r.T)
        worst = max(worst, abs(rotated - operator_value(spec, x, a)))
    return worst