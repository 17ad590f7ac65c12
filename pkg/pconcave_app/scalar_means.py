"""Weighted power means M_p and the exponent arithmetic built on them."""

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from pconcave_app.errors import ArgumentError
from pconcave_app.field import EXTERIOR, GridFunction

WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class PMeanSpec:
    """Exponent p and weights mu_i > 0 summing to one."""

    p: float
    weights: Tuple[float, ...]

    def __post_init__(self) -> None:
        if math.isnan(self.p):
            raise ArgumentError("p must not be NaN")
        if len(self.weights) < 1:
            raise ArgumentError("at least one weight is required")
        if any(not (w > 0.0) for w in self.weights):
            raise ArgumentError(f"weights must be positive, got {self.weights}")
        if abs(sum(self.weights) - 1.0) > WEIGHT_TOL:
            raise ArgumentError(f"weights must sum to 1, got {sum(self.weights)!r}")

    @staticmethod
    def binary(mu: float, p: float) -> "PMeanSpec":
        if not (0.0 < mu < 1.0):
            raise ArgumentError(f"mu must lie in (0, 1), got {mu}")
        return PMeanSpec(p=p, weights=(1.0 - mu, mu))

    @staticmethod
    def equal(m: int, p: float) -> "PMeanSpec":
        if m < 1:
            raise ArgumentError(f"m must be positive, got {m}")
        weights = (1.0 / m,) * m
        # 1/m summed m times can miss 1 by a few ulps; fold the error into the last weight
        weights = weights[:-1] + (1.0 - sum(weights[:-1]),)
        return PMeanSpec(p=p, weights=weights)

    @property
    def m(self) -> int:
        return len(self.weights)


def p_mean(a: float, b: float, mu: float, p: float) -> float:
    """mu-weighted p-mean of a and b, including the max/min/geometric branches and the zero rule."""
    if a < 0.0 or b < 0.0:
        raise ArgumentError(f"p_mean needs nonnegative arguments, got a={a}, b={b}")
    if not (0.0 <= mu <= 1.0):
        raise ArgumentError(f"mu must lie in [0, 1], got {mu}")
    if p == math.inf:
        return max(a, b)
    if p == -math.inf:
        return min(a, b)
    if p == 0.0:
        if a == 0.0 or b == 0.0:
            return 0.0
        return a ** (1.0 - mu) * b ** mu
    if p < 0.0 and a * b == 0.0:
        return 0.0
    return ((1.0 - mu) * a ** p + mu * b ** p) ** (1.0 / p)


def p_mean_array(a: np.ndarray, b: np.ndarray, mu: float, p: float) -> np.ndarray:
    """Vectorised p_mean; a and b broadcast against each other. Arguments must be nonnegative."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a, b = np.broadcast_arrays(a, b)
    if p == math.inf:
        return np.maximum(a, b)
    if p == -math.inf:
        return np.minimum(a, b)
    out = np.zeros(a.shape, dtype=float)
    positive = (a > 0.0) & (b > 0.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        if p == 0.0:
            out[positive] = a[positive] ** (1.0 - mu) * b[positive] ** mu
        elif p < 0.0:
            out[positive] = ((1.0 - mu) * a[positive] ** p + mu * b[positive] ** p) ** (1.0 / p)
        else:
            out = ((1.0 - mu) * a ** p + mu * b ** p) ** (1.0 / p)
    return out


def p_mean_multi(values: Sequence[float], spec: PMeanSpec) -> float:
    """m-ary weighted p-mean; m = 2 with weights (1-mu, mu) reproduces p_mean bit for bit."""
    if len(values) != len(spec.weights):
        raise ArgumentError(f"got {len(values)} values for {len(spec.weights)} weights")
    if any(v < 0.0 for v in values):
        raise ArgumentError(f"p_mean_multi needs nonnegative values, got {list(values)}")
    p = spec.p
    if p == math.inf:
        return max(values)
    if p == -math.inf:
        return min(values)
    if any(v == 0.0 for v in values) and p <= 0.0:
        return 0.0
    if p == 0.0:
        product = 1.0
        for value, weight in zip(values, spec.weights):
            product *= value ** weight
        return product
    total = 0.0
    for value, weight in zip(values, spec.weights):
        total += weight * value ** p
    return total ** (1.0 / p)


def corollary_exponent(p: float, r: float, n: int = 2) -> float:
    """Exponent q = pr/(np + r) of the L^r comparison; q = p when r is infinite."""
    if p < 0.0:
        raise ArgumentError(f"p must be nonnegative, got {p}")
    if not r > 0.0:
        raise ArgumentError(f"r must be positive, got {r}")
    if n < 1:
        raise ArgumentError(f"dimension must be positive, got {n}")
    if r == math.inf:
        return p
    if p == 0.0:
        return 0.0
    return p * r / (n * p + r)


def bbl_exponent(s: float, n: int = 2) -> float:
    """Borell-Brascamp-Lieb exponent: 1/n at s = inf, -inf at s = -1/n, s/(ns + 1) otherwise."""
    if n < 1:
        raise ArgumentError(f"dimension must be positive, got {n}")
    if s < -1.0 / n:
        raise ArgumentError(f"s must be at least -1/n = {-1.0 / n}, got {s}")
    if s == math.inf:
        return 1.0 / n
    if s == -1.0 / n:
        return -math.inf
    return s / (n * s + 1.0)


def p_from_beta(beta: float) -> float:
    if not beta >= 1.0:
        raise ArgumentError(f"beta must be at least 1, got {beta}")
    if beta == math.inf:
        return 0.5
    return beta / (1.0 + 2.0 * beta)


def beta_from_p(p: float) -> float:
    """Inverse of p_from_beta on [1/3, 1/2]; values of p in (0, 1/3) give beta < 1."""
    if not (0.0 < p <= 0.5):
        raise ArgumentError(f"p must lie in (0, 1/2], got {p}")
    if p == 0.5:
        return math.inf
    return p / (1.0 - 2.0 * p)


def laplacian_corollary_exponent(beta: float, r: float, n: int = 2) -> float:
    """q = beta r / (n beta + r (1 + 2 beta)), the L^r exponent for a beta-concave Laplacian source."""
    return corollary_exponent(p_from_beta(beta), r, n)


@dataclass(frozen=True)
class ConcavityResult:
    passed: bool
    min_slack: float
    pairs: int
    witness: Optional[Tuple[Tuple[float, float], Tuple[float, float]]] = None

    def __bool__(self) -> bool:
        return self.passed


def is_p_concave(samples: GridFunction, p: float, slack: float = 0.0, max_offset: Optional[int] = None) -> ConcavityResult:
    """Midpoint test v((x+y)/2) >= M_p(v(x), v(y); 1/2) - tol over node pairs whose midpoint is a node.

    Pairs are x = n - d, y = n + d for non-exterior nodes n and lattice offsets d;
    tol = 1e-9 + slack.
    """
    values = samples.values
    inside = samples.mask != EXTERIOR
    nx, ny = values.shape
    reach = max(nx, ny) if max_offset is None else max_offset
    tol = 1e-9 + slack
    worst = math.inf
    witness = None
    pairs = 0
    for di in range(0, min(reach, nx // 2) + 1):
        for dj in range(-min(reach, ny // 2), min(reach, ny // 2) + 1):
            if di == 0 and dj <= 0:
                continue
            a = abs(dj)
            centre = (slice(di, nx - di), slice(a, ny - a))
            lo = (slice(0, nx - 2 * di), slice(a - dj, ny - a - dj))
            hi = (slice(2 * di, nx), slice(a + dj, ny - a + dj))
            ok = inside[centre] & inside[lo] & inside[hi]
            if not np.any(ok):
                continue
            mean = p_mean_array(values[lo][ok], values[hi][ok], 0.5, p)
            gap = values[centre][ok] - mean
            pairs += int(gap.size)
            k = int(np.argmin(gap))
            if gap[k] < worst:
                worst = float(gap[k])
                ci, cj = np.argwhere(ok)[k]
                node = (ci + di, cj + a)
                xs, ys = samples.xs, samples.ys
                witness = (
                    (float(xs[node[0] - di]), float(ys[node[1] - dj])),
                    (float(xs[node[0] + di]), float(ys[node[1] + dj])),
                )
    if pairs == 0:
        return ConcavityResult(passed=True, min_slack=0.0, pairs=0)
    passed = worst >= -tol
    return ConcavityResult(passed=passed, min_slack=worst, pairs=pairs, witness=None if passed else witness)
