"""Closed-form global profiles and sup-norm distance to the profile classes.

Two families are implemented:

* ``GlobalProfile``: rotations of the one-dimensional two-phase ramp

      v(x) = beta1 * ((lp/4) max(x1,0)^2 - (lm/4) min(x1 - tau, 0)^2) + beta2 * x1

  evaluated in coordinates rotated by ``theta`` (the profile's own frame is
  reached by rotating the input point counterclockwise by theta and reading
  off the first coordinate).

* ``OnePhasePolynomial``: sign-definite homogeneous quadratics that solve the
  equation in a single phase.

``dist_to_Mstar`` and ``dist_to_M`` measure sup-norm distance on the unit
disk between a sampled field and the admissible parameter box of these
ramps; they drive blow-up classification.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .grid import BoundaryMap, Grid2D, ScalarField, boundary_mask


@dataclass(frozen=True)
class GlobalProfile:
    """One-dimensional ramp profile composed with a rotation.

    Structural constraints: beta1, beta2 >= 0 with beta1 + beta2 > 0,
    tau in [-1, 0], and a nonzero linear part forces tau = 0.  The box
    bounds (a, b, c) used by the distance searches are not part of the
    type; they parameterize the search, not the profile.
    """

    beta1: float
    beta2: float
    tau: float
    theta: float
    lambda_plus: float
    lambda_minus: float

    def __post_init__(self) -> None:
        if self.lambda_plus <= 0.0 or self.lambda_minus <= 0.0:
            raise ValueError("lambda_plus and lambda_minus must be positive")
        if self.beta1 < 0.0 or self.beta2 < 0.0:
            raise ValueError("beta1 and beta2 must be nonnegative")
        if self.beta1 + self.beta2 <= 0.0:
            raise ValueError("beta1 + beta2 must be positive")
        if not (-1.0 <= self.tau <= 0.0):
            raise ValueError(f"tau must lie in [-1, 0], got {self.tau}")
        if self.beta2 != 0.0 and self.tau != 0.0:
            raise ValueError("a nonzero linear part requires tau = 0")

    def to_json(self) -> str:
        return json.dumps(
            {
                "beta1": self.beta1,
                "beta2": self.beta2,
                "tau": self.tau,
                "theta": self.theta,
                "lambda_plus": self.lambda_plus,
                "lambda_minus": self.lambda_minus,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "GlobalProfile":
        d = json.loads(text)
        return cls(
            beta1=float(d["beta1"]),
            beta2=float(d["beta2"]),
            tau=float(d["tau"]),
            theta=float(d["theta"]),
            lambda_plus=float(d["lambda_plus"]),
            lambda_minus=float(d["lambda_minus"]),
        )


_DEFINITE_TOL = 1e-12


@dataclass(frozen=True)
class OnePhasePolynomial:
    """Sign-definite homogeneous quadratic cxx*x1^2 + cxy*x1*x2 + cyy*x2^2.

    ``sign`` is +1 for a nonnegative polynomial (positive phase) and -1 for
    a nonpositive one.  The induced forcing constant is
    ``lam = 4 * |cxx + cyy|``, so the polynomial solves the equation in its
    single phase.
    """

    cxx: float
    cxy: float
    cyy: float
    sign: int

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        s = self.sign
        if s * self.cxx < -_DEFINITE_TOL or s * self.cyy < -_DEFINITE_TOL:
            raise ValueError("diagonal coefficients must match the declared sign")
        if self.cxy * self.cxy > 4.0 * self.cxx * self.cyy + _DEFINITE_TOL:
            raise ValueError("polynomial is not sign-definite (discriminant check)")
        if self.cxx == 0.0 and self.cyy == 0.0:
            raise ValueError("degenerate polynomial: cxx and cyy both zero")

    @property
    def lam(self) -> float:
        """Forcing constant lambda with laplacian = sign * lam / 2."""
        return 4.0 * abs(self.cxx + self.cyy)


def _rotated_x1(theta: float, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    # first coordinate of the point rotated counterclockwise by theta
    return math.cos(theta) * X - math.sin(theta) * Y


def _ramp(x1: np.ndarray, beta1: float, beta2: float, tau: float,
          lp: float, lm: float) -> np.ndarray:
    pos = np.maximum(x1, 0.0)
    neg = np.minimum(x1 - tau, 0.0)
    return beta1 * (0.25 * lp * pos * pos - 0.25 * lm * neg * neg) + beta2 * x1


def eval_profile_many(v: GlobalProfile, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    x1 = _rotated_x1(v.theta, np.asarray(X, dtype=float), np.asarray(Y, dtype=float))
    return _ramp(x1, v.beta1, v.beta2, v.tau, v.lambda_plus, v.lambda_minus)


def eval_profile(v: GlobalProfile, p: tuple[float, float]) -> float:
    return float(eval_profile_many(v, np.array([p[0]]), np.array([p[1]]))[0])


def eval_polynomial_many(q: OnePhasePolynomial, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    return q.cxx * X * X + q.cxy * X * Y + q.cyy * Y * Y


def eval_polynomial(q: OnePhasePolynomial, p: tuple[float, float]) -> float:
    return float(eval_polynomial_many(q, np.array([p[0]]), np.array([p[1]]))[0])


def eval_many(obj, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Evaluate either profile family on coordinate arrays."""
    if isinstance(obj, GlobalProfile):
        return eval_profile_many(obj, X, Y)
    if isinstance(obj, OnePhasePolynomial):
        return eval_polynomial_many(obj, X, Y)
    raise TypeError(f"cannot evaluate object of type {type(obj).__name__}")


def profile_boundary_trace(obj, grid: Grid2D) -> BoundaryMap:
    """Boundary value map holding the trace of a profile or polynomial."""
    return BoundaryMap.from_callable(grid, lambda X, Y: eval_many(obj, X, Y))


# ---------------------------------------------------------------------------
# Distance to the ramp classes
# ---------------------------------------------------------------------------
#
# The admissible set splits into two charts once "beta2 != 0 forces tau = 0"
# is taken literally:
#   chart A: beta2 = 0, beta1 in [c, a], tau in [-1, 0]
#   chart B: tau = 0, beta1 in [0, a], beta2 in [0, b], beta1 + beta2 >= c
# Both are scanned on a coarse grid, then polished by coordinate descent
# with step halving.  Every evaluated candidate is admissible, so the
# returned distance is always an upper bound for the true infimum.


def _disk_nodes(f: ScalarField) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    g = f.grid
    if g.x_min > -1.0 or g.x_max < 1.0 or g.y_min > -1.0 or g.y_max < 1.0:
        raise ValueError("field grid must cover the closed unit disk")
    X, Y = g.meshgrid()
    mask = X * X + Y * Y <= 1.0 + 1e-12
    return X[mask], Y[mask], f.values[mask]


def _sup(candidate: np.ndarray, fvals: np.ndarray) -> float:
    return float(np.max(np.abs(candidate - fvals)))


class _RampObjective:
    """sup |ramp(params) - f| over unit-disk nodes, for one rotation."""

    def __init__(self, X, Y, fvals, lp, lm):
        self.X = X
        self.Y = Y
        self.fvals = fvals
        self.lp = lp
        self.lm = lm
        self._theta = None
        self._x1 = None
        self._pos2 = None

    def set_theta(self, theta: float) -> None:
        if self._theta != theta:
            self._theta = theta
            self._x1 = _rotated_x1(theta, self.X, self.Y)
            p = np.maximum(self._x1, 0.0)
            self._pos2 = 0.25 * self.lp * p * p

    def neg_part(self, tau: float) -> np.ndarray:
        n = np.minimum(self._x1 - tau, 0.0)
        return 0.25 * self.lm * n * n

    def value(self, beta1: float, beta2: float, tau: float) -> float:
        cand = beta1 * (self._pos2 - self.neg_part(tau)) + beta2 * self._x1
        return _sup(cand, self.fvals)

    def chart_a_batch(self, taus: np.ndarray, beta1s: np.ndarray):
        """Coarse scan of chart A; returns (best_value, beta1, tau)."""
        best = (math.inf, 0.0, 0.0)
        for tau in taus:
            base = self._pos2 - self.neg_part(tau)
            cand = beta1s[:, None] * base[None, :]
            sups = np.max(np.abs(cand - self.fvals[None, :]), axis=1)
            k = int(np.argmin(sups))
            if sups[k] < best[0]:
                best = (float(sups[k]), float(beta1s[k]), float(tau))
        return best

    def chart_b_batch(self, beta1s: np.ndarray, beta2s: np.ndarray, c: float):
        """Coarse scan of chart B (tau = 0); returns (best, beta1, beta2)."""
        base = self._pos2 - self.neg_part(0.0)
        best = (math.inf, 0.0, 0.0)
        for b2 in beta2s:
            cand = beta1s[:, None] * base[None, :] + b2 * self._x1[None, :]
            sups = np.max(np.abs(cand - self.fvals[None, :]), axis=1)
            sups = np.where(beta1s + b2 >= c, sups, math.inf)
            k = int(np.argmin(sups))
            if sups[k] < best[0]:
                best = (float(sups[k]), float(beta1s[k]), float(b2))
        return best


def _descend_chart_a(obj: _RampObjective, beta1, tau, a, c, step_b, step_t, tol):
    best = obj.value(beta1, 0.0, tau)
    while step_b > tol or step_t > tol:
        moved = False
        for d in (+step_b, -step_b):
            nb = min(max(beta1 + d, c), a)
            v = obj.value(nb, 0.0, tau)
            if v < best:
                best, beta1, moved = v, nb, True
        for d in (+step_t, -step_t):
            nt = min(max(tau + d, -1.0), 0.0)
            v = obj.value(beta1, 0.0, nt)
            if v < best:
                best, tau, moved = v, nt, True
        if not moved:
            step_b *= 0.5
            step_t *= 0.5
    return best, beta1, 0.0, tau


def _descend_chart_b(obj: _RampObjective, beta1, beta2, a, b, c, step1, step2, tol):
    best = obj.value(beta1, beta2, 0.0)
    while step1 > tol or step2 > tol:
        moved = False
        for d in (+step1, -step1):
            nb = min(max(beta1 + d, 0.0), a)
            if nb + beta2 < c:
                continue
            v = obj.value(nb, beta2, 0.0)
            if v < best:
                best, beta1, moved = v, nb, True
        for d in (+step2, -step2):
            nb = min(max(beta2 + d, 0.0), b)
            if beta1 + nb < c:
                continue
            v = obj.value(beta1, nb, 0.0)
            if v < best:
                best, beta2, moved = v, nb, True
        if not moved:
            step1 *= 0.5
            step2 *= 0.5
    return best, beta1, beta2, 0.0


def _search_fixed_theta(obj, theta, a, b, c, coarse, refine_tol):
    """Full two-chart search at one rotation angle."""
    obj.set_theta(theta)
    taus = np.linspace(-1.0, 0.0, coarse)
    b1_a = np.linspace(c, a, coarse)
    va, b1a, ta = obj.chart_a_batch(taus, b1_a)
    step = max((a - c) / (coarse - 1), 1.0 / (coarse - 1))
    va, b1a, b2a, ta = _descend_chart_a(obj, b1a, ta, a, c, step, step, refine_tol)

    b1_b = np.linspace(0.0, a, coarse)
    b2_b = np.linspace(0.0, b, coarse)
    vb, b1b, b2b = obj.chart_b_batch(b1_b, b2_b, c)
    stepb = max(a, b) / (coarse - 1)
    vb, b1b, b2b, tb = _descend_chart_b(obj, b1b, b2b, a, b, c, stepb, stepb, refine_tol)

    if va <= vb:
        return va, b1a, b2a, ta
    return vb, b1b, b2b, tb


def dist_to_Mstar(
    f: ScalarField,
    a: float = 4.0,
    b: float = 4.0,
    c: float = 0.05,
    *,
    lambda_plus: float = 2.0,
    lambda_minus: float = 2.0,
    coarse: int = 32,
    refine_tol: float = 1e-6,
) -> tuple[float, GlobalProfile]:
    """Sup-norm distance on the unit disk to the unrotated ramp class.

    Returns (distance, best profile).  Search: coarse parameter grid over
    both admissible charts followed by coordinate descent with step halving
    down to ``refine_tol``.
    """
    if not (a > 0 and b > 0 and 0 < c <= a):
        raise ValueError("bounds must satisfy a, b > 0 and 0 < c <= a")
    X, Y, fvals = _disk_nodes(f)
    obj = _RampObjective(X, Y, fvals, lambda_plus, lambda_minus)
    val, b1, b2, tau = _search_fixed_theta(obj, 0.0, a, b, c, coarse, refine_tol)
    prof = GlobalProfile(b1, b2, tau, 0.0, lambda_plus, lambda_minus)
    return val, prof


def dist_to_M(
    f: ScalarField,
    a: float = 4.0,
    b: float = 4.0,
    c: float = 0.05,
    *,
    lambda_plus: float = 2.0,
    lambda_minus: float = 2.0,
    theta_grid: int = 360,
    coarse: int = 32,
    refine_tol: float = 1e-6,
) -> tuple[float, GlobalProfile]:
    """Sup-norm distance on the unit disk to the rotated ramp class.

    A uniform theta scan (cheap inner search on subsampled nodes) locates
    the best rotation basin; the leaders are re-searched at full resolution
    and theta is polished locally by step halving.
    """
    if not (a > 0 and b > 0 and 0 < c <= a):
        raise ValueError("bounds must satisfy a, b > 0 and 0 < c <= a")
    if theta_grid < 4:
        raise ValueError("theta_grid must be at least 4")
    X, Y, fvals = _disk_nodes(f)

    # stage 1: theta scan with a light inner search on a node subsample
    sub = slice(None, None, 4) if X.size > 2000 else slice(None)
    obj_scan = _RampObjective(X[sub], Y[sub], fvals[sub], lambda_plus, lambda_minus)
    thetas = -math.pi + 2.0 * math.pi * np.arange(theta_grid) / theta_grid
    n_quick = 9
    taus_q = np.linspace(-1.0, 0.0, n_quick)
    b1_aq = np.linspace(c, a, n_quick + 3)
    b1_bq = np.linspace(0.0, a, n_quick)
    b2_bq = np.linspace(0.0, b, n_quick)
    scan = np.empty(theta_grid)
    for k, th in enumerate(thetas):
        obj_scan.set_theta(float(th))
        va, _, _ = obj_scan.chart_a_batch(taus_q, b1_aq)
        vb, _, _ = obj_scan.chart_b_batch(b1_bq, b2_bq, c)
        scan[k] = min(va, vb)

    # stage 2: full-resolution search at the leading angles
    order = np.argsort(scan)
    leaders = [float(thetas[k]) for k in order[:3]]
    obj = _RampObjective(X, Y, fvals, lambda_plus, lambda_minus)
    best = None
    for th in leaders:
        val, b1, b2, tau = _search_fixed_theta(obj, th, a, b, c, coarse, refine_tol)
        if best is None or val < best[0]:
            best = (val, b1, b2, tau, th)

    # stage 3: polish theta with step halving, re-descending the chart at
    # each accepted move
    val, b1, b2, tau, th = best
    step = 2.0 * math.pi / theta_grid
    while step > refine_tol:
        moved = False
        for d in (+step, -step):
            cand_th = th + d
            v, nb1, nb2, ntau = _search_theta_local(
                obj, cand_th, b1, b2, tau, a, b, c, refine_tol
            )
            if v < val:
                val, b1, b2, tau, th = v, nb1, nb2, ntau, cand_th
                moved = True
        if not moved:
            step *= 0.5
    prof = GlobalProfile(b1, b2, tau, th, lambda_plus, lambda_minus)
    return val, prof


def _search_theta_local(obj, theta, beta1, beta2, tau, a, b, c, refine_tol):
    """Re-optimize ramp parameters at a nearby theta, warm-started."""
    obj.set_theta(theta)
    step = 0.05
    if beta2 == 0.0:
        b1 = min(max(beta1, c), a)
        return _descend_chart_a(obj, b1, tau, a, c, step, step, refine_tol)
    return _descend_chart_b(obj, beta1, beta2, a, b, c, step, step, refine_tol)
