"""Fisher metrics and geodesic distances between fitted time models.

The exponential family is one-dimensional with Fisher information
1/rate^2, so its geodesic distance is |ln(rate2/rate1)| in closed form.

The log-normal family carries the metric ds^2 = (da^2 + 2 db^2)/b^2.
Distances are computed two independent ways:

* the boundary-value problem for the geodesic equations

      a'' - (2 b'/b) a' = 0,
      b'' - b'^2/b + a'^2/(2 b) = 0,

  solved by shooting on the initial derivatives with a fixed-step RK4
  integrator and Newton iteration on the endpoint mismatch, followed by
  composite quadrature of the length integrand sqrt(a'^2 + 2 b'^2)/b; and

* a closed form: substituting u = a/sqrt(2) turns the metric into twice
  the hyperbolic half-plane metric, so

      d = sqrt(2) * arccosh(1 + ((da)^2/2 + (db)^2) / (2 b1 b2)).

The closed form also seeds the shooting iteration, via the half-plane
geodesic (a vertical line or a semicircle centred on the boundary)
reparameterised to constant speed on r in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

FAMILIES = ("exponential", "lognormal")


@dataclass(frozen=True)
class ModelPoint:
    """A point on one of the two statistical manifolds."""

    family: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "exponential":
            if len(self.params) != 1 or not self.params[0] > 0:
                raise ValueError("exponential point needs a single positive rate")
        else:
            if len(self.params) != 2 or not self.params[1] > 0:
                raise ValueError("lognormal point needs (alpha, beta) with beta > 0")

    @classmethod
    def exponential(cls, rate: float) -> "ModelPoint":
        return cls("exponential", (float(rate),))

    @classmethod
    def lognormal(cls, alpha: float, beta: float) -> "ModelPoint":
        return cls("lognormal", (float(alpha), float(beta)))


@dataclass(frozen=True)
class GeodesicPath:
    """Discretised geodesic (r, alpha(r), beta(r)) with its derivatives."""

    r: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    d_alpha: np.ndarray
    d_beta: np.ndarray
    endpoints: tuple[ModelPoint, ModelPoint]
    residual: float


class GeodesicConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (best endpoint residual {residual:.3e})")
        self.residual = residual


def fisher_metric_numeric(point: ModelPoint) -> np.ndarray:
    """The metric E[d_a ln f * d_b ln f] by adaptive quadrature.

    The time axis is mapped to the whole real line with t = e^s, after
    which scipy's Gauss-Kronrod integrator resolves both families to
    ~1e-9 absolute.
    """
    if point.family == "exponential":
        (lam,) = point.params

        def integrand(s):
            t = math.exp(s) if s <= 700.0 else math.inf
            if lam * t > 746.0:  # weight underflows; avoids inf * 0 in the tail
                return 0.0
            score = 1.0 / lam - t
            return score * score * lam * math.exp(-lam * t) * t

        val, _ = quad(integrand, -np.inf, np.inf, epsabs=1e-10, epsrel=1e-11, limit=300)
        return np.array([[val]])

    alpha, beta = point.params
    norm = 1.0 / (beta * math.sqrt(2.0 * math.pi))

    def gaussian(s):
        d = (s - alpha) / beta
        return norm * math.exp(-0.5 * d * d)

    def score_a(s):
        return (s - alpha) / beta**2

    def score_b(s):
        return -1.0 / beta + (s - alpha) ** 2 / beta**3

    def entry(f, g):
        val, _ = quad(lambda s: f(s) * g(s) * gaussian(s),
                      -np.inf, np.inf, epsabs=1e-10, epsrel=1e-11, limit=300)
        return val

    aa = entry(score_a, score_a)
    ab = entry(score_a, score_b)
    bb = entry(score_b, score_b)
    return np.array([[aa, ab], [ab, bb]])


def exp_distance(rate1: float, rate2: float) -> float:
    """Geodesic distance |ln(rate2/rate1)| between exponential models.

    Evaluated as ln(max/min) so symmetry holds bit-for-bit.
    """
    if not (rate1 > 0 and rate2 > 0):
        raise ValueError("rates must be > 0")
    hi, lo = (rate1, rate2) if rate1 >= rate2 else (rate2, rate1)
    return math.log(hi / lo)


def lognormal_distance_closed_form(p1: ModelPoint, p2: ModelPoint) -> float:
    """Hyperbolic half-plane closed form for the log-normal metric."""
    _check_lognormal_pair(p1, p2)
    a1, b1 = p1.params
    a2, b2 = p2.params
    da, db = a2 - a1, b2 - b1
    arg = 1.0 + (da * da / 2.0 + db * db) / (2.0 * b1 * b2)
    return math.sqrt(2.0) * math.acosh(arg)


def _check_lognormal_pair(p1: ModelPoint, p2: ModelPoint) -> None:
    if p1.family != "lognormal" or p2.family != "lognormal":
        raise ValueError("both points must be log-normal")


def _closed_form_initial_derivatives(a1, b1, a2, b2):
    """(alpha'(0), beta'(0)) of the exact constant-speed geodesic.

    In half-plane coordinates (u, b) with u = a/sqrt(2) the geodesic is a
    vertical line (u1 == u2) or the semicircle through both endpoints
    centred on the u-axis, traversed so that ln tan(theta/2) is linear
    in r.
    """
    u1, u2 = a1 / math.sqrt(2.0), a2 / math.sqrt(2.0)
    if u1 == u2:
        return 0.0, b1 * math.log(b2 / b1)
    c = (u2 * u2 + b2 * b2 - u1 * u1 - b1 * b1) / (2.0 * (u2 - u1))
    rho = math.hypot(u1 - c, b1)
    th1 = math.atan2(b1, u1 - c)
    th2 = math.atan2(b2, u2 - c)
    l1 = math.log(math.tan(th1 / 2.0))
    l2 = math.log(math.tan(th2 / 2.0))
    dth = (l2 - l1) * math.sin(th1)  # d theta / dr at r = 0
    du = -rho * math.sin(th1) * dth
    db = rho * math.cos(th1) * dth
    return math.sqrt(2.0) * du, db


def _rk4_path(a1, b1, da0, db0, n_steps):
    """Integrate the geodesic system from r=0 to 1 with n_steps RK4 steps.

    Returns (r, alpha, beta, d_alpha, d_beta) arrays of length n_steps+1,
    or None if beta leaves the upper half plane.
    """
    h = 1.0 / n_steps
    out = np.empty((n_steps + 1, 4))
    y = np.array([a1, da0, b1, db0], dtype=float)
    out[0] = y

    def rhs(y):
        a, da, b, db = y
        return np.array([da, 2.0 * db * da / b, db, db * db / b - da * da / (2.0 * b)])

    for i in range(n_steps):
        if y[2] <= 0:
            return None
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = y
    if np.any(out[:, 2] <= 0):
        return None
    r = np.linspace(0.0, 1.0, n_steps + 1)
    return r, out[:, 0], out[:, 2], out[:, 1], out[:, 3]


def lognormal_geodesic(p1: ModelPoint, p2: ModelPoint,
                       tolerance: float = 1e-8,
                       n_steps: int | None = None) -> GeodesicPath:
    """Solve the geodesic boundary-value problem between two log-normal points.

    Shooting on (alpha'(0), beta'(0)) with Newton iteration on the
    endpoint mismatch; the step count grows with the closed-form distance
    so that RK4 discretisation error stays well below the length
    tolerance used by the oracle-equivalence checks.
    """
    _check_lognormal_pair(p1, p2)
    a1, b1 = p1.params
    a2, b2 = p2.params

    if n_steps is None:
        d = lognormal_distance_closed_form(p1, p2)
        n_steps = int(2 * max(128, math.ceil(40.0 * d)))

    if (a1, b1) == (a2, b2):
        r = np.linspace(0.0, 1.0, n_steps + 1)
        zeros = np.zeros_like(r)
        return GeodesicPath(r, np.full_like(r, a1), np.full_like(r, b1),
                            zeros, zeros.copy(), (p1, p2), 0.0)

    def mismatch(v):
        path = _rk4_path(a1, b1, v[0], v[1], n_steps)
        if path is None:
            return None
        _, alpha, beta, _, _ = path
        return np.array([alpha[-1] - a2, beta[-1] - b2]), path

    v = np.array(_closed_form_initial_derivatives(a1, b1, a2, b2))
    best = mismatch(v)
    if best is None:
        raise GeodesicConvergenceError("initial shot left the half plane", math.inf)
    f, path = best
    res = float(np.max(np.abs(f)))

    for _ in range(30):
        if res <= tolerance:
            r, alpha, beta, d_alpha, d_beta = path
            return GeodesicPath(r, alpha, beta, d_alpha, d_beta, (p1, p2), res)
        # finite-difference Jacobian of the endpoint mismatch
        jac = np.empty((2, 2))
        step_scale = 1e-7 * max(1.0, float(np.max(np.abs(v))))
        ok = True
        for j in range(2):
            dv = np.zeros(2)
            dv[j] = step_scale
            hi = mismatch(v + dv)
            lo = mismatch(v - dv)
            if hi is None or lo is None:
                ok = False
                break
            jac[:, j] = (hi[0] - lo[0]) / (2.0 * step_scale)
        if not ok:
            break
        try:
            delta = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            break
        # damped update: halve until the residual actually decreases
        lam = 1.0
        improved = None
        for _ in range(20):
            trial = mismatch(v + lam * delta)
            if trial is not None and float(np.max(np.abs(trial[0]))) < res:
                improved = (v + lam * delta, trial)
                break
            lam *= 0.5
        if improved is None:
            break
        v, (f, path) = improved
        res = float(np.max(np.abs(f)))

    if res <= tolerance:
        r, alpha, beta, d_alpha, d_beta = path
        return GeodesicPath(r, alpha, beta, d_alpha, d_beta, (p1, p2), res)
    raise GeodesicConvergenceError("shooting did not converge", res)


def geodesic_length(path: GeodesicPath, speed_tolerance: float = 1e-6) -> float:
    """Length integral of the path by composite Simpson quadrature.

    A true geodesic has constant speed sqrt(a'^2 + 2 b'^2)/b; the relative
    variation across samples is required to stay below speed_tolerance.
    """
    if np.any(path.beta <= 0):
        raise ValueError("invalid path: beta must stay positive")
    speed = np.sqrt(path.d_alpha**2 + 2.0 * path.d_beta**2) / path.beta
    top = float(speed.max())
    if top == 0.0:
        return 0.0
    if (top - float(speed.min())) / top > speed_tolerance:
        raise ValueError("invalid path: speed is not constant, not a geodesic")
    return _simpson(speed, path.r)


def _simpson(values: np.ndarray, grid: np.ndarray) -> float:
    n = len(grid) - 1
    h = (grid[-1] - grid[0]) / n
    if n % 2:  # fall back to trapezoid on odd sample counts
        return float(np.trapezoid(values, grid))
    weights = np.ones(n + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return float(h / 3.0 * np.dot(weights, values))


def lognormal_distance_bvp(p1: ModelPoint, p2: ModelPoint,
                           tolerance: float = 1e-8) -> float:
    """Geodesic distance via the boundary-value route."""
    return geodesic_length(lognormal_geodesic(p1, p2, tolerance=tolerance))


def distance_matrix(points: list[ModelPoint], method: str | None = None) -> np.ndarray:
    """Pairwise geodesic distances; all points must share one family.

    Exponential points use the closed form.  Log-normal points use the
    boundary-value solver by default, or the half-plane closed form when
    method="closed_form".
    """
    if not points:
        raise ValueError("need at least one model point")
    families = {p.family for p in points}
    if len(families) != 1:
        raise ValueError(f"cross-family distances are undefined: got {sorted(families)}")
    family = points[0].family
    n = len(points)
    mat = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            if family == "exponential":
                d = exp_distance(points[i].params[0], points[j].params[0])
            elif method == "closed_form":
                d = lognormal_distance_closed_form(points[i], points[j])
            else:
                d = lognormal_distance_bvp(points[i], points[j])
            mat[i, j] = mat[j, i] = d
    return mat
