"""Certified point-to-hull distances in l_q norms.

Conditional gradient (pairwise Frank-Wolfe) over the simplex of hull
weights.  Every solve returns a two-sided certificate: a feasible upper
bound with the witness weights attaining it, and a lower bound from the
duality gap, so downstream theorem checks are falsifiable.

For q_norm = 2 the smoothed squared objective admits exact line search.
For finite q_norm not in {1, 2} the solver works on the q-th power of the
norm (smooth for q > 1) and converts bounds back.  For q in {1, inf} the
objective is polyhedral; directions come from subgradients and the solver
may stop loose, but the returned interval is always valid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InputError
from .space import NormSpec, PointSet, diameter, norm, _norms_matrix

DEFAULT_MAX_ITERS = 100_000
_STALL_LIMIT = 128
_RESYNC_EVERY = 64


@dataclass(frozen=True)
class DistanceCertificate:
    """Interval [lower, upper] around dist(q, conv points) plus a witness.

    ``witness_weights`` are convex weights whose combination attains
    ``upper``; ``status`` is "converged" when upper - lower met the
    requested tolerance and "loose" otherwise (the interval stays valid).
    """

    upper: float
    lower: float
    witness_weights: np.ndarray
    iterations: int
    status: str

    @property
    def gap(self) -> float:
        return self.upper - self.lower


def _finish(space, X, target, lower, weights, iterations, tol):
    # upper is recomputed at the witness so the certificate is self-consistent
    w = np.maximum(weights, 0.0)
    w /= w.sum()
    upper = float(_norms_matrix(space, (target - w @ X)[None, :])[0])
    lower = min(lower, upper)
    status = "converged" if upper - lower <= tol else "loose"
    return DistanceCertificate(upper, float(lower), w, iterations, status)


def _solve_l2(space, X, target, tol, max_iters):
    # minimize f(y) = 0.5 ||target - y||^2 over y in conv X, pairwise FW
    m = X.shape[0]
    vertex_d2 = ((X - target) ** 2).sum(axis=1)
    j0 = int(np.argmin(vertex_d2))
    lam = np.zeros(m)
    lam[j0] = 1.0
    y = X[j0].astype(np.float64).copy()
    best_upper = math.sqrt(max(vertex_d2[j0], 0.0))
    best_lam = lam.copy()
    best_lower = 0.0
    it = 0
    for it in range(1, max_iters + 1):
        if it % _RESYNC_EVERY == 0:
            y = lam @ X
        rho = target - y
        f = 0.5 * float(rho @ rho)
        scores = X @ rho
        s = int(np.argmax(scores))
        gap = float(scores[s] - rho @ y)
        upper = math.sqrt(2.0 * f)
        if upper < best_upper:
            best_upper = upper
            best_lam = lam.copy()
        lower = math.sqrt(2.0 * max(0.0, f - gap))
        if lower > best_lower:
            best_lower = lower
        if best_upper - best_lower <= tol:
            return _finish(space, X, target, best_lower, best_lam, it, tol)
        active = np.flatnonzero(lam > 0)
        v = int(active[np.argmin(scores[active])])
        if s == v:
            break
        du = X[s] - X[v]
        denom = float(du @ du)
        if denom <= 0.0:
            break
        t = float(rho @ du) / denom
        if t <= 0.0:
            break
        t = min(t, lam[v])
        lam[s] += t
        lam[v] -= t
        if lam[v] < 1e-15:
            lam[v] = 0.0
        y = y + t * du
    return _finish(space, X, target, best_lower, best_lam, it, tol)


def _line_search(f_seg, hi):
    if hi <= 0.0:
        return 0.0
    res = minimize_scalar(f_seg, bounds=(0.0, hi), method="bounded",
                          options={"xatol": 1e-12})
    t = float(res.x)
    if f_seg(t) > f_seg(0.0):
        return 0.0
    return t


def _solve_power(space, X, target, tol, max_iters):
    # minimize f(y) = sum |target_i - y_i|^q, smooth for q > 1
    q = space.q_norm
    m = X.shape[0]

    def fpow(y):
        return float((np.abs(target - y) ** q).sum())

    def grad(y):
        rho = target - y
        return -q * np.abs(rho) ** (q - 1.0) * np.sign(rho)

    d0 = _norms_matrix(space, X - target)
    j0 = int(np.argmin(d0))
    lam = np.zeros(m)
    lam[j0] = 1.0
    y = X[j0].astype(np.float64).copy()
    best_upper = float(d0[j0])
    best_lam = lam.copy()
    best_lower = 0.0
    stall = 0
    it = 0
    for it in range(1, max_iters + 1):
        if it % _RESYNC_EVERY == 0:
            y = lam @ X
        g = grad(y)
        f = fpow(y)
        scores = X @ g
        s = int(np.argmin(scores))
        gap = float(g @ y - scores[s])
        upper = f ** (1.0 / q)
        improved = False
        if upper < best_upper - 1e-17:
            best_upper = upper
            best_lam = lam.copy()
            improved = True
        lower = max(0.0, f - gap) ** (1.0 / q)
        if lower > best_lower + 1e-17:
            best_lower = lower
            improved = True
        if best_upper - best_lower <= tol:
            return _finish(space, X, target, best_lower, best_lam, it, tol)
        active = np.flatnonzero(lam > 0)
        v = int(active[np.argmax(scores[active])])
        du = X[s] - X[v]

        def f_seg(t, du=du, y=y):
            return fpow(y + t * du)

        t = _line_search(f_seg, lam[v]) if s != v else 0.0
        if t <= 0.0:
            stall = stall + 1 if not improved else 0
            if stall > _STALL_LIMIT:
                break
            continue
        stall = 0
        lam[s] += t
        lam[v] -= t
        if lam[v] < 1e-15:
            lam[v] = 0.0
        y = y + t * du
    return _finish(space, X, target, best_lower, best_lam, it, tol)


def _solve_polyhedral(space, X, target, tol, max_iters):
    # q in {1, inf}: subgradient directions, line search on the true norm
    q = space.q_norm
    m = X.shape[0]

    def fval(y):
        return norm(space, target - y)

    def subgrad(y):
        rho = target - y
        if math.isinf(q):
            i = int(np.argmax(np.abs(rho)))
            g = np.zeros_like(rho)
            g[i] = -np.sign(rho[i]) if rho[i] != 0 else 0.0
            return g
        return -np.sign(rho)

    d0 = _norms_matrix(space, X - target)
    j0 = int(np.argmin(d0))
    lam = np.zeros(m)
    lam[j0] = 1.0
    y = X[j0].astype(np.float64).copy()
    best_upper = float(d0[j0])
    best_lam = lam.copy()
    best_lower = 0.0
    stall = 0
    it = 0
    for it in range(1, max_iters + 1):
        if it % _RESYNC_EVERY == 0:
            y = lam @ X
        g = subgrad(y)
        f = fval(y)
        scores = X @ g
        s = int(np.argmin(scores))
        gap = float(g @ y - scores[s])
        improved = False
        if f < best_upper - 1e-17:
            best_upper = f
            best_lam = lam.copy()
            improved = True
        if f - gap > best_lower + 1e-17:
            best_lower = f - gap
            improved = True
        if best_upper - best_lower <= tol:
            return _finish(space, X, target, best_lower, best_lam, it, tol)

        def f_seg(t, s=s, y=y):
            return fval(y + t * (X[s] - y))

        t = _line_search(f_seg, 1.0)
        if t <= 0.0:
            stall = stall + 1 if not improved else 0
            if stall > _STALL_LIMIT:
                break
            continue
        stall = 0
        lam *= 1.0 - t
        lam[s] += t
        y = y + t * (X[s] - y)
    return _finish(space, X, target, max(best_lower, 0.0), best_lam, it, tol)


def default_tolerance(space: NormSpec, points: PointSet) -> float:
    """1e-6 * max(1, diam) as the default certification tolerance."""
    return 1e-6 * max(1.0, diameter(space, points))


def dist_to_hull(
    space: NormSpec,
    q,
    points: PointSet,
    tol: float | None = None,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> DistanceCertificate:
    """Certified distance from q to the convex hull of ``points``.

    Stops once upper - lower <= tol; if the iteration budget runs out the
    certificate is returned with status "loose" (bounds remain valid).
    """
    if not isinstance(points, PointSet):
        points = PointSet(points)
    target = np.asarray(q, dtype=np.float64)
    if target.shape != (points.dim,):
        raise InputError(
            f"query point must have dimension {points.dim}, got shape {target.shape}"
        )
    if not np.all(np.isfinite(target)):
        raise InputError("query point has non-finite coordinates")
    if tol is None:
        tol = default_tolerance(space, points)
    if tol <= 0:
        raise InputError(f"tolerance must be positive, got {tol}")
    X = points.coords
    if len(points) == 1:
        d = norm(space, target - X[0])
        return DistanceCertificate(d, d, np.array([1.0]), 0, "converged")
    qn = space.q_norm
    if qn == 2.0:
        return _solve_l2(space, X, target, tol, max_iters)
    if qn == 1.0 or math.isinf(qn):
        return _solve_polyhedral(space, X, target, tol, max_iters)
    return _solve_power(space, X, target, tol, max_iters)


def classify_ball(cert: DistanceCertificate, radius: float) -> str:
    if cert.upper <= radius:
        return "yes"
    if cert.lower > radius:
        return "no"
    return "unknown"


def ball_hull_intersects(
    space: NormSpec,
    q,
    radius: float,
    points: PointSet,
    tol: float | None = None,
) -> str:
    """"yes" / "no" / "unknown" for B(q, radius) meeting conv(points)."""
    if radius < 0:
        raise InputError(f"radius must be nonnegative, got {radius}")
    cert = dist_to_hull(space, q, points, tol=tol)
    return classify_ball(cert, radius)
