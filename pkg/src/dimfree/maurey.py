"""Sparse hull approximation by sampling.

A point of a convex hull is approximated by the centroid of k points drawn
i.i.d. from the weights of a convex witness; the expected error is at most
T_p k^w r^w D + eta, so a short retry loop turns the expectation statement
into an algorithm with an explicit failure mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundMissError, IndeterminateError, InputError, PreconditionError
from .geometry import dist_to_hull
from .seeding import substream
from .space import NormSpec, PointSet, diameter, norm

DEFAULT_TRIALS = 64
WITNESS_CLIP = 1e-12

# relative floor applied to witness tolerances so eta = 0 stays solvable
WITNESS_TOL_FLOOR = 1e-9


@dataclass(frozen=True)
class SparseApprox:
    """k sampled indices per color plus the achieved approximation error.

    ``chosen`` holds per-color index tuples into the source sets, with
    multiplicity; ``approx_point`` is the centroid of the per-color sample
    averages and ``achieved_error`` its certified distance to the target,
    never above ``bound``.
    """

    chosen: tuple
    approx_point: np.ndarray
    achieved_error: float
    bound: float
    trials_used: int


def _witness_floor(target: np.ndarray, coords: np.ndarray) -> float:
    scale = max(1.0, float(np.abs(coords).max()), float(np.abs(target).max()))
    return WITNESS_TOL_FLOOR * scale


def convex_witness(space: NormSpec, target, points: PointSet, tol: float):
    """Convex weights putting ``points`` within ``tol`` of ``target``.

    Returns None when infeasibility beyond ``tol`` is certified.  Raises
    IndeterminateError when the solver interval straddles the threshold.
    A small relative floor is applied to ``tol`` so that exact-membership
    requests (tol = 0) remain solvable in floating point.
    """
    if not isinstance(points, PointSet):
        points = PointSet(points)
    target = np.asarray(target, dtype=np.float64)
    if tol < 0:
        raise InputError(f"tolerance must be nonnegative, got {tol}")
    floor = _witness_floor(target, points.coords)
    eff = max(float(tol), floor)
    cert = dist_to_hull(space, target, points, tol=eff / 2.0)
    if cert.upper <= eff:
        w = np.where(cert.witness_weights < WITNESS_CLIP, 0.0, cert.witness_weights)
        total = w.sum()
        if total <= 0:
            raise IndeterminateError("witness weights degenerated to zero")
        return w / total
    if cert.lower > tol:
        return None
    raise IndeterminateError(
        f"could not certify witness either way: interval "
        f"[{cert.lower:.3e}, {cert.upper:.3e}] vs tol {tol:.3e}"
    )


def _norm_subgradient(space: NormSpec, rho: np.ndarray):
    q = space.q_norm
    nr = norm(space, rho)
    if nr == 0.0:
        return None
    if q == 2.0:
        return rho / nr
    if q == 1.0:
        return np.sign(rho)
    if np.isinf(q):
        i = int(np.argmax(np.abs(rho)))
        u = np.zeros_like(rho)
        u[i] = np.sign(rho[i])
        return u
    return np.sign(rho) * np.abs(rho) ** (q - 1.0) / nr ** (q - 1.0)


def joint_witness(space: NormSpec, classes, target, tol: float, max_sweeps: int = 500):
    """Per-class convex weights whose combination centroid lands within
    ``tol`` of ``target``.

    Realizes the sampling hypothesis in its weakest usable form: the
    centroid of one hull point per class approximates the target (implied
    by every class hull meeting B(target, tol)).  Block-coordinate exact
    projections drive the upper bound; a norm subgradient supplies a lower
    bound on the best reachable distance.  Returns a list of weight
    vectors, or None when infeasibility beyond ``tol`` is certified.
    """
    classes = [c if isinstance(c, PointSet) else PointSet(c) for c in classes]
    target = np.asarray(target, dtype=np.float64)
    r = len(classes)
    floor = max(_witness_floor(target, c.coords) for c in classes)
    eff = max(float(tol), floor)
    inner_tol = eff / 4.0

    weights = []
    ys = np.zeros((r, target.shape[0]))
    for i, cls in enumerate(classes):
        cert = dist_to_hull(space, target, cls, tol=inner_tol)
        weights.append(cert.witness_weights)
        ys[i] = cert.witness_weights @ cls.coords

    best_lower = 0.0
    upper = norm(space, target - ys.mean(axis=0))
    prev_upper = np.inf
    for _ in range(max_sweeps):
        if upper <= eff:
            break
        rho = target - ys.mean(axis=0)
        u = _norm_subgradient(space, rho)
        if u is not None:
            slack = 0.0
            for i, cls in enumerate(classes):
                slack += float((cls.coords @ u).max() - u @ ys[i])
            best_lower = max(best_lower, norm(space, rho) - slack / r)
            if best_lower > tol:
                return None
        if prev_upper - upper <= inner_tol / 8.0:
            break
        prev_upper = upper
        for i, cls in enumerate(classes):
            query = r * target - (ys.sum(axis=0) - ys[i])
            cert = dist_to_hull(space, query, cls, tol=inner_tol)
            weights[i] = cert.witness_weights
            ys[i] = cert.witness_weights @ cls.coords
        upper = norm(space, target - ys.mean(axis=0))
    if upper <= eff:
        cleaned = []
        for w in weights:
            w = np.where(w < WITNESS_CLIP, 0.0, w)
            cleaned.append(w / w.sum())
        return cleaned
    if best_lower > tol:
        return None
    raise IndeterminateError(
        f"joint witness undecided: upper {upper:.3e}, lower {best_lower:.3e}, "
        f"tol {tol:.3e}"
    )


def _check_weights(weights, n):
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (n,):
        raise InputError(f"weights must have shape ({n},), got {w.shape}")
    if np.any(w < -1e-9) or abs(w.sum() - 1.0) > 1e-9:
        raise InputError("weights must be convex (nonnegative, summing to 1)")
    w = np.maximum(w, 0.0)
    return w / w.sum()


def maurey_trial(space: NormSpec, points: PointSet, weights, k: int, seed: int = 0):
    """One k-sample draw: returns (indices, sample mean, error vs weights @ points)."""
    if not isinstance(points, PointSet):
        points = PointSet(points)
    w = _check_weights(weights, len(points))
    k = int(k)
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    rng = substream(seed)
    idx = rng.choice(len(points), size=k, replace=True, p=w)
    avg = points.coords[idx].mean(axis=0)
    err = norm(space, w @ points.coords - avg)
    return tuple(int(i) for i in idx), avg, err


def maurey_sample(
    space: NormSpec,
    points: PointSet,
    weights,
    k: int,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
) -> SparseApprox:
    """Sparse approximation of the point ``weights @ points`` (single color).

    Draws k points i.i.d. per the weight distribution, up to ``trials``
    times, returning the first draw whose error meets T_p k^w D; raises
    BoundMissError carrying the best error if the budget runs out.
    """
    if not isinstance(points, PointSet):
        points = PointSet(points)
    w = _check_weights(weights, len(points))
    target = w @ points.coords
    return colored_caratheodory(
        space, [points], target, eta=0.0, k=k, trials=trials, seed=seed,
        _witnesses=[w],
    )


def colored_caratheodory(
    space: NormSpec,
    classes,
    target,
    eta: float,
    k: int,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    _witnesses=None,
) -> SparseApprox:
    """Colored sparse approximation of a point near every class hull.

    Requires a convex witness within ``eta`` of ``target`` in each class
    (PreconditionError otherwise).  Samples k points per color from the
    witness distributions; the certified bound is
    T_p k^w r^w max_i(diam P_i) + eta.
    """
    classes = [c if isinstance(c, PointSet) else PointSet(c) for c in classes]
    if not classes:
        raise InputError("need at least one class")
    target = np.asarray(target, dtype=np.float64)
    if eta < 0:
        raise InputError(f"eta must be nonnegative, got {eta}")
    k = int(k)
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    if trials < 1:
        raise InputError(f"trials must be >= 1, got {trials}")
    r = len(classes)

    if _witnesses is None:
        _witnesses = joint_witness(space, classes, target, tol=eta)
        if _witnesses is None:
            raise PreconditionError(
                f"no per-class hull points average within eta={eta} of the target"
            )

    D = max(diameter(space, c) for c in classes)
    w_exp = space.w
    bound = (
        space.type_constant * float(k) ** w_exp * float(r) ** w_exp * D + float(eta)
    )

    best_err = np.inf
    best = None
    for trial in range(trials):
        rng = substream(seed, trial)
        chosen = []
        acc = np.zeros(target.shape[0])
        for cls, wts in zip(classes, _witnesses):
            idx = rng.choice(len(cls), size=k, replace=True, p=wts)
            chosen.append(tuple(int(i) for i in idx))
            acc += cls.coords[idx].mean(axis=0)
        approx = acc / r
        err = norm(space, target - approx)
        if err < best_err:
            best_err = err
            best = (tuple(chosen), approx, err, trial + 1)
        if err <= bound:
            return SparseApprox(tuple(chosen), approx, err, bound, trial + 1)
    raise BoundMissError(
        f"no draw met the bound {bound:.6g} within {trials} trials "
        f"(best error {best_err:.6g})",
        achieved=best_err,
        bound=bound,
    )
