"""l_q norm spaces and the quantities every bound in this library is made of.

A space carries smoothness data (p, T_p) whose decay exponent
w = (1 - p)/p drives the split, partition, selection and net guarantees.
This module owns that arithmetic, the point-set containers, and the exact
Rademacher averages used to sanity-check a (p, T_p) configuration on
concrete vector families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, InputError
from .seeding import substream

EXACT_RADEMACHER_MAX = 22
BOUND_REL_SLACK = 1e-9
BOUND_KINDS = ("split", "tverberg", "selection_or_net")

_SIGN_CHUNK = 1 << 15


@dataclass(frozen=True)
class NormSpec:
    """Finite-dimensional l_q space with user-configured type data.

    ``type_exponent`` (p) defaults to min(q_norm, 2); there is no valid
    default at q_norm = 1 because p must exceed 1, so supply it explicitly
    there.  ``type_constant`` (T_p) defaults to 1.0, which is exact for
    q_norm = 2 and an uncalibrated modeling choice for any other q; every
    certification report echoes the constant that was used.
    """

    q_norm: float
    type_exponent: float | None = None
    type_constant: float | None = None

    def __post_init__(self):
        q = float(self.q_norm)
        if math.isnan(q) or q < 1.0:
            raise InputError(f"q_norm must be >= 1 or inf, got {self.q_norm}")
        object.__setattr__(self, "q_norm", q)
        p = self.type_exponent
        if p is None:
            p = min(q, 2.0)
            if p <= 1.0:
                raise InputError(
                    "no default type exponent exists for q_norm = 1; "
                    "pass type_exponent in (1, 2] explicitly"
                )
        p = float(p)
        if not 1.0 < p <= 2.0:
            raise InputError(f"type_exponent must lie in (1, 2], got {p}")
        object.__setattr__(self, "type_exponent", p)
        t = 1.0 if self.type_constant is None else float(self.type_constant)
        if not t > 0.0:
            raise InputError(f"type_constant must be positive, got {t}")
        object.__setattr__(self, "type_constant", t)

    @property
    def w(self) -> float:
        """Decay exponent (1 - p)/p, always in [-1/2, 0)."""
        return (1.0 - self.type_exponent) / self.type_exponent


def euclidean() -> NormSpec:
    """The l_2 space with its exact type data (p = 2, T_p = 1)."""
    return NormSpec(2.0)


def _norms_matrix(space: NormSpec, arr: np.ndarray) -> np.ndarray:
    a = np.abs(arr)
    q = space.q_norm
    if math.isinf(q):
        return a.max(axis=1)
    if q == 1.0:
        return a.sum(axis=1)
    if q == 2.0:
        return np.linalg.norm(arr, axis=1)
    amax = a.max(axis=1)
    out = np.zeros_like(amax)
    nz = amax > 0
    if nz.any():
        scaled = a[nz] / amax[nz, None]
        out[nz] = amax[nz] * (scaled**q).sum(axis=1) ** (1.0 / q)
    return out


def _validated_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise InputError("expected a nonempty 1-d vector")
    if not np.all(np.isfinite(arr)):
        raise InputError("vector has non-finite coordinates")
    return arr


def _vector_family(vectors) -> np.ndarray:
    if isinstance(vectors, PointSet):
        return vectors.coords
    arr = np.asarray(vectors, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InputError("expected a nonempty family of equal-length vectors")
    if not np.all(np.isfinite(arr)):
        raise InputError("vectors contain non-finite coordinates")
    return arr


def norm(space: NormSpec, v) -> float:
    """l_{q_norm} norm of a single vector."""
    arr = _validated_vector(v)
    return float(_norms_matrix(space, arr[None, :])[0])


def norms(space: NormSpec, rows) -> np.ndarray:
    """Row-wise norms of a 2-d array."""
    return _norms_matrix(space, _vector_family(rows))


@dataclass(frozen=True)
class PointSet:
    """Immutable n x d array of points with optional per-point labels."""

    coords: np.ndarray
    labels: tuple | None = None

    def __post_init__(self):
        arr = np.array(self.coords, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError("points must form a nonempty n x d array")
        if not np.all(np.isfinite(arr)):
            raise InputError("points contain non-finite coordinates")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != arr.shape[0]:
                raise InputError("labels length must match point count")
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    def subset(self, indices) -> "PointSet":
        idx = list(int(i) for i in indices)
        labels = None
        if self.labels is not None:
            labels = tuple(self.labels[i] for i in idx)
        return PointSet(self.coords[idx], labels)

    def has_duplicates(self) -> bool:
        seen = set()
        for row in self.coords:
            key = row.tobytes()
            if key in seen:
                return True
            seen.add(key)
        return False


@dataclass(frozen=True)
class ColoredPointSet:
    """Equal-size color classes Z_1..Z_r sharing no exact point."""

    classes: tuple

    def __post_init__(self):
        classes = tuple(
            c if isinstance(c, PointSet) else PointSet(c) for c in self.classes
        )
        if not classes:
            raise InputError("need at least one color class")
        dim = classes[0].dim
        size = len(classes[0])
        for c in classes[1:]:
            if c.dim != dim:
                raise InputError("color classes must share one dimension")
            if len(c) != size:
                raise InputError("color classes must have equal cardinality")
        seen: dict[bytes, int] = {}
        for ci, c in enumerate(classes):
            for row in c.coords:
                owner = seen.setdefault(row.tobytes(), ci)
                if owner != ci:
                    raise InputError(f"classes {owner} and {ci} share a point")
        object.__setattr__(self, "classes", classes)

    @property
    def r(self) -> int:
        return len(self.classes)

    @property
    def class_size(self) -> int:
        return len(self.classes[0])

    @property
    def dim(self) -> int:
        return self.classes[0].dim

    def stacked(self) -> PointSet:
        """All points, classes concatenated in color order."""
        coords = np.concatenate([c.coords for c in self.classes], axis=0)
        labels = None
        if all(c.labels is not None for c in self.classes):
            labels = tuple(lab for c in self.classes for lab in c.labels)
        return PointSet(coords, labels)

    def max_class_diameter(self, space: NormSpec) -> float:
        return max(diameter(space, c) for c in self.classes)


def centroid(points: PointSet) -> np.ndarray:
    """Coordinate-wise mean of the set."""
    if isinstance(points, np.ndarray):
        points = PointSet(points)
    return points.coords.mean(axis=0)


def diameter(space: NormSpec, points: PointSet) -> float:
    """Maximum pairwise distance, exact O(n^2) scan."""
    if isinstance(points, np.ndarray):
        points = PointSet(points)
    X = points.coords
    best = 0.0
    for i in range(len(points) - 1):
        cand = float(_norms_matrix(space, X[i + 1 :] - X[i]).max())
        if cand > best:
            best = cand
    return best


@dataclass(frozen=True)
class RademacherEstimate:
    value: float
    stderr: float
    mode: str
    samples: int


def rademacher_average(
    space: NormSpec, vectors, mode: str = "exact", trials: int = 4096, seed: int = 0
) -> RademacherEstimate:
    """Average norm of the random-sign sum of a vector family.

    ``exact`` enumerates all 2^m sign patterns (m <= 22); ``monte_carlo``
    samples ``trials`` patterns and reports the standard error of the mean.
    """
    V = _vector_family(vectors)
    m = V.shape[0]
    if mode == "exact":
        if m > EXACT_RADEMACHER_MAX:
            raise CapacityError(
                f"exact enumeration supports at most {EXACT_RADEMACHER_MAX} "
                f"vectors, got {m}",
                count=2**m,
            )
        n_pat = 1 << m
        shifts = np.arange(m, dtype=np.uint64)
        total = 0.0
        for start in range(0, n_pat, _SIGN_CHUNK):
            idx = np.arange(start, min(start + _SIGN_CHUNK, n_pat), dtype=np.uint64)
            signs = ((idx[:, None] >> shifts) & 1).astype(np.float64) * 2.0 - 1.0
            total += float(_norms_matrix(space, signs @ V).sum())
        return RademacherEstimate(total / n_pat, 0.0, "exact", n_pat)
    if mode == "monte_carlo":
        if trials < 2:
            raise InputError("monte_carlo mode needs at least 2 trials")
        rng = substream(seed)
        vals = np.empty(trials)
        done = 0
        while done < trials:
            b = min(_SIGN_CHUNK, trials - done)
            signs = rng.integers(0, 2, size=(b, m)).astype(np.float64) * 2.0 - 1.0
            vals[done : done + b] = _norms_matrix(space, signs @ V)
            done += b
        return RademacherEstimate(
            float(vals.mean()),
            float(vals.std(ddof=1) / math.sqrt(trials)),
            "monte_carlo",
            trials,
        )
    raise InputError(f"unknown rademacher mode {mode!r}")


@dataclass(frozen=True)
class TypeInequalityReport:
    lhs: float
    rhs: float
    holds: bool


def type_inequality_check(space: NormSpec, vectors) -> TypeInequalityReport:
    """Exact check of the type-p inequality on one vector family.

    lhs is the exact Rademacher average, rhs is T_p (sum ||x_j||^p)^(1/p).
    """
    V = _vector_family(vectors)
    lhs = rademacher_average(space, V, mode="exact").value
    p = space.type_exponent
    rhs = space.type_constant * float(
        (_norms_matrix(space, V) ** p).sum() ** (1.0 / p)
    )
    return TypeInequalityReport(lhs, rhs, meets_bound(lhs, rhs))


def bound_constant(space: NormSpec, which: str) -> float:
    """C(X) for the three guarantee families."""
    base = 2.0 ** (1.0 / space.type_exponent) * space.type_constant
    if which == "split":
        return base
    denom = 1.0 - 2.0**space.w
    if which == "tverberg":
        return base / denom
    if which == "selection_or_net":
        return 2.0 * base / denom
    raise InputError(f"unknown bound kind {which!r}; expected one of {BOUND_KINDS}")


def theorem_bound(space: NormSpec, which: str, scale: int, D: float) -> float:
    """C(X) * scale^w * D with the constant matching ``which``."""
    scale = int(scale)
    if scale < 1:
        raise InputError(f"scale must be >= 1, got {scale}")
    if D < 0:
        raise InputError(f"diameter must be nonnegative, got {D}")
    return bound_constant(space, which) * float(scale) ** space.w * float(D)


def meets_bound(achieved: float, bound: float, rel_slack: float = BOUND_REL_SLACK) -> bool:
    """Bound comparison with the library-wide relative slack for roundoff."""
    return achieved <= bound * (1.0 + rel_slack)
