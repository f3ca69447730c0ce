"""Balanced colorful subsets and the averaging inequality behind the splits.

The shrink coefficient gamma(n, d) relates the average over balanced
subsets to the Rademacher average of the whole set; it is computed in
exact rational arithmetic because the binomials overflow 64-bit integers
well inside the supported range.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .errors import CapacityError, InputError
from .seeding import substream
from .space import ColoredPointSet, NormSpec, meets_bound, _norms_matrix, rademacher_average

ENUMERATION_CAP = 10_000_000
JENSEN_MAX_POINTS = 20

_PRODUCT_CHUNK = 8192


def gamma_coefficient_exact(n: int, d: int) -> Fraction:
    """Exact gamma(n, d) for a size-d balanced subset of n points per color.

    Lies in [1/2, 1) for every 1 <= d <= n - 1; the lower endpoint is
    attained exactly at (n, d) = (2, 1).
    """
    n = int(n)
    d = int(d)
    if n < 2:
        raise InputError(f"need n >= 2, got {n}")
    if not 1 <= d <= n - 1:
        raise InputError(f"need 1 <= d <= n - 1, got d={d} with n={n}")
    dp, dm = d, n - d
    acc = Fraction(0)
    for j in range(dm + 1):
        acc += (Fraction(1) - Fraction(j, dm)) * comb(n, dm - j)
    for j in range(1, dp + 1):
        acc += (Fraction(1) - Fraction(j, dp)) * comb(n, dp - j)
    return acc / (1 << n)


def gamma_coefficient(n: int, d: int) -> float:
    return float(gamma_coefficient_exact(n, d))


@dataclass(frozen=True)
class BalancedSubset:
    """Per-color index tuples, d indices from each color class."""

    per_color: tuple

    @property
    def d(self) -> int:
        return len(self.per_color[0])

    def flatten(self, class_size: int) -> tuple:
        """Global indices under class-concatenation order."""
        return tuple(
            ci * class_size + i
            for ci, idxs in enumerate(self.per_color)
            for i in idxs
        )


def balanced_subset_count(n: int, d: int, r: int) -> int:
    return comb(n, d) ** r


def enumerate_balanced_subsets(cset: ColoredPointSet, d: int):
    """Yield every balanced subset (d per color) exactly once."""
    n, r = cset.class_size, cset.r
    d = int(d)
    if not 1 <= d <= n:
        raise InputError(f"need 1 <= d <= {n}, got {d}")
    count = balanced_subset_count(n, d, r)
    if count > ENUMERATION_CAP:
        raise CapacityError(
            f"enumeration would produce {count} subsets (cap {ENUMERATION_CAP})",
            count=count,
        )
    for pick in itertools.product(
        *(itertools.combinations(range(n), d) for _ in range(r))
    ):
        yield BalancedSubset(tuple(pick))


def sample_balanced_subset(cset: ColoredPointSet, d: int, seed: int = 0) -> BalancedSubset:
    """Uniform balanced subset; deterministic for a given seed."""
    n, r = cset.class_size, cset.r
    d = int(d)
    if not 1 <= d <= n:
        raise InputError(f"need 1 <= d <= {n}, got {d}")
    rng = substream(seed)
    pick = tuple(
        tuple(sorted(int(i) for i in rng.choice(n, size=d, replace=False)))
        for _ in range(r)
    )
    return BalancedSubset(pick)


@dataclass(frozen=True)
class JensenReport:
    lhs: float
    rhs: float
    gamma: float
    holds: bool


def _per_color_subset_sums(coords: np.ndarray, d: int) -> np.ndarray:
    idx = np.array(list(itertools.combinations(range(coords.shape[0]), d)))
    return coords[idx].sum(axis=1)


def jensen_inequality_check(space: NormSpec, cset: ColoredPointSet, d: int) -> JensenReport:
    """Exact both-sides check of the balanced-subset averaging inequality.

    Each class is recentred to sum zero internally.  lhs averages
    ||gamma * sigma(Q)|| over all balanced subsets Q; rhs is the exact
    Rademacher average of the recentred union.  Requires n * r <= 20.
    """
    n, r = cset.class_size, cset.r
    d = int(d)
    if n < 2:
        raise InputError("need at least 2 points per color")
    if not 1 <= d <= n - 1:
        raise InputError(f"need 1 <= d <= {n - 1}, got {d}")
    total = n * r
    if total > JENSEN_MAX_POINTS:
        raise CapacityError(
            f"exact check supports n*r <= {JENSEN_MAX_POINTS}, got {total}",
            count=2**total,
        )
    gamma = gamma_coefficient(n, d)
    recentred = [c.coords - c.coords.mean(axis=0) for c in cset.classes]

    sums = [_per_color_subset_sums(c, d) for c in recentred]
    counts = [s.shape[0] for s in sums]
    count = int(np.prod(counts))
    lhs_total = 0.0
    for start in range(0, count, _PRODUCT_CHUNK):
        flat = np.arange(start, min(start + _PRODUCT_CHUNK, count))
        parts = np.unravel_index(flat, counts)
        acc = sums[0][parts[0]]
        for ci in range(1, r):
            acc = acc + sums[ci][parts[ci]]
        lhs_total += float(_norms_matrix(space, gamma * acc).sum())
    lhs = lhs_total / count

    rhs = rademacher_average(space, np.concatenate(recentred, axis=0), mode="exact").value
    return JensenReport(lhs, rhs, gamma, meets_bound(lhs, rhs))
