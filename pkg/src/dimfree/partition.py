"""Balanced centroid splits and the recursive transversal partition.

A balanced split halves a set (per color) while keeping the part centroids
close; recursing on the halves until each leaf holds one point per color
yields a partition into transversals whose hulls all pass near the global
centroid.  Search is exhaustive below a size threshold and uniform random
sampling with a retry budget above it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import BoundMissError, CertificationError, InputError, TheoremViolationError
from .geometry import DistanceCertificate, dist_to_hull
from .seeding import substream
from .space import (
    ColoredPointSet,
    NormSpec,
    PointSet,
    bound_constant,
    centroid,
    diameter,
    meets_bound,
    theorem_bound,
    _norms_matrix,
)

SPLIT_EXHAUSTIVE_MAX_N = 14
COLORED_EXHAUSTIVE_CAP = 100_000
DEFAULT_SPLIT_BUDGET = 256

_CHUNK = 8192


@dataclass(frozen=True)
class BalancedSplit:
    """Two-part split with per-color sizes (floor(n/2), ceil(n/2)).

    ``gap`` is ||c(part0) - c(part1)|| for a plain split and the larger of
    the two part-centroid distances from c(S) for a colored split.
    """

    part0: tuple
    part1: tuple
    sizes: tuple
    gap: float
    bound: float
    method: str
    trials_used: int = 0


@dataclass(frozen=True)
class TreeNode:
    path: tuple
    class_size: int
    gap: float
    bound: float
    method: str


@dataclass(frozen=True)
class TverbergPartition:
    """Partition into transversals with certified hull distances to ``center_q``."""

    center_q: np.ndarray
    parts: tuple
    certificates: tuple
    bound: float
    tree_depth: int
    tree: tuple
    r_colors: int
    diameter: float
    corollary_bound: float | None = None
    reinserted: tuple = ()

    @property
    def max_certified_distance(self) -> float:
        return max(c.upper for c in self.certificates)


def _pairwise_diameter(space: NormSpec, X: np.ndarray) -> float:
    best = 0.0
    for i in range(X.shape[0] - 1):
        cand = float(_norms_matrix(space, X[i + 1 :] - X[i]).max())
        if cand > best:
            best = cand
    return best


def balanced_split(
    space: NormSpec,
    points: PointSet,
    budget: int = DEFAULT_SPLIT_BUDGET,
    seed: int = 0,
) -> BalancedSplit:
    """Split into sizes (floor(n/2), ceil(n/2)) with a small centroid gap.

    Exhaustive minimum-gap search for n <= 14, otherwise uniform random
    balanced bipartitions until one meets the guarantee (BoundMissError
    carries the best gap if the budget runs out).
    """
    if not isinstance(points, PointSet):
        points = PointSet(points)
    n = len(points)
    if n < 2:
        raise InputError(f"need at least 2 points, got {n}")
    if points.has_duplicates():
        raise InputError("points must be pairwise distinct")
    X = points.coords
    size0, size1 = n // 2, n - n // 2
    D = diameter(space, points)
    bound = theorem_bound(space, "split", size1, D)
    total = X.sum(axis=0)

    if n <= SPLIT_EXHAUSTIVE_MAX_N:
        if n % 2 == 0:
            combos = itertools.combinations(range(1, n), size0)
        else:
            combos = itertools.combinations(range(n), size0)
        idx = np.array(list(combos))
        sums0 = X[idx].sum(axis=1)
        gaps = _norms_matrix(space, sums0 / size0 - (total - sums0) / size1)
        j = int(np.argmin(gaps))
        gap = float(gaps[j])
        if not meets_bound(gap, bound):
            raise TheoremViolationError(
                f"exhaustive optimum gap {gap:.6g} misses the bound {bound:.6g}",
                achieved=gap,
                bound=bound,
            )
        part0 = tuple(int(i) for i in idx[j])
        part1 = tuple(i for i in range(n) if i not in set(part0))
        return BalancedSplit(part0, part1, (size0, size1), gap, bound, "exhaustive")

    best_gap = math.inf
    for trial in range(budget):
        rng = substream(seed, trial)
        perm = rng.permutation(n)
        p0 = np.sort(perm[:size0])
        sums0 = X[p0].sum(axis=0)
        gap = float(
            _norms_matrix(space, (sums0 / size0 - (total - sums0) / size1)[None, :])[0]
        )
        best_gap = min(best_gap, gap)
        if meets_bound(gap, bound):
            part0 = tuple(int(i) for i in p0)
            part1 = tuple(i for i in range(n) if i not in set(part0))
            return BalancedSplit(
                part0, part1, (size0, size1), gap, bound, "sampled", trial + 1
            )
    raise BoundMissError(
        f"no sampled split met the bound {bound:.6g} within {budget} trials "
        f"(best gap {best_gap:.6g})",
        achieved=best_gap,
        bound=bound,
    )


def _colored_split_core(space, arrays, budget, seed, path):
    """Split each color array into (floor, ceil) halves; gap is the larger
    part-centroid distance from the node centroid.  Returns local index
    tuples per color for both parts."""
    r = len(arrays)
    n = arrays[0].shape[0]
    size0, size1 = n // 2, n - n // 2
    stacked = np.concatenate(arrays, axis=0)
    c_all = stacked.mean(axis=0)
    D = _pairwise_diameter(space, stacked)
    bound = bound_constant(space, "split") * float(size1) ** space.w * float(
        r
    ) ** space.w * D
    total = stacked.sum(axis=0)

    count = comb(n, size1) ** r
    if count <= COLORED_EXHAUSTIVE_CAP:
        per_color_combos = []
        for ci in range(r):
            if ci == 0 and n % 2 == 0:
                combos = list(itertools.combinations(range(1, n), size0))
            else:
                combos = list(itertools.combinations(range(n), size0))
            per_color_combos.append(np.array(combos))
        sums = [arrays[ci][per_color_combos[ci]].sum(axis=1) for ci in range(r)]
        counts = [s.shape[0] for s in sums]
        m = int(np.prod(counts))
        best_gap, best_flat = math.inf, 0
        for start in range(0, m, _CHUNK):
            flat = np.arange(start, min(start + _CHUNK, m))
            picks = np.unravel_index(flat, counts)
            acc = sums[0][picks[0]]
            for ci in range(1, r):
                acc = acc + sums[ci][picks[ci]]
            d0 = _norms_matrix(space, acc / (r * size0) - c_all)
            d1 = _norms_matrix(space, (total - acc) / (r * size1) - c_all)
            gaps = np.maximum(d0, d1)
            j = int(np.argmin(gaps))
            if gaps[j] < best_gap:
                best_gap, best_flat = float(gaps[j]), int(flat[j])
        picks = np.unravel_index(best_flat, counts)
        sel0 = tuple(
            tuple(int(i) for i in per_color_combos[ci][picks[ci]]) for ci in range(r)
        )
        if not meets_bound(best_gap, bound):
            raise TheoremViolationError(
                f"exhaustive colored split gap {best_gap:.6g} misses the bound "
                f"{bound:.6g}",
                achieved=best_gap,
                bound=bound,
            )
        sel1 = tuple(
            tuple(i for i in range(n) if i not in set(sel0[ci])) for ci in range(r)
        )
        return sel0, sel1, best_gap, bound, "exhaustive", 0

    best_gap = math.inf
    for trial in range(budget):
        rng = substream(seed, *path, trial)
        sel0 = []
        acc = np.zeros(stacked.shape[1])
        for ci in range(r):
            perm = rng.permutation(n)
            p0 = np.sort(perm[:size0])
            sel0.append(tuple(int(i) for i in p0))
            acc += arrays[ci][p0].sum(axis=0)
        d0 = float(_norms_matrix(space, (acc / (r * size0) - c_all)[None, :])[0])
        d1 = float(
            _norms_matrix(space, ((total - acc) / (r * size1) - c_all)[None, :])[0]
        )
        gap = max(d0, d1)
        best_gap = min(best_gap, gap)
        if meets_bound(gap, bound):
            sel1 = tuple(
                tuple(i for i in range(n) if i not in set(sel0[ci]))
                for ci in range(r)
            )
            return tuple(sel0), sel1, gap, bound, "sampled", trial + 1
    raise BoundMissError(
        f"no sampled colored split met the bound {bound:.6g} within {budget} "
        f"trials (best gap {best_gap:.6g})",
        achieved=best_gap,
        bound=bound,
    )


def colored_balanced_split(
    space: NormSpec,
    cset: ColoredPointSet,
    budget: int = DEFAULT_SPLIT_BUDGET,
    seed: int = 0,
) -> BalancedSplit:
    """Per-color balanced split of a colored set; indices are global
    (classes concatenated in color order)."""
    n = cset.class_size
    if n < 2:
        raise InputError(f"need at least 2 points per color, got {n}")
    arrays = [c.coords for c in cset.classes]
    sel0, sel1, gap, bound, method, trials = _colored_split_core(
        space, arrays, budget, seed, ()
    )
    part0 = tuple(ci * n + i for ci in range(cset.r) for i in sel0[ci])
    part1 = tuple(ci * n + i for ci in range(cset.r) for i in sel1[ci])
    return BalancedSplit(part0, part1, (n // 2, n - n // 2), gap, bound, method, trials)


def colorful_tverberg(
    space: NormSpec,
    cset: ColoredPointSet,
    seed: int = 0,
    tol: float | None = None,
    budget: int = DEFAULT_SPLIT_BUDGET,
) -> TverbergPartition:
    """Partition a colored set into transversals around its centroid.

    Recursively halves every color class until each leaf holds exactly one
    point per color; every leaf hull's distance to the root centroid is
    then certified against C(X) r^w D with D the largest class diameter.
    """
    r, k = cset.r, cset.class_size
    D = cset.max_class_diameter(space)
    bound = theorem_bound(space, "tverberg", r, D)
    stacked = cset.stacked()
    q = centroid(stacked)
    if tol is None:
        tol = 1e-6 * D if D > 0 else 1e-12

    parts: list[tuple] = []
    nodes: list[TreeNode] = []

    def recurse(local_idx, path):
        size = len(local_idx[0])
        if size == 1:
            parts.append(
                tuple(sorted(ci * k + idxs[0] for ci, idxs in enumerate(local_idx)))
            )
            return
        arrays = [
            cset.classes[ci].coords[list(idxs)] for ci, idxs in enumerate(local_idx)
        ]
        sel0, sel1, gap, nbound, method, _ = _colored_split_core(
            space, arrays, budget, seed, path
        )
        nodes.append(TreeNode(path, size, gap, nbound, method))
        child0 = [
            tuple(local_idx[ci][i] for i in sel0[ci]) for ci in range(r)
        ]
        child1 = [
            tuple(local_idx[ci][i] for i in sel1[ci]) for ci in range(r)
        ]
        recurse(child0, path + (0,))
        recurse(child1, path + (1,))

    recurse([tuple(range(k))] * r, ())

    certificates = []
    for part in parts:
        cert = dist_to_hull(space, q, stacked.subset(part), tol=tol)
        if not meets_bound(cert.upper, bound):
            raise CertificationError(
                f"part {part} certified at distance >= {cert.lower:.6g} "
                f"(upper {cert.upper:.6g}), above the bound {bound:.6g}",
                part=part,
                interval=(cert.lower, cert.upper),
                bound=bound,
            )
        certificates.append(cert)

    depth = max((len(node.path) for node in nodes), default=-1) + 1
    return TverbergPartition(
        center_q=q,
        parts=tuple(parts),
        certificates=tuple(certificates),
        bound=bound,
        tree_depth=depth,
        tree=tuple(nodes),
        r_colors=r,
        diameter=D,
    )


def uncolored_tverberg(
    space: NormSpec,
    points: PointSet,
    k: int,
    seed: int = 0,
    tol: float | None = None,
    budget: int = DEFAULT_SPLIT_BUDGET,
) -> TverbergPartition:
    """Partition any point set into k parts hull-close to a common center.

    Drops the last s = n - k * floor(n/k) points, colors the rest into
    r = floor(n/k) contiguous classes of size k, partitions those, then
    reinserts each dropped point into the currently smallest part.
    Certifies against C(X) r^w diam(P) and also reports the
    (k/n)^w diam(P) form.
    """
    if not isinstance(points, PointSet):
        points = PointSet(points)
    n = len(points)
    k = int(k)
    if not 1 <= k <= n:
        raise InputError(f"need 1 <= k <= {n}, got {k}")
    if points.has_duplicates():
        raise InputError("points must be pairwise distinct")
    r = n // k
    s = n - k * r
    kept = n - s
    classes = [
        PointSet(points.coords[ci * k : (ci + 1) * k]) for ci in range(r)
    ]
    inner = colorful_tverberg(
        space, ColoredPointSet(tuple(classes)), seed=seed, tol=tol, budget=budget
    )

    parts = [list(p) for p in inner.parts]
    for del_idx in range(kept, n):
        target = min(range(len(parts)), key=lambda i: (len(parts[i]), i))
        parts[target].append(del_idx)
    parts = [tuple(sorted(p)) for p in parts]

    diam_p = diameter(space, points)
    bound = theorem_bound(space, "tverberg", r, diam_p)
    corollary_bound = (
        bound_constant(space, "tverberg") * (k / n) ** space.w * diam_p
    )
    if tol is None:
        tol = 1e-6 * diam_p if diam_p > 0 else 1e-12

    certificates = []
    for i, part in enumerate(parts):
        if len(part) == len(inner.parts[i]):
            cert = inner.certificates[i]
        else:
            cert = dist_to_hull(space, inner.center_q, points.subset(part), tol=tol)
        if not meets_bound(cert.upper, bound):
            raise CertificationError(
                f"part {part} certified above the bound {bound:.6g}",
                part=part,
                interval=(cert.lower, cert.upper),
                bound=bound,
            )
        certificates.append(cert)

    return TverbergPartition(
        center_q=inner.center_q,
        parts=tuple(parts),
        certificates=tuple(certificates),
        bound=bound,
        tree_depth=inner.tree_depth,
        tree=inner.tree,
        r_colors=r,
        diameter=diam_p,
        corollary_bound=corollary_bound,
        reinserted=tuple(range(kept, n)),
    )
