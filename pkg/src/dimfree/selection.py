"""Selection of a well-pierced center and greedy weak epsilon-nets.

The selection search partitions the input around a center q, then turns
every nondecreasing index multiset of parts into a distinct transversal
whose hull provably meets B(q, radius).  The net construction repeatedly
applies selection to a subset whose hull all current net points miss.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import CapacityError, InputError, TheoremViolationError
from .geometry import classify_ball, dist_to_hull
from .maurey import DEFAULT_TRIALS, colored_caratheodory, convex_witness
from .partition import uncolored_tverberg
from .seeding import derive_seed, substream
from .space import NormSpec, PointSet, diameter, theorem_bound

MULTISET_CAP = 100_000
SUBSET_CAP = 1_000_000
TUPLE_CAP = 1_000_000

_TV_TAG = 7
_CC_TAG = 11
_MS_TAG = 13
_NET_TAG = 17
_DRAW_TAG = 19


@dataclass(frozen=True)
class SelectionResult:
    """Center q and the distinct r-tuples certified to meet B(q, radius)."""

    center_q: np.ndarray
    radius: float
    certified_tuples: int
    required: float
    tuple_witnesses: tuple
    mode: str
    gamma: float


@dataclass(frozen=True)
class NetRound:
    violator: tuple
    center: np.ndarray
    deleted: tuple


@dataclass(frozen=True)
class NetResult:
    """Net points F with the covering radius and the greedy loop's log.

    In exhaustive mode every subset of the target size was certified
    against F; in sampled mode only the tested subsets were.
    """

    net_points: tuple
    radius: float
    size_bound: float
    mode: str
    violator_log: tuple


def _fill_transversal(chosen_by_slot, multiset, parts):
    """Distinct r-element tuple: sampled points first, then lowest global
    indices of each part up to its multiplicity."""
    by_part: dict[int, set] = {}
    mult: dict[int, int] = {}
    for slot, j in enumerate(multiset):
        by_part.setdefault(j, set()).add(parts[j][chosen_by_slot[slot]])
        mult[j] = mult.get(j, 0) + 1
    out: set[int] = set()
    for j, m in mult.items():
        have = by_part[j]
        for g in parts[j]:
            if len(have) >= m:
                break
            have.add(g)
        out |= have
    return tuple(sorted(out))


def selection(
    space: NormSpec,
    points: PointSet,
    r: int,
    seed: int = 0,
    trials: int = DEFAULT_TRIALS,
    tol: float | None = None,
) -> SelectionResult:
    """Find q whose ball B(q, radius) meets at least r^-r * C(n, r)
    distinct r-tuple hulls of the input.

    Partitions into k = floor(n/r) parts around q, then certifies one
    transversal per nondecreasing multiset of part indices; multisets are
    enumerated exhaustively up to C(k+r-1, r) <= 1e5 and sampled beyond.
    """
    if not isinstance(points, PointSet):
        points = PointSet(points)
    n = len(points)
    r = int(r)
    if not 1 <= r <= n:
        raise InputError(f"need 1 <= r <= {n}, got {r}")
    D = diameter(space, points)
    gamma = theorem_bound(space, "tverberg", r, D)
    radius = theorem_bound(space, "selection_or_net", r, D)
    cert_tol = 1e-6 * D if D > 0 else 1e-12

    k = n // r
    tv = uncolored_tverberg(space, points, k, seed=derive_seed(seed, _TV_TAG), tol=tol)
    q = tv.center_q
    parts = tv.parts

    count = comb(k + r - 1, r)
    required = comb(n, r) / r**r
    exhaustive = count <= MULTISET_CAP
    if exhaustive:
        multisets = itertools.combinations_with_replacement(range(k), r)
        mode = "exhaustive"
    else:
        rng = substream(seed, _MS_TAG)
        budget = min(count, MULTISET_CAP)
        seen: set[tuple] = set()
        draws = []
        while len(draws) < budget:
            ms = tuple(sorted(int(x) for x in rng.integers(0, k, size=r)))
            if ms not in seen:
                seen.add(ms)
                draws.append(ms)
        multisets = iter(draws)
        mode = "sampled"

    witness_cache: dict[int, np.ndarray] = {}

    def witness_for(j):
        if j not in witness_cache:
            w = convex_witness(space, q, points.subset(parts[j]), tol=gamma)
            if w is None:
                raise TheoremViolationError(
                    f"part {j} has no hull point within gamma={gamma:.6g} of q"
                )
            witness_cache[j] = w
        return witness_cache[j]

    certified: set[tuple] = set()
    witnesses = []
    for mi, ms in enumerate(multisets):
        classes = [points.subset(parts[j]) for j in ms]
        sa = colored_caratheodory(
            space,
            classes,
            q,
            eta=gamma,
            k=1,
            trials=trials,
            seed=derive_seed(seed, _CC_TAG, mi),
            _witnesses=[witness_for(j) for j in ms],
        )
        chosen_by_slot = [sa.chosen[slot][0] for slot in range(r)]
        tup = _fill_transversal(chosen_by_slot, ms, parts)
        if tup in certified:
            continue
        cert = dist_to_hull(space, q, points.subset(tup), tol=cert_tol)
        if classify_ball(cert, radius) == "yes":
            certified.add(tup)
            witnesses.append((tup, cert))
    if exhaustive and len(certified) < required:
        raise TheoremViolationError(
            f"only {len(certified)} certified tuples, below the required "
            f"{required:.6g}",
            achieved=float(len(certified)),
            bound=required,
        )
    return SelectionResult(
        center_q=q,
        radius=radius,
        certified_tuples=len(certified),
        required=required,
        tuple_witnesses=tuple(witnesses),
        mode=mode,
        gamma=gamma,
    )


def weak_epsnet(
    space: NormSpec,
    points: PointSet,
    r: int,
    epsilon: float,
    mode: str = "exhaustive",
    seed: int = 0,
    sample_budget: int = 512,
    tol: float | None = None,
) -> NetResult:
    """Greedy weak epsilon-net: add selection centers until no subset of
    size ceil(eps * n) has its hull farther than ``radius`` from F.

    Exhaustive mode scans every such subset (certifying the net property);
    sampled mode draws ``sample_budget`` subsets per round and certifies
    only that no tested subset was missed.
    """
    if not isinstance(points, PointSet):
        points = PointSet(points)
    n = len(points)
    r = int(r)
    if not 1 <= r <= n:
        raise InputError(f"need 1 <= r <= {n}, got {r}")
    epsilon = float(epsilon)
    if not 0.0 < epsilon <= 1.0:
        raise InputError(f"need 0 < epsilon <= 1, got {epsilon}")
    if mode not in ("exhaustive", "sampled"):
        raise InputError(f"mode must be exhaustive or sampled, got {mode!r}")

    D = diameter(space, points)
    radius = theorem_bound(space, "selection_or_net", r, D)
    cert_tol = 1e-6 * D if D > 0 else 1e-12
    y_size = math.ceil(epsilon * n)
    n_subsets = comb(n, y_size)
    if mode == "exhaustive" and n_subsets > SUBSET_CAP:
        raise CapacityError(
            f"exhaustive mode scans {n_subsets} subsets (cap {SUBSET_CAP}); "
            f"use sampled mode",
            count=n_subsets,
        )
    size_bound = float(r) ** r * epsilon ** (-r)
    size_limit = math.floor(size_bound + 1e-9)

    track_tuples = comb(n, r) <= TUPLE_CAP
    family: set[tuple] = (
        set(itertools.combinations(range(n), r)) if track_tuples else set()
    )

    F: list[np.ndarray] = []
    log = []
    # -1 marks covered; otherwise the next net-point index to test against
    progress: dict[tuple, int] = {}

    def is_violator(Y):
        start = progress.get(Y, 0)
        for j in range(start, len(F)):
            cert = dist_to_hull(space, F[j], points.subset(Y), tol=cert_tol)
            verdict = classify_ball(cert, radius)
            if verdict == "yes":
                progress[Y] = -1
                return False
            if verdict == "unknown":
                progress[Y] = j
                return False
        progress[Y] = len(F)
        return True

    round_idx = 0
    while True:
        violator = None
        if mode == "exhaustive":
            for Y in itertools.combinations(range(n), y_size):
                if progress.get(Y, 0) == -1:
                    continue
                if is_violator(Y):
                    violator = Y
                    break
        else:
            rng = substream(seed, _DRAW_TAG, round_idx)
            for _ in range(sample_budget):
                Y = tuple(sorted(int(i) for i in rng.choice(n, y_size, replace=False)))
                if progress.get(Y, 0) == -1:
                    continue
                if is_violator(Y):
                    violator = Y
                    break
        if violator is None:
            break
        if len(F) >= size_limit:
            raise TheoremViolationError(
                f"net would exceed its size bound {size_bound:.6g}",
                achieved=float(len(F) + 1),
                bound=size_bound,
            )
        sel = selection(
            space,
            points.subset(violator),
            r,
            seed=derive_seed(seed, _NET_TAG, round_idx),
            tol=tol,
        )
        f_new = sel.center_q
        F.append(f_new)
        deleted = []
        for Q in itertools.combinations(violator, r):
            if track_tuples and Q not in family:
                continue
            cert = dist_to_hull(space, f_new, points.subset(Q), tol=cert_tol)
            if classify_ball(cert, radius) == "yes":
                if track_tuples:
                    family.discard(Q)
                deleted.append(Q)
        log.append(NetRound(violator, f_new, tuple(deleted)))
        round_idx += 1

    return NetResult(
        net_points=tuple(F),
        radius=radius,
        size_bound=size_bound,
        mode=mode,
        violator_log=tuple(log),
    )
