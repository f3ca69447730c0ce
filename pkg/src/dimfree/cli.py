"""Batch front door: parse point files, run one operation, emit a JSON report.

Every invocation produces a RunReport with the input digest, the norm
configuration, the seed, and a bound check, so runs are reproducible and
machine-checkable.  Exit codes: 0 pass, 1 input error, 2 bound miss.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import math
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .combinatorics import gamma_coefficient_exact
from .errors import BoundMissError, CapacityError, InputError
from .geometry import dist_to_hull
from .maurey import colored_caratheodory
from .partition import balanced_split, colored_balanced_split, colorful_tverberg, uncolored_tverberg
from .seeding import derive_seed
from .selection import selection, weak_epsnet
from .space import (
    BOUND_REL_SLACK,
    ColoredPointSet,
    NormSpec,
    PointSet,
    diameter,
    meets_bound,
    theorem_bound,
)


def _parse_q(value):
    if isinstance(value, str):
        if value.lower() in ("inf", "infinity", "oo"):
            return math.inf
        raise InputError(f"unrecognized q value {value!r}")
    return float(value)


def _norm_spec_from_dict(d, fallback):
    if d is None:
        return fallback
    if not isinstance(d, dict):
        raise InputError("'norm' must be an object")
    q = _parse_q(d.get("q", fallback.q_norm))
    return NormSpec(q, d.get("type_p"), d.get("type_constant"))


def _points_from_rows(rows, colors):
    if not rows:
        raise InputError("input contains no points")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise InputError(f"ragged point dimensions: {sorted(widths)}")
    coords = np.asarray(rows, dtype=np.float64)
    if colors is None:
        return PointSet(coords, labels=tuple(range(len(rows))))
    if len(colors) != len(rows):
        raise InputError("colors length must match point count")
    ids = sorted(set(colors))
    classes = []
    for cid in ids:
        idx = [i for i, c in enumerate(colors) if c == cid]
        classes.append(PointSet(coords[idx], labels=tuple(idx)))
    sizes = {len(c) for c in classes}
    if len(sizes) != 1:
        raise InputError(
            f"unequal color class sizes {sorted(len(c) for c in classes)}"
        )
    return ColoredPointSet(tuple(classes))


def parse_input(path, default_norm=None):
    """Read a JSON or CSV point file into (NormSpec, PointSet-or-Colored)."""
    fallback = default_norm or NormSpec(2.0)
    try:
        raw = open(path, "rb").read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    text = raw.decode("utf-8")
    if str(path).endswith(".csv"):
        reader = csv.reader(text.splitlines())
        try:
            header = next(reader)
        except StopIteration:
            raise InputError("empty CSV input") from None
        has_color = header and header[-1].strip().lower() == "color"
        rows, colors = [], [] if has_color else None
        for line in reader:
            if not line:
                continue
            try:
                if has_color:
                    rows.append([float(x) for x in line[:-1]])
                    colors.append(int(line[-1]))
                else:
                    rows.append([float(x) for x in line])
            except ValueError as exc:
                raise InputError(f"malformed CSV row {line!r}: {exc}") from exc
        return fallback, _points_from_rows(rows, colors)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict) or "points" not in doc:
        raise InputError("JSON input must be an object with a 'points' array")
    space = _norm_spec_from_dict(doc.get("norm"), fallback)
    rows = doc["points"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InputError("'points' must be a list of coordinate lists")
    colors = doc.get("colors")
    return space, _points_from_rows(rows, colors)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return [_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    return obj


def _digest(path):
    h = hashlib.sha256()
    h.update(open(path, "rb").read())
    return "sha256:" + h.hexdigest()


def _digest_params(*parts):
    h = hashlib.sha256()
    h.update("|".join(str(p) for p in parts).encode())
    return "sha256:" + h.hexdigest()


def _norm_echo(space):
    return {
        "q": "inf" if math.isinf(space.q_norm) else space.q_norm,
        "type_p": space.type_exponent,
        "type_constant": space.type_constant,
        "w": space.w,
    }


def _bound_check(theoretical, achieved):
    return {
        "theoretical": theoretical,
        "achieved": achieved,
        "pass": meets_bound(achieved, theoretical),
    }


def _as_colored(data):
    if isinstance(data, ColoredPointSet):
        return data
    return ColoredPointSet((data,))


def _as_stacked(data):
    if isinstance(data, ColoredPointSet):
        return data.stacked()
    return data


def _load_vector(path, dim):
    doc = json.loads(open(path).read())
    if isinstance(doc, dict):
        doc = doc.get("point", doc.get("target"))
    arr = np.asarray(doc, dtype=np.float64)
    if arr.shape != (dim,):
        raise InputError(f"vector in {path} must have dimension {dim}")
    return arr


def _cmd_gamma(args, _env):
    g = gamma_coefficient_exact(args.n, args.d)
    result = {"n": args.n, "d": args.d, "rational": g, "decimal": float(g)}
    return result, None, _digest_params("gamma", args.n, args.d)


def _cmd_split(args, env):
    space, data = env
    if isinstance(data, ColoredPointSet) and data.r > 1:
        res = colored_balanced_split(space, data, budget=args.budget, seed=args.seed)
    else:
        res = balanced_split(
            space, _as_stacked(data), budget=args.budget, seed=args.seed
        )
    return res, _bound_check(res.bound, res.gap), None


def _cmd_tverberg(args, env):
    space, data = env
    res = colorful_tverberg(space, _as_colored(data), seed=args.seed, tol=args.tol)
    return res, _bound_check(res.bound, res.max_certified_distance), None


def _cmd_tverberg_uncolored(args, env):
    space, data = env
    res = uncolored_tverberg(
        space, _as_stacked(data), args.k, seed=args.seed, tol=args.tol
    )
    return res, _bound_check(res.bound, res.max_certified_distance), None


def _cmd_caratheodory(args, env):
    space, data = env
    classes = data.classes if isinstance(data, ColoredPointSet) else (data,)
    target = _load_vector(args.target, classes[0].dim)
    res = colored_caratheodory(
        space,
        list(classes),
        target,
        eta=args.eta,
        k=args.k,
        trials=args.trials,
        seed=args.seed,
    )
    return res, _bound_check(res.bound, res.achieved_error), None


def _cmd_dist(args, env):
    space, data = env
    points = _as_stacked(data)
    query = _load_vector(args.query, points.dim)
    res = dist_to_hull(space, query, points, tol=args.tol)
    return res, None, None


def _cmd_select(args, env):
    space, data = env
    res = selection(space, _as_stacked(data), args.r, seed=args.seed, tol=args.tol)
    max_upper = max((c.upper for _, c in res.tuple_witnesses), default=0.0)
    check = _bound_check(res.radius, max_upper)
    check["certified_tuples"] = res.certified_tuples
    check["required"] = res.required
    check["pass"] = bool(check["pass"] and res.certified_tuples >= res.required)
    return res, check, None


def _cmd_epsnet(args, env):
    space, data = env
    res = weak_epsnet(
        space,
        _as_stacked(data),
        args.r,
        args.eps,
        mode=args.mode,
        seed=args.seed,
        sample_budget=args.sample_budget,
    )
    return res, _bound_check(res.size_bound, float(len(res.net_points))), None


def _cmd_verify_sweep(args, _env):
    from .seeding import substream
    from .space import centroid, norms

    space = NormSpec(2.0)
    dims = [int(x) for x in args.dims.split(",") if x]
    if not dims:
        raise InputError("need at least one dimension")
    per_dim = {}
    xs, ys = [], []
    for dim in dims:
        ratios = []
        max_dists = []
        for t in range(args.trials):
            rng = substream(args.seed, dim, t)
            classes = []
            for _ in range(args.r):
                raw = rng.standard_normal((args.k, dim))
                raw /= np.maximum(norms(space, raw), 1e-12)[:, None]
                raw *= rng.uniform(0, 1, size=args.k)[:, None] ** (1.0 / dim)
                classes.append(PointSet(raw))
            cset = ColoredPointSet(tuple(classes))
            D = cset.max_class_diameter(space)
            if D <= 0:
                continue
            scaled = ColoredPointSet(
                tuple(PointSet(c.coords / D) for c in cset.classes)
            )
            res = colorful_tverberg(space, scaled, seed=derive_seed(args.seed, dim, t))
            dist = res.max_certified_distance
            ratios.append(dist / res.bound)
            max_dists.append(dist)
            xs.append(math.log(dim))
            ys.append(dist)
        per_dim[str(dim)] = {
            "max_ratio": max(ratios),
            "mean_max_distance": float(np.mean(max_dists)),
        }
    slope = float(np.polyfit(xs, ys, 1)[0]) if len(set(xs)) > 1 else 0.0
    worst = max(v["max_ratio"] for v in per_dim.values())
    result = {
        "dims": per_dim,
        "slope_vs_log_dim": slope,
        "r": args.r,
        "k": args.k,
    }
    check = _bound_check(1.0, worst)
    return result, check, _digest_params(
        "verify-sweep", args.dims, args.trials, args.r, args.k, args.seed
    )


_INPUT_FREE = {"gamma", "verify-sweep"}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dimfree",
        description="Certified dimension-free convex geometry searches",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="JSON or CSV point file")
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap (execution is currently sequential)")

    p = sub.add_parser("gamma", help="balanced-subset shrink coefficient")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    common(p, needs_input=False)

    p = sub.add_parser("split", help="balanced centroid split")
    common(p)
    p.add_argument("--budget", type=int, default=256)

    p = sub.add_parser("tverberg", help="colored transversal partition")
    common(p)
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("tverberg-uncolored", help="partition into k parts")
    common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("caratheodory", help="sparse hull approximation")
    common(p)
    p.add_argument("--target", required=True, help="JSON vector file")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=64)

    p = sub.add_parser("dist", help="certified distance to a hull")
    common(p)
    p.add_argument("--query", required=True, help="JSON vector file")
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("select", help="selection of a well-pierced center")
    common(p)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("epsnet", help="greedy weak epsilon-net")
    common(p)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    p.add_argument("--sample-budget", type=int, default=512, dest="sample_budget")

    p = sub.add_parser("verify-sweep", help="dimension-independence sweep")
    p.add_argument("--dims", default="2,10,100")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--k", type=int, default=4)
    common(p, needs_input=False)

    return parser


_HANDLERS = {
    "gamma": _cmd_gamma,
    "split": _cmd_split,
    "tverberg": _cmd_tverberg,
    "tverberg-uncolored": _cmd_tverberg_uncolored,
    "caratheodory": _cmd_caratheodory,
    "dist": _cmd_dist,
    "select": _cmd_select,
    "epsnet": _cmd_epsnet,
    "verify-sweep": _cmd_verify_sweep,
}


def _emit(report, out_path):
    text = json.dumps(_jsonable(report), sort_keys=True, indent=2)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def run(argv) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    report = {"subcommand": args.subcommand, "seed": getattr(args, "seed", 0)}
    try:
        env = None
        if args.subcommand not in _INPUT_FREE:
            space, data = parse_input(args.input)
            env = (space, data)
            report["input_digest"] = _digest(args.input)
            report["norm"] = _norm_echo(space)
        else:
            report["norm"] = _norm_echo(NormSpec(2.0))
        result, check, digest = _HANDLERS[args.subcommand](args, env)
        if digest is not None:
            report["input_digest"] = digest
        report["result"] = result
        report["bound_check"] = check
        report["wall_clock"] = time.perf_counter() - started
        _emit(report, args.out)
        if check is not None and not check["pass"]:
            return 2
        return 0
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except (BoundMissError, CapacityError) as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        report["wall_clock"] = time.perf_counter() - started
        _emit(report, args.out)
        print(f"bound miss: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
