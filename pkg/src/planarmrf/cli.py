"""Command-line interface.

Subcommands: solve (model JSON -> assignment JSON), stereo (PPM pair ->
disparity PGM), cc (clustering JSON -> clusters JSON), sweep (epsilon
list -> CSV of runtimes), gen (fixture generators). Exit codes: 0 on
success, 2 for invalid inputs or usage, 1 for internal failures. All
output files are written atomically; reported wall times exclude file
I/O.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import formats, netpbm
from .branch import build_heuristic, debug_dump, root_at
from .errors import InputError, PlanarMRFError
from .exact import DEFAULT_WIDTH_CAP, solve_exact
from .graph import complete_graph, cycle_graph, grid_graph
from .mrf import (
    evaluate,
    is_nonnegative,
    random_instance,
    shift_nonnegative,
    validate,
)
from .ptas import PtasConfig, choose_k, solve_ptas
from .reductions import (
    CCEdge,
    CCInstance,
    best_clustering_exhaustive,
    cc_to_mrf,
    cc_value,
    coloring_gadget,
    labels_to_clustering,
    maxcut_gadget,
)
from .vision import (
    StereoParams,
    build_stereo_instance,
    labels_to_gray,
    mislabel_rate,
    scene_fixture,
    solve_stereo,
)


def _epsilon_arg(text):
    try:
        return _parse_epsilon(text)
    except InputError as e:
        raise argparse.ArgumentTypeError(str(e))


def _common_solver_flags(p):
    p.add_argument("--epsilon", type=_epsilon_arg, default=0.5)
    p.add_argument("--root", type=int, default=None)
    p.add_argument("--width-cap", type=int, default=DEFAULT_WIDTH_CAP)
    p.add_argument("--workers", type=int, default=1)


def _validated_model(path):
    instance = formats.load_model(path)
    violations = validate(instance)
    if violations:
        raise InputError(
            "invalid model:\n  " + "\n  ".join(violations)
        )
    return instance


def cmd_solve(args):
    instance = _validated_model(args.model)
    offset = 0.0
    work = instance
    if args.shift:
        work, offset = shift_nonnegative(instance)
    if args.exact:
        t0 = time.perf_counter()
        decomp = None
        if work.graph.num_edges > 1:
            decomp = build_heuristic(work.graph)
        labels, score = solve_exact(work, decomp, args.width_cap)
        ms = (time.perf_counter() - t0) * 1000.0
        if args.dump_decomp:
            if decomp is not None:
                doc = debug_dump(root_at(decomp))
            else:
                doc = {"root": 0, "parent": [-1], "leaf_edge": {"0": 0} if work.graph.num_edges else {}}
            formats.atomic_write_text(args.dump_decomp, json.dumps(doc) + "\n")
        width = decomp.measured_width if decomp is not None else 0
        print(f"exact score {score + offset:.6f} width {width} wall_ms {ms:.1f}")
    else:
        if args.dump_decomp:
            raise InputError("--dump-decomp requires --exact")
        if not is_nonnegative(work):
            raise InputError(
                "model has negative entries; pass --shift to solve the "
                "shifted instance and report offset-corrected scores"
            )
        cfg = PtasConfig(
            epsilon=args.epsilon,
            root=args.root,
            width_cap=args.width_cap,
            workers=args.workers,
        )
        t0 = time.perf_counter()
        labels, score, diag = solve_ptas(work, cfg)
        ms = (time.perf_counter() - t0) * 1000.0
        print(
            f"ptas score {score + offset:.6f} k {diag.k} chosen_j {diag.chosen_j} "
            f"max_width {diag.max_width} wall_ms {ms:.1f}"
        )
    if args.shift:
        print(f"shift offset {offset:.6f}")
    formats.save_labels(labels, args.out)
    original_score = evaluate(instance, labels)
    print(f"assignment written to {args.out} (score on input model {original_score:.6f})")
    return 0


def cmd_stereo(args):
    left = netpbm.read_ppm(args.left)
    right = netpbm.read_ppm(args.right)
    params = StereoParams(
        num_labels=args.labels,
        beta=args.beta,
        two_pass=args.two_pass,
        smooth_radius=args.smooth,
    )
    t0 = time.perf_counter()
    grid, score, diags = solve_stereo(
        left,
        right,
        params,
        epsilon=args.epsilon,
        root=args.root,
        width_cap=args.width_cap,
        workers=args.workers,
    )
    ms = (time.perf_counter() - t0) * 1000.0
    gray = labels_to_gray(grid, args.labels)
    # Atomic write: render to bytes first.
    h, w = gray.shape
    payload = f"P5\n{w} {h}\n255\n".encode("ascii") + gray.tobytes()
    formats.atomic_write_bytes(args.out, payload)
    print(f"stereo score {score:.6f} passes {len(diags)} wall_ms {ms:.1f}")
    if args.truth:
        truth_gray = netpbm.read_pgm(args.truth)
        truth = _gray_to_labels(truth_gray, args.labels)
        rate = mislabel_rate(grid, truth, tolerance=args.tolerance)
        print(f"mislabel_rate {rate:.4f} (tolerance {args.tolerance})")
    print(f"disparity written to {args.out}")
    return 0


def _gray_to_labels(gray, num_labels):
    if num_labels == 1:
        return np.ones(gray.shape, dtype=np.int64)
    return np.rint(gray.astype(np.float64) * (num_labels - 1) / 255.0).astype(np.int64) + 1


def cmd_cc(args):
    cc = formats.load_cc(args.input)
    cfg = PtasConfig(
        epsilon=args.epsilon,
        root=args.root,
        width_cap=args.width_cap,
        workers=args.workers,
    )
    mrf = cc_to_mrf(cc)
    t0 = time.perf_counter()
    labels, _, diag = solve_ptas(mrf, cfg)
    clusters = labels_to_clustering(cc, labels)
    value = cc_value(cc, clusters)
    ms = (time.perf_counter() - t0) * 1000.0
    formats.save_clusters(clusters, args.out)
    print(f"cc value {value:.6f} clusters {int(clusters.max()) + 1} wall_ms {ms:.1f}")
    if args.verify:
        _, best = best_clustering_exhaustive(cc)
        bound = (1.0 - 1.0 / choose_k(args.epsilon)) * best
        ok = value >= bound - 1e-9
        print(
            f"verify: value {value:.6f} vs optimum {best:.6f} "
            f"(bound {bound:.6f}): {'OK' if ok else 'FAIL'}"
        )
        if not ok:
            raise PlanarMRFError("clustering value fell below the guarantee")
    return 0


def _parse_epsilon(text):
    """Decimal or fraction. "1/3" stays exactly a third, which decimal
    notation cannot say and ceil(1/epsilon) is sensitive to."""
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            return float(num) / float(den)
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad epsilon {text!r}")


def _parse_epsilons(text):
    eps = [_parse_epsilon(x) for x in text.split(",") if x.strip()]
    if not eps:
        raise InputError("empty epsilon list")
    return eps


def cmd_sweep(args):
    if args.model:
        instance = _validated_model(args.model)
    elif args.left and args.right:
        left = netpbm.read_ppm(args.left)
        right = netpbm.read_ppm(args.right)
        instance = build_stereo_instance(
            left, right, StereoParams(num_labels=args.labels, beta=args.beta)
        )
    else:
        raise InputError("sweep needs --model or both --left and --right")
    if not is_nonnegative(instance):
        raise InputError("sweep input must be nonnegative; shift it first")
    eps_list = _parse_epsilons(args.epsilons)
    L = instance.num_labels
    rows = []
    for eps in eps_list:
        cfg = PtasConfig(
            epsilon=eps,
            root=args.root,
            width_cap=args.width_cap,
            workers=args.workers,
        )
        t0 = time.perf_counter()
        _, score, diag = solve_ptas(instance, cfg)
        ms = (time.perf_counter() - t0) * 1000.0
        rows.append((eps, diag.k, score, ms, diag.max_width))
        print(
            f"epsilon {eps:.6g} k {diag.k} score {score:.6f} "
            f"wall_ms {ms:.1f} max_width {diag.max_width}"
        )
    for (e1, k1, _, ms1, _), (e2, k2, _, ms2, _) in zip(rows, rows[1:]):
        predicted = (k2 * L**k2) / (k1 * L**k1)
        observed = ms2 / ms1 if ms1 > 0 else float("inf")
        print(
            f"ratio {e1:.6g}->{e2:.6g}: observed {observed:.2f} "
            f"predicted {predicted:.2f}"
        )
    if args.csv:
        lines = ["epsilon,k,score,wall_ms,max_width"]
        for eps, k, score, ms, width in rows:
            lines.append(f"{eps:.6g},{k},{score:.6f},{ms:.3f},{width}")
        formats.atomic_write_text(args.csv, "\n".join(lines) + "\n")
        print(f"csv written to {args.csv}")
    return 0


def _gen_graph(args):
    if args.graph == "cycle":
        return cycle_graph(args.n)
    if args.graph == "complete":
        return complete_graph(args.n)
    if args.graph == "grid":
        return grid_graph(args.height, args.width)
    raise InputError(f"unknown graph kind {args.graph!r}")


def cmd_gen(args):
    if args.kind == "grid":
        instance = random_instance(
            args.height,
            args.width,
            args.labels,
            args.low,
            args.high,
            args.seed,
            extra_edge_prob=args.extra_edge_prob,
        )
        formats.save_model(instance, args.out)
        print(
            f"model with {instance.graph.num_vertices} vertices, "
            f"{instance.graph.num_edges} edges written to {args.out}"
        )
        return 0
    if args.kind == "cc":
        rng = np.random.default_rng(args.seed)
        base = random_instance(args.height, args.width, 2, 0, 1, args.seed)
        edges = [
            CCEdge(
                u=u,
                v=v,
                p=int(rng.integers(0, 2)),
                w=float(rng.integers(0, args.high + 1)),
            )
            for u, v in base.graph.edges
        ]
        cc = CCInstance(num_vertices=base.graph.num_vertices, edges=edges)
        formats.save_cc(cc, args.out)
        print(f"clustering instance with {len(edges)} edges written to {args.out}")
        return 0
    if args.kind == "maxcut":
        instance = maxcut_gadget(_gen_graph(args))
        formats.save_model(instance, args.out)
        print(f"max-cut model written to {args.out}")
        return 0
    if args.kind == "coloring":
        instance = coloring_gadget(_gen_graph(args))
        formats.save_model(instance, args.out)
        print(f"coloring model written to {args.out} (negative entries; use --exact)")
        return 0
    if args.kind == "scene":
        left, right, truth = scene_fixture(args.height, args.width, args.labels, args.seed)
        netpbm.write_ppm(args.out_left, left)
        netpbm.write_ppm(args.out_right, right)
        netpbm.write_pgm(args.out_truth, labels_to_gray(truth, args.labels))
        print(
            f"scene written to {args.out_left}, {args.out_right}, {args.out_truth}"
        )
        return 0
    raise InputError(f"unknown gen kind {args.kind!r}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="planarmrf",
        description="MAP inference on planar grid MRFs: exact DP and a slab scheme",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a model JSON file")
    p.add_argument("model")
    p.add_argument("--out", required=True)
    _common_solver_flags(p)
    p.add_argument("--shift", action="store_true", help="shift negative entries first")
    p.add_argument("--exact", action="store_true", help="exact DP instead of the slab scheme")
    p.add_argument("--dump-decomp", default=None, metavar="PATH")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("stereo", help="disparity map from a rectified PPM pair")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--out", required=True)
    p.add_argument("--labels", type=int, default=4)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--two-pass", action="store_true")
    p.add_argument("--smooth", type=int, default=1, metavar="N")
    p.add_argument("--truth", default=None, metavar="PATH")
    p.add_argument("--tolerance", type=int, default=0)
    _common_solver_flags(p)
    p.set_defaults(func=cmd_stereo, epsilon=1.0 / 3.0)

    p = sub.add_parser("cc", help="correlation clustering via the reduction")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    _common_solver_flags(p)
    p.add_argument("--verify", action="store_true", help="compare with exhaustive optimum")
    p.set_defaults(func=cmd_cc, epsilon=1.0 / 3.0)

    p = sub.add_parser("sweep", help="runtime scaling over an epsilon list")
    p.add_argument("--model", default=None)
    p.add_argument("--left", default=None)
    p.add_argument("--right", default=None)
    p.add_argument("--labels", type=int, default=4)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--epsilons", default="1/2,1/3,1/4")
    p.add_argument("--csv", default=None, metavar="PATH")
    _common_solver_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gen", help="write fixture files")
    p.add_argument("kind", choices=["grid", "cc", "maxcut", "coloring", "scene"])
    p.add_argument("--height", type=int, default=4)
    p.add_argument("--width", type=int, default=4)
    p.add_argument("--labels", type=int, default=2)
    p.add_argument("--low", type=int, default=0)
    p.add_argument("--high", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--extra-edge-prob", type=float, default=0.5)
    p.add_argument("--graph", choices=["cycle", "complete", "grid"], default="cycle")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--out", default="out.json")
    p.add_argument("--out-left", default="left.ppm")
    p.add_argument("--out-right", default="right.ppm")
    p.add_argument("--out-truth", default="truth.pgm")
    p.set_defaults(func=cmd_gen)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PlanarMRFError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
