"""Command-line interface: detect, trace, render, render-seq, detect-temporal.

Exit codes: 0 success, 2 bad input (unreadable or malformed files, invalid
configuration), 1 internal error. Identical inputs always produce
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import sys

from .detector import ThresholdSchedule, detect_multilevel, detect_pointwise
from .field import (
    apply_operator,
    contours_to_svg,
    contours_to_text,
    hamiltonian,
    trace_level_contours,
    zero_mask,
)
from .netpbm import NetpbmError, read_grid, write_pbm, write_pgm
from .raster import IntensityGrid, Topology, frame_stack
from .scene import SceneError, load_scene, render, render_sequence

_TOPOLOGIES = {"4": Topology.N4, "8": Topology.N8}
_DETECTORS = {"multilevel": detect_multilevel, "pointwise": detect_pointwise}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isophote",
        description="Detect intensity discontinuities and occluding contours "
        "by intersecting level-set boundaries at multiple thresholds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_schedule_flags(p):
        p.add_argument("--increment", "-d", type=int, default=8,
                       help="threshold spacing (default 8)")
        p.add_argument("--offset", type=int, default=None,
                       help="first threshold (default: one increment)")
        p.add_argument("--mode", choices=("multilevel", "pointwise"), default="multilevel",
                       help="detector route; both produce identical masks")
        p.add_argument("--preprocess", choices=("none", "dx", "dy"), default="none",
                       help="finite-difference operator applied before detection")
        p.add_argument("--channel", choices=("gray", "r", "g", "b"), default="gray",
                       help="channel to extract from color input")
        p.add_argument("--ascii", action="store_true", help="write ASCII Netpbm variants")

    p = sub.add_parser("detect", help="flag discontinuity/occlusion pixels in one image")
    p.add_argument("input", help="PGM/PPM/PBM image")
    p.add_argument("output", help="PBM mask of flagged pixels")
    add_schedule_flags(p)
    p.add_argument("--topology", choices=("4", "8"), default="4")
    p.add_argument("--filter-occluding", action="store_true",
                   help="drop flags where the rotated-gradient field vanishes")
    p.add_argument("--filter-tolerance", type=int, default=0,
                   help="integer |hx|+|hy| threshold for the zero filter (default 0)")
    p.add_argument("--levels-out", default=None, help="also write per-pixel level counts as PGM")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("trace", help="trace level curves at one threshold")
    p.add_argument("input")
    p.add_argument("output", help="SVG or plain-text coordinate list")
    p.add_argument("--threshold", "-c", type=int, required=True)
    p.add_argument("--topology", choices=("4", "8"), default="4")
    p.add_argument("--channel", choices=("gray", "r", "g", "b"), default="gray")
    p.add_argument("--format", choices=("svg", "text"), default=None,
                   help="default: svg when output ends in .svg, else text")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("render", help="render a scene config to an image plus ground truth")
    p.add_argument("--scene", required=True, help="JSON scene config")
    p.add_argument("--out", required=True, help="output PGM image")
    p.add_argument("--truth", default=None, help="PBM of ground-truth discontinuity pixels")
    p.add_argument("--occluding", default=None, help="PBM of ground-truth occluding pixels")
    p.add_argument("--ascii", action="store_true")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("render-seq", help="render a moving scene to numbered frames")
    p.add_argument("--scene", required=True)
    p.add_argument("--frames", type=int, required=True)
    p.add_argument("--motion", required=True, help="per-frame displacement dx,dy,dz")
    p.add_argument("--out-pattern", required=True,
                   help="output path pattern containing {i}, e.g. frame{i:03d}.pgm")
    p.add_argument("--truth-pattern", default=None)
    p.add_argument("--ascii", action="store_true")
    p.set_defaults(func=cmd_render_seq)

    p = sub.add_parser("detect-temporal",
                       help="detect across stacked video frames (spatial N4 plus time neighbors)")
    p.add_argument("frames", nargs="+", help="two or more frame images, in order")
    p.add_argument("--out-pattern", required=True,
                   help="per-frame mask path pattern containing {i}")
    add_schedule_flags(p)
    p.set_defaults(func=cmd_detect_temporal)

    return parser


def _check_pattern(pattern: str, flag: str) -> None:
    try:
        if pattern.format(i=0) == pattern.format(i=1):
            raise ValueError(f"{flag} must contain an {{i}} placeholder, got {pattern!r}")
    except (KeyError, IndexError) as exc:
        raise ValueError(f"{flag} has an invalid placeholder: {exc}") from exc


def _load_preprocessed(path, channel: str, preprocess: str) -> IntensityGrid:
    grid = read_grid(path, channel=channel)
    return apply_operator(grid, preprocess) if preprocess != "none" else grid


def cmd_detect(args) -> int:
    grid = _load_preprocessed(args.input, args.channel, args.preprocess)
    schedule = ThresholdSchedule(args.increment, args.offset)
    mask = _DETECTORS[args.mode](grid, schedule, _TOPOLOGIES[args.topology])
    flagged = mask.flagged
    if args.filter_occluding:
        flagged = flagged & ~zero_mask(hamiltonian(grid), args.filter_tolerance)
    write_pbm(args.output, flagged, binary=not args.ascii)
    if args.levels_out:
        counts = mask.level_count
        ceiling = max(1, int(counts.max()))
        write_pgm(args.levels_out, IntensityGrid(counts, ceiling), binary=not args.ascii)
    return 0


def cmd_trace(args) -> int:
    grid = read_grid(args.input, channel=args.channel)
    contours = trace_level_contours(grid, args.threshold, _TOPOLOGIES[args.topology])
    fmt = args.format or ("svg" if str(args.output).lower().endswith(".svg") else "text")
    if fmt == "svg":
        text = contours_to_svg(contours, grid.width, grid.height)
    else:
        text = contours_to_text(contours)
    with open(args.output, "w", encoding="ascii") as fh:
        fh.write(text)
    return 0


def cmd_render(args) -> int:
    spec = load_scene(args.scene)
    grid, truth = render(spec)
    write_pgm(args.out, grid, binary=not args.ascii)
    if args.truth:
        write_pbm(args.truth, truth.discontinuity_mask, binary=not args.ascii)
    if args.occluding:
        write_pbm(args.occluding, truth.occluding_mask, binary=not args.ascii)
    return 0


def cmd_render_seq(args) -> int:
    _check_pattern(args.out_pattern, "--out-pattern")
    if args.truth_pattern:
        _check_pattern(args.truth_pattern, "--truth-pattern")
    parts = args.motion.split(",")
    if len(parts) != 3:
        raise ValueError(f"--motion needs dx,dy,dz, got {args.motion!r}")
    motion = tuple(float(v) for v in parts)
    spec = load_scene(args.scene)
    grids, truths = render_sequence(spec, motion, args.frames)
    for i, grid in enumerate(grids):
        write_pgm(args.out_pattern.format(i=i), grid, binary=not args.ascii)
    if args.truth_pattern:
        for i, truth in enumerate(truths):
            write_pbm(args.truth_pattern.format(i=i), truth.discontinuity_mask,
                      binary=not args.ascii)
    return 0


def cmd_detect_temporal(args) -> int:
    _check_pattern(args.out_pattern, "--out-pattern")
    if len(args.frames) < 2:
        raise ValueError("detect-temporal needs at least two frames")
    grids = [_load_preprocessed(p, args.channel, args.preprocess) for p in args.frames]
    stack = frame_stack(grids)
    schedule = ThresholdSchedule(args.increment, args.offset)
    mask = _DETECTORS[args.mode](stack, schedule, Topology.N4T)
    for t in range(stack.frames):
        write_pbm(args.out_pattern.format(i=t), mask.flagged[t], binary=not args.ascii)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NetpbmError, SceneError, OSError, ValueError) as exc:
        print(f"isophote: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # invariant violation, not an input problem
        print(f"isophote: internal error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())
