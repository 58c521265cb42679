"""Command-line surface: reproducible experiments over the library.

Subcommands: run (full mission into a report directory), eval-planner
(heuristics vs exact optimum, CSV and optional SVG curves), eval-sprayer
(spread curve and tilt table), eval-perception (IOU over a corpus), and
render (one frame plus ground truth).

Exit codes are stable: 0 success, 1 input error, 2 degraded or
incomplete result.  All numeric CSV output uses 6 decimal places, dot
separators, and LF line endings.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from .coordinator import MissionLimits, run_mission, write_report
from .errors import SparrowError
from .netpbm import read_mask, read_ppm, write_pgm, write_ppm
from .perception import PipelineParams, iou, run_pipeline, render_field, synthetic_corpus
from .planner import evaluate_planners, eval_rows_to_csv, eval_summary_to_csv
from .field import GroundPoint
from .scenario import load_scenario, with_seed
from .sprayer import SprayerConfig, aim_angles, spread_radius


def _read_scenario(path: str, seed_override: int | None):
    with open(path, "r", encoding="utf-8") as fh:
        sc = load_scenario(fh.read())
    if seed_override is not None:
        sc = with_seed(sc, seed_override)
    return sc


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_bytes(path: str, data: bytes) -> None:
    with open(path, "wb") as fh:
        fh.write(data)


# --- minimal deterministic SVG plotting -----------------------------------

_SVG_COLORS = ("#1f6fb2", "#c44e52")


def _svg_chart(title: str, x_label: str, y_label: str,
               series: list[tuple[str, list[tuple[float, float]], str]],
               width: int = 640, height: int = 480) -> str:
    """Render line/scatter series into a standalone SVG string."""
    margin = 60
    xs = [p[0] for _, pts, _ in series for p in pts]
    ys = [p[1] for _, pts, _ in series for p in pts]
    if not xs:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def sx(x):
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin)

    def sy(y):
        return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" '
        f'font-size="16">{title}</text>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{height - 16}" text-anchor="middle" '
        f'font-size="12">{x_label}</text>',
        f'<text x="18" y="{height / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 18 {height / 2:.1f})">{y_label}</text>',
    ]
    for i in range(5):
        x = x_lo + (x_hi - x_lo) * i / 4
        y = y_lo + (y_hi - y_lo) * i / 4
        parts.append(f'<text x="{sx(x):.1f}" y="{height - margin + 16}" '
                     f'text-anchor="middle" font-size="10">{x:.3f}</text>')
        parts.append(f'<text x="{margin - 6}" y="{sy(y):.1f}" text-anchor="end" '
                     f'font-size="10">{y:.3f}</text>')
    for idx, (name, pts, kind) in enumerate(series):
        color = _SVG_COLORS[idx % len(_SVG_COLORS)]
        if kind == "line" and len(pts) > 1:
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
            parts.append(f'<polyline points="{coords}" fill="none" '
                         f'stroke="{color}" stroke-width="2"/>')
        for x, y in pts:
            parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" '
                         f'fill="{color}"/>')
        parts.append(f'<text x="{width - margin - 4}" y="{margin + 16 + 16 * idx}" '
                     f'text-anchor="end" font-size="12" fill="{color}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# --- subcommands -----------------------------------------------------------

def cmd_run(args) -> int:
    sc = _read_scenario(args.scenario, args.seed)
    limits = MissionLimits(max_steps=args.max_steps)
    report = run_mission(sc, planner_mode=args.mode, limits=limits)
    write_report(report, args.out)
    print(f"mission {report.status.lower()}: sprayed "
          f"{report.totals.weeds_sprayed}/{report.totals.weeds_detected} detected weeds "
          f"in {report.totals.mission_time_s:.1f} s")
    return 0 if report.status == "Completed" else 2


def cmd_eval_planner(args) -> int:
    rows, summary = evaluate_planners(args.trials, (args.n_min, args.n_max),
                                      seed=args.seed)
    os.makedirs(args.out, exist_ok=True)
    _write_text(os.path.join(args.out, "trials.csv"), eval_rows_to_csv(rows))
    _write_text(os.path.join(args.out, "summary.csv"), eval_summary_to_csv(summary))
    if args.format == "svg":
        by_n = [(s.n, s.mean_phi_n) for s in summary]
        by_n_c = [(s.n, s.mean_phi_c) for s in summary]
        _write_text(os.path.join(args.out, "phi_vs_n.svg"), _svg_chart(
            "Mean path-quality ratio vs weed count", "weeds", "mean ratio",
            [("nearest neighbor", by_n, "line"), ("christofides", by_n_c, "line")]))
        scatter_n = [(r.lambda_opt, r.phi_n) for r in rows]
        scatter_c = [(r.lambda_opt, r.phi_c) for r in rows]
        _write_text(os.path.join(args.out, "phi_vs_distance.svg"), _svg_chart(
            "Path-quality ratio vs optimal length", "optimal length (cm)", "ratio",
            [("nearest neighbor", scatter_n, "scatter"),
             ("christofides", scatter_c, "scatter")]))
    for s in summary:
        print(f"n={s.n} trials={s.trials} "
              f"mean_phi_n={s.mean_phi_n:.4f} mean_phi_c={s.mean_phi_c:.4f}")
    return 0


def cmd_eval_sprayer(args) -> int:
    cfg = _read_scenario(args.scenario, None).sprayer if args.scenario \
        else SprayerConfig()
    r1_values = sorted({float(r) for r in range(int(math.floor(cfg.max_reach_r1)) + 1)}
                       | {k[0] for k in cfg.spread_knots} | {cfg.max_reach_r1})
    lines = ["r1_cm,r2_cm,tilt_deg"]
    for r1 in r1_values:
        if not (0.0 <= r1 <= cfg.max_reach_r1):
            continue
        r2 = spread_radius(r1, cfg)
        target = GroundPoint(cfg.mount_point.x + r1, cfg.mount_point.y)
        tilt = aim_angles(target, cfg).tilt
        lines.append(f"{r1:.6f},{r2:.6f},{tilt:.6f}")
    os.makedirs(args.out, exist_ok=True)
    _write_text(os.path.join(args.out, "spread_curve.csv"), "\n".join(lines) + "\n")
    print(f"wrote {len(r1_values)} rows to {os.path.join(args.out, 'spread_curve.csv')}")
    return 0


def _corpus_from_dir(corpus_dir: str) -> tuple[list[tuple[str, object, object]], list[str]]:
    pairs = []
    skipped = []
    for name in sorted(os.listdir(corpus_dir)):
        if not name.endswith(".ppm"):
            continue
        stem = name[:-len(".ppm")]
        truth_path = os.path.join(corpus_dir, stem + ".truth.pgm")
        img_path = os.path.join(corpus_dir, name)
        if not os.path.exists(truth_path):
            skipped.append(name)
            continue
        with open(img_path, "rb") as fh:
            img = read_ppm(fh.read())
        with open(truth_path, "rb") as fh:
            truth = read_mask(fh.read())
        pairs.append((stem, img, truth))
    return pairs, skipped


def cmd_eval_perception(args) -> int:
    if args.corpus:
        pairs, skipped = _corpus_from_dir(args.corpus)
        for name in skipped:
            print(f"skipped (no ground truth): {name}", file=sys.stderr)
        if not pairs:
            print("no scorable image pairs found", file=sys.stderr)
            return 2
    else:
        corpus = synthetic_corpus(args.synthetic, noise=args.noise, seed=args.seed)
        pairs = [(f"synthetic_{i:03d}", img, truth)
                 for i, (img, truth) in enumerate(corpus)]
        skipped = []
    if not pairs:
        print("no images to score", file=sys.stderr)
        return 2
    params = PipelineParams(index=args.index)
    lines = ["image,iou"]
    scores = []
    for name, img, truth in pairs:
        mask, _ = run_pipeline(img, params)
        score = iou(mask, truth)
        scores.append(score)
        lines.append(f"{name},{score:.6f}")
    mean = sum(scores) / len(scores)
    lines.append(f"mean,{mean:.6f}")
    os.makedirs(args.out, exist_ok=True)
    _write_text(os.path.join(args.out, "iou.csv"), "\n".join(lines) + "\n")
    print(f"mean IOU over {len(scores)} images: {mean:.4f}")
    return 0


def cmd_render(args) -> int:
    sc = _read_scenario(args.scenario, args.seed)
    img, truth = render_field(sc, noise=args.noise, seed=sc.seed)
    os.makedirs(args.out, exist_ok=True)
    _write_bytes(os.path.join(args.out, "render.ppm"), write_ppm(img))
    _write_bytes(os.path.join(args.out, "truth.pgm"), write_pgm(truth))
    print(f"wrote render.ppm and truth.pgm to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparrow",
        description="Deterministic weed spot-spraying robot simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a full mission from a scenario file")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None,
                   help="override the scenario seed")
    p.add_argument("--mode", choices=["nn", "christofides", "hybrid", "optimal"],
                   default="hybrid")
    p.add_argument("--max-steps", type=int, default=20000)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval-planner",
                       help="benchmark planners against the exact optimum")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--n-min", type=int, default=5)
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "svg"], default="csv")
    p.set_defaults(func=cmd_eval_planner)

    p = sub.add_parser("eval-sprayer", help="tabulate spread radius and tilt")
    p.add_argument("--scenario", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval_sprayer)

    p = sub.add_parser("eval-perception",
                       help="score the segmentation pipeline by IOU")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--corpus", default=None,
                       help="directory of NAME.ppm / NAME.truth.pgm pairs")
    group.add_argument("--synthetic", type=int, default=None,
                       help="generate this many synthetic frames instead")
    p.add_argument("--noise", default="field")
    p.add_argument("--index", choices=["exg", "ndi"], default="exg")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval_perception)

    p = sub.add_parser("render", help="render one frame plus ground truth")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--noise", default="none")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SparrowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def console_main() -> None:
    sys.exit(main())
