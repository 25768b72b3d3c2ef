"""Command-line front-end: solve, optimum, score, fit, region-check.

Exit codes: 0 success, 1 I/O error, 2 validation error, 3 numerical
error. Scoring failures on individual rows are reported to stderr and
turn the exit code to 2 without discarding the successfully scored rows.
Output files are written atomically, so error paths leave nothing behind.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from effode import io as effio
from effode.efficiency import Sample, ScoreBreakdown, score_sample
from effode.errors import (
    EffodeError,
    NumericalError,
    ParameterError,
    ValidationError,
)
from effode.model import InputSystem
from effode.optimum import ProfitSpec, find_optimum
from effode.region import (
    DEFAULT_EPSILON,
    FeasibleRegion,
    contains,
    epsilon_region,
    ray_exit_info,
)
from effode.trajectory import (
    DEFAULT_STEP,
    check_nonnegativity,
    solve,
    trajectory_csv,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

_BOUNDARY_RAYS = 512


@dataclass
class RunConfig:
    command: str
    model_path: Optional[str] = None
    data_path: Optional[str] = None
    output_path: str = effio.STDOUT_SENTINEL
    step: float = DEFAULT_STEP
    y_max: Optional[float] = None
    epsilon: float = DEFAULT_EPSILON
    mode: str = "strict"
    price: Optional[float] = None
    anchor: Optional[np.ndarray] = None
    ridge: float = 0.0
    fig2_geometry: Optional[str] = None
    fig2_svg: Optional[str] = None


def _parse_anchor(text: str) -> np.ndarray:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError as exc:
        raise ParameterError(f"--anchor must be comma-separated numbers: {exc}") from exc
    if not values:
        raise ParameterError("--anchor must contain at least one number")
    return np.array(values, dtype=np.float64)


def _resolve_price(config: RunConfig, model: effio.ModelFile) -> float:
    price = config.price if config.price is not None else model.price
    if price is None:
        raise ValidationError(
            "a price is required: set 'price' in the model file or pass --price"
        )
    return float(price)


def _resolve_anchor(config: RunConfig, model: effio.ModelFile) -> np.ndarray:
    if config.anchor is not None:
        if config.anchor.shape != (model.system.dim,):
            raise ValidationError(
                f"--anchor has {config.anchor.shape[0]} components, "
                f"model dim is {model.system.dim}"
            )
        return config.anchor
    price = _resolve_price(config, model)
    y_max = config.y_max if config.y_max is not None else 10.0
    return find_optimum(model.system, ProfitSpec(price), y_max, config.step).x_star


def _resolve_region(
    config: RunConfig, model: effio.ModelFile, anchor: np.ndarray
) -> FeasibleRegion:
    if model.region is not None:
        return model.region
    return epsilon_region(model.system, anchor, config.epsilon)


def _cmd_solve(config: RunConfig) -> int:
    model = effio.load_model(config.model_path)
    y_max = config.y_max if config.y_max is not None else 1.0
    traj = solve(model.system, y_max, config.step)
    violations = check_nonnegativity(traj)
    if violations:
        k, i = violations[0]
        sys.stderr.write(
            f"effode solve: warning: non-negativity condition fails at "
            f"{len(violations)} grid points (first: input {i + 1} at "
            f"y = {traj.grid[k]:.6g})\n"
        )
    effio.atomic_write_text(config.output_path, trajectory_csv(traj))
    return EXIT_OK


def _cmd_optimum(config: RunConfig) -> int:
    model = effio.load_model(config.model_path)
    price = _resolve_price(config, model)
    y_max = config.y_max if config.y_max is not None else 10.0
    result = find_optimum(model.system, ProfitSpec(price), y_max, config.step)
    report = {
        "price": price,
        "y_star": result.y_star,
        "x_star": [float(v) for v in result.x_star],
        "profit": result.profit,
        "marginal_at_star": result.marginal_at_star,
    }
    effio.atomic_write_text(config.output_path, json.dumps(report, indent=2) + "\n")
    return EXIT_OK


def _boundary_polyline(region: FeasibleRegion, anchor: np.ndarray) -> list[np.ndarray]:
    points = []
    for k in range(_BOUNDARY_RAYS):
        angle = 2.0 * np.pi * k / _BOUNDARY_RAYS
        probe = anchor + np.array([np.cos(angle), np.sin(angle)])
        try:
            points.append(ray_exit_info(region, anchor, probe).point)
        except EffodeError:
            continue
    return points


def _fig2_geometry_csv(anchor, rows, region) -> str:
    lines = ["kind,label,x1,x2"]
    lines.append(f"anchor,,{anchor[0]:.6g},{anchor[1]:.6g}")
    for label, obs, br in rows:
        lines.append(f"observation,{label},{obs.inputs[0]:.6g},{obs.inputs[1]:.6g}")
        lines.append(f"worst,{label},{br.worst_point[0]:.6g},{br.worst_point[1]:.6g}")
    for i, p in enumerate(_boundary_polyline(region, anchor)):
        lines.append(f"boundary,{i},{p[0]:.6g},{p[1]:.6g}")
    return "\n".join(lines) + "\n"


def _fig2_svg(anchor, rows, region) -> str:
    boundary = _boundary_polyline(region, anchor)
    pts = [anchor] + [p for _, obs, br in rows for p in (obs.inputs, br.worst_point)]
    all_pts = np.array([list(p) for p in pts + boundary])
    lo = all_pts.min(axis=0)
    hi = all_pts.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    size = 480.0
    pad = 40.0

    def sxy(p):
        x = pad + (p[0] - lo[0]) / span[0] * size
        y = pad + (hi[1] - p[1]) / span[1] * size
        return f"{x:.2f}", f"{y:.2f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size + 2 * pad:.0f}" '
        f'height="{size + 2 * pad:.0f}" viewBox="0 0 {size + 2 * pad:.0f} {size + 2 * pad:.0f}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    if boundary:
        path = " ".join(",".join(sxy(p)) for p in boundary)
        out.append(
            f'<polygon points="{path}" fill="#dddddd" stroke="#888888" stroke-width="1"/>'
        )
    ax, ay = sxy(anchor)
    out.append(f'<circle cx="{ax}" cy="{ay}" r="4" fill="black"/>')
    out.append(f'<text x="{ax}" y="{ay}" dx="6" dy="-6" font-size="12">ideal</text>')
    for label, obs, br in rows:
        ox, oy = sxy(obs.inputs)
        wx, wy = sxy(br.worst_point)
        out.append(
            f'<line x1="{ax}" y1="{ay}" x2="{wx}" y2="{wy}" '
            'stroke="#444444" stroke-dasharray="4 3" stroke-width="1"/>'
        )
        out.append(f'<circle cx="{ox}" cy="{oy}" r="4" fill="#1f6fd0"/>')
        out.append(
            f'<text x="{ox}" y="{oy}" dx="6" dy="-6" font-size="12">{label}</text>'
        )
        out.append(f'<circle cx="{wx}" cy="{wy}" r="4" fill="#c03a2b"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _cmd_score(config: RunConfig) -> int:
    model = effio.load_model(config.model_path)
    segments, _ = effio.load_sample_csv(config.data_path)
    sample = effio.flatten_segments(segments)
    if sample.dim != model.system.dim:
        raise ValidationError(
            f"data has {sample.dim} inputs per row, model dim is {model.system.dim}"
        )
    anchor = _resolve_anchor(config, model)
    region = _resolve_region(config, model, anchor)
    if not contains(region, anchor):
        raise ValidationError("ideal point lies outside the region in the model file")

    outcomes = score_sample(region, anchor, sample, config.mode)
    scored_rows = []  # (label, observation, breakdown), file order
    failures = []
    for (label, outcome), obs in zip(outcomes, sample):
        if isinstance(outcome, ScoreBreakdown):
            scored_rows.append((label, obs, outcome))
        else:
            failures.append((label, outcome))

    scored = [(label, br) for label, _, br in scored_rows]
    outputs = [obs.output for _, obs, _ in scored_rows]
    effio.atomic_write_text(config.output_path, effio.format_score_csv(scored, outputs))
    if config.fig2_geometry or config.fig2_svg:
        if model.system.dim != 2:
            raise ValidationError("figure geometry requires exactly 2 inputs")
        if config.fig2_geometry:
            effio.atomic_write_text(
                config.fig2_geometry, _fig2_geometry_csv(anchor, scored_rows, region)
            )
        if config.fig2_svg:
            effio.atomic_write_text(config.fig2_svg, _fig2_svg(anchor, scored_rows, region))

    for label, failure in failures:
        sys.stderr.write(f"effode score: row {label}: {failure.message}\n")
    return EXIT_VALIDATION if failures else EXIT_OK


def _cmd_fit(config: RunConfig) -> int:
    from effode.estimation import fit as fit_system

    segments, _ = effio.load_sample_csv(config.data_path)
    result = fit_system(segments, ridge=config.ridge)
    effio.atomic_write_text(config.output_path, effio.format_model(result.system))
    rms = ", ".join(f"{v:.3g}" for v in result.residual_norms)
    sys.stderr.write(f"effode fit: per-equation residual RMS: {rms}\n")
    return EXIT_OK


def _cmd_region_check(config: RunConfig) -> int:
    model = effio.load_model(config.model_path)
    segments, _ = effio.load_sample_csv(config.data_path)
    sample = effio.flatten_segments(segments)
    if sample.dim != model.system.dim:
        raise ValidationError(
            f"data has {sample.dim} inputs per row, model dim is {model.system.dim}"
        )
    if model.region is not None:
        region = model.region
    else:
        if config.anchor is None:
            raise ValidationError(
                "region-check needs a 'region' in the model file, or --anchor "
                "to build the cutoff region"
            )
        region = _resolve_region(config, model, _resolve_anchor(config, model))
    lines = ["label,y,inside"]
    for i, obs in enumerate(sample):
        label = obs.label if obs.label is not None else str(i + 1)
        verdict = "true" if contains(region, obs.inputs) else "false"
        lines.append(f"{label},{obs.output:.6g},{verdict}")
    effio.atomic_write_text(config.output_path, "\n".join(lines) + "\n")
    return EXIT_OK


_COMMANDS = {
    "solve": _cmd_solve,
    "optimum": _cmd_optimum,
    "score": _cmd_score,
    "fit": _cmd_fit,
    "region-check": _cmd_region_check,
}


def run(config: RunConfig) -> int:
    """Execute one command; returns the process exit code."""
    handler = _COMMANDS.get(config.command)
    if handler is None:
        sys.stderr.write(f"effode: unknown command {config.command!r}\n")
        return EXIT_VALIDATION
    try:
        return handler(config)
    except ValidationError as exc:
        sys.stderr.write(f"effode {config.command}: {exc}\n")
        return EXIT_VALIDATION
    except NumericalError as exc:
        sys.stderr.write(f"effode {config.command}: {exc}\n")
        return EXIT_NUMERICAL
    except EffodeError as exc:
        sys.stderr.write(f"effode {config.command}: {exc}\n")
        return EXIT_VALIDATION
    except OSError as exc:
        sys.stderr.write(f"effode {config.command}: {exc}\n")
        return EXIT_IO


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="effode",
        description="Productive-efficiency scoring against a differential-equation "
        "model of the technology.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model=True, data=False):
        if model:
            p.add_argument("--model", required=True, help="model JSON file")
        if data:
            p.add_argument("--data", required=True, help="sample CSV file")
        p.add_argument("--out", default=effio.STDOUT_SENTINEL, help="output path ('-' = stdout)")

    p = sub.add_parser("solve", help="integrate the optimal input path")
    common(p)
    p.add_argument("--y-max", type=float, default=1.0)
    p.add_argument("--step", type=float, default=DEFAULT_STEP)

    p = sub.add_parser("optimum", help="find the profit-maximizing output")
    common(p)
    p.add_argument("--y-max", type=float, default=10.0)
    p.add_argument("--step", type=float, default=DEFAULT_STEP)
    p.add_argument("--price", type=float, default=None)

    p = sub.add_parser("score", help="score observations against the ideal bundle")
    common(p, data=True)
    p.add_argument("--y-max", type=float, default=None)
    p.add_argument("--step", type=float, default=DEFAULT_STEP)
    p.add_argument("--price", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--mode", choices=["strict", "clamp"], default="strict")
    p.add_argument("--anchor", type=str, default=None, help="comma-separated ideal bundle")
    p.add_argument("--fig2-geometry", type=str, default=None, help="geometry CSV path")
    p.add_argument("--fig2-svg", type=str, default=None, help="geometry SVG path")

    p = sub.add_parser("fit", help="estimate a model from sample data")
    common(p, model=False, data=True)
    p.add_argument("--ridge", type=float, default=0.0)

    p = sub.add_parser("region-check", help="report region membership per row")
    common(p, data=True)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--anchor", type=str, default=None, help="comma-separated ideal bundle")
    p.add_argument("--price", type=float, default=None)
    p.add_argument("--y-max", type=float, default=None)
    p.add_argument("--step", type=float, default=DEFAULT_STEP)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    config = RunConfig(command=args.command)
    mapping = {
        "model": "model_path",
        "data": "data_path",
        "out": "output_path",
        "step": "step",
        "y_max": "y_max",
        "epsilon": "epsilon",
        "mode": "mode",
        "price": "price",
        "ridge": "ridge",
        "fig2_geometry": "fig2_geometry",
        "fig2_svg": "fig2_svg",
    }
    for arg_name, field_name in mapping.items():
        if hasattr(args, arg_name):
            setattr(config, field_name, getattr(args, arg_name))
    if getattr(args, "anchor", None) is not None:
        config.anchor = _parse_anchor(args.anchor)
    return config


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
    except EffodeError as exc:
        sys.stderr.write(f"effode: {exc}\n")
        return EXIT_VALIDATION
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
