"""Command-line front end: projections, confidence balls, experiments.

Exit codes are stable across subcommands: 0 on success, 2 for usage,
input, or config-schema errors, 3 for numerical failures.  Every output
artifact embeds the deterministic manifest core (subcommand, resolved
config, version); ``manifest.json`` additionally records the timestamp,
worker count, and output paths, which are execution details rather than
part of the reproducible payload.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .cones import ConeKind, NumericalError, piece_count, project
from .confidence import confidence_ball
from .sim import (
    ExperimentConfig,
    SignalFamily,
    SignalSpec,
    run_adaptivity,
    run_coverage,
    run_geometry,
)

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

_CONES = {
    "isotonic": ConeKind.MONOTONE_NONDECREASING,
    "convex": ConeKind.CONVEX,
}

_FAMILIES = {
    "piecewise_constant": SignalFamily.PIECEWISE_CONSTANT,
    "piecewise_affine": SignalFamily.PIECEWISE_AFFINE,
    "tv_bounded": SignalFamily.TV_BOUNDED,
}


class SchemaError(ValueError):
    """Config file violates the documented key/value schema."""


def _fmt(value) -> str:
    """Full round-trip formatting: shortest representation parsing back exactly."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def read_sequence(path: Path) -> np.ndarray:
    """Read a one-value-per-line numeric file or a CSV with a ``y`` column."""
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValueError(f"cannot read input file {path}: {exc}") from exc
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line and not line.startswith("#")]
    if not lines:
        raise ValueError(f"input file {path} contains no data")
    header_tokens = [token.strip() for token in lines[0].split(",")]
    is_header = any(token and not _is_number(token) for token in header_tokens)
    if is_header:
        if "y" not in header_tokens:
            raise ValueError(f"input file {path} has a header without a 'y' column")
        column = header_tokens.index("y")
        rows = list(csv.reader(lines[1:]))
        try:
            values = [float(row[column]) for row in rows]
        except (IndexError, ValueError) as exc:
            raise ValueError(f"ill-formed CSV row in {path}: {exc}") from exc
    else:
        try:
            values = [float(line.split(",")[0]) for line in lines]
        except ValueError as exc:
            raise ValueError(f"ill-formed numeric line in {path}: {exc}") from exc
    return np.asarray(values, dtype=float)


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def _manifest_core(subcommand: str, config: dict) -> dict:
    return {"subcommand": subcommand, "config": config, "version": __version__}


def _manifest_comment(core: dict) -> str:
    return "# manifest: " + json.dumps(core, sort_keys=True)


def _write_manifest(out_dir: Path, core: dict, workers: int, outputs: list[str]) -> None:
    full = dict(core)
    full["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    full["workers"] = workers
    full["outputs"] = outputs
    (out_dir / "manifest.json").write_text(json.dumps(full, sort_keys=True, indent=2) + "\n")


def cmd_project(args) -> int:
    y = read_sequence(Path(args.input))
    cone = _CONES[args.cone]
    fitted = project(cone, y)
    pieces, structure = piece_count(cone, fitted)
    core = _manifest_core(
        "project", {"input": str(args.input), "cone": args.cone}
    )
    lines = [_manifest_comment(core), "index,y,fit,piece"]
    piece_of = np.empty(y.size, dtype=int)
    for piece_index, (start, stop) in enumerate(structure.ranges):
        piece_of[start:stop] = piece_index
    for i in range(y.size):
        lines.append(f"{i},{_fmt(y[i])},{_fmt(fitted[i])},{piece_of[i]}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    breakpoints = ":".join(str(stop) for _, stop in structure.ranges[:-1])
    print(f"pieces={pieces} breakpoints=[{breakpoints}]", file=sys.stderr)
    return EXIT_OK


def cmd_ball(args) -> int:
    y = read_sequence(Path(args.input))
    cone = _CONES[args.cone]
    ball = confidence_ball(y, cone, args.sigma, args.alpha, use_tv_combination=args.tv)
    core = _manifest_core(
        "ball",
        {
            "input": str(args.input),
            "cone": args.cone,
            "sigma": args.sigma,
            "alpha": args.alpha,
            "tv": bool(args.tv),
        },
    )
    record = {
        "squared_radius": ball.squared_radius,
        "alpha": ball.alpha,
        "nominal_coverage": ball.nominal_coverage,
        "pieces": ball.pieces,
        "manifest": core,
    }
    if args.tv:
        record["v_hat"] = ball.v_hat
    if args.out:
        lines = [_manifest_comment(core), "index,center"]
        lines += [f"{i},{_fmt(v)}" for i, v in enumerate(ball.center)]
        Path(args.out).write_text("\n".join(lines) + "\n")
        record["center_file"] = str(args.out)
    else:
        record["center"] = [float(v) for v in ball.center]
    print(json.dumps(record, sort_keys=True))
    return EXIT_OK


_COMMON_KEYS = {"kind", "cone", "n", "replicates", "seed"}
_SIGNAL_KEYS = {"sigma", "alpha", "family", "complexity", "amplitude", "use_tv", "signal_seed"}
_GEOMETRY_KEYS = {"x_values", "alphas"}


def load_experiment_config(path: Path, seed_override: int | None = None) -> dict:
    """Parse and validate the flat key/value experiment config."""
    try:
        raw = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ValueError(f"cannot read config file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise SchemaError(f"config file {path} is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaError(f"config file {path} must be a flat key/value mapping")

    kind = raw.get("kind")
    if kind not in ("coverage", "adaptivity", "geometry"):
        raise SchemaError(f"key 'kind' must be coverage, adaptivity, or geometry, got {kind!r}")
    allowed = _COMMON_KEYS | (_GEOMETRY_KEYS if kind == "geometry" else _SIGNAL_KEYS)
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise SchemaError(f"unknown config keys for kind={kind}: {', '.join(unknown)}")
    required = {"kind", "cone", "n", "replicates", "seed"}
    if kind != "geometry":
        required |= {"sigma", "alpha", "family", "complexity", "amplitude"}
    missing = sorted(required - set(raw))
    if missing:
        raise SchemaError(f"missing config keys: {', '.join(missing)}")
    if raw["cone"] not in _CONES:
        raise SchemaError(f"key 'cone' must be one of {sorted(_CONES)}, got {raw['cone']!r}")
    if kind != "geometry" and raw["family"] not in _FAMILIES:
        raise SchemaError(
            f"key 'family' must be one of {sorted(_FAMILIES)}, got {raw['family']!r}"
        )
    resolved = dict(raw)
    if seed_override is not None:
        resolved["seed"] = seed_override
    return resolved


def _experiment_config(resolved: dict) -> ExperimentConfig:
    signal = SignalSpec(
        family=_FAMILIES[resolved["family"]],
        n=int(resolved["n"]),
        complexity=int(resolved["complexity"]),
        amplitude=float(resolved["amplitude"]),
        seed=int(resolved.get("signal_seed", 0)),
    )
    return ExperimentConfig(
        signal=signal,
        cone=_CONES[resolved["cone"]],
        sigma=float(resolved["sigma"]),
        alpha=float(resolved["alpha"]),
        replicates=int(resolved["replicates"]),
        master_seed=int(resolved["seed"]),
        use_tv_combination=bool(resolved.get("use_tv", False)),
    )


def _write_csv(path: Path, core: dict, header: str, rows: list[str]) -> None:
    path.write_text("\n".join([_manifest_comment(core), header, *rows]) + "\n")


def cmd_experiment(args) -> int:
    resolved = load_experiment_config(Path(args.config), seed_override=args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    core = _manifest_core("experiment", resolved)
    kind = resolved["kind"]
    outputs: list[str] = []

    if kind == "geometry":
        report = run_geometry(
            cone=_CONES[resolved["cone"]],
            n=int(resolved["n"]),
            replicates=int(resolved["replicates"]),
            seed=int(resolved["seed"]),
            x_values=tuple(resolved.get("x_values", (0.5, 1.0, 2.0))),
            alphas=tuple(resolved.get("alphas", (0.1, 0.05))),
            workers=args.workers,
        )
        rows = [
            f"{i},{_fmt(report.squared_norms[i])},{report.face_sample.dimensions[i]}"
            for i in range(report.replicates)
        ]
        _write_csv(out_dir / "replicates.csv", core, "replicate,squared_norm,face_dimension", rows)
        outputs.append("replicates.csv")
        summary = (
            f"{_fmt(report.dimension.mean)},{_fmt(report.dimension.std_error)},"
            f"{_fmt(report.face_dimension_mean)},{_fmt(report.face_dimension_std_error)},"
            f"{report.min_face_dimension},{_fmt(report.delta_reference)}"
        )
        _write_csv(
            out_dir / "summary.csv",
            core,
            "dimension_mean,dimension_se,face_dim_mean,face_dim_se,min_face_dim,delta_reference",
            [summary],
        )
        outputs.append("summary.csv")
        conc_rows = [
            f"face,{_fmt(row.parameter)},{_fmt(row.threshold)},{_fmt(row.frequency)},"
            f"{_fmt(row.bound)},{_fmt(row.std_error)},{int(row.violated)}"
            for row in report.face_concentration
        ] + [
            f"norm,{_fmt(row.parameter)},{_fmt(row.threshold)},{_fmt(row.frequency)},"
            f"{_fmt(row.bound)},{_fmt(row.std_error)},{int(row.violated)}"
            for row in report.norm_concentration
        ]
        _write_csv(
            out_dir / "concentration.csv",
            core,
            "kind,parameter,threshold,frequency,bound,std_error,violated",
            conc_rows,
        )
        outputs.append("concentration.csv")
    else:
        config = _experiment_config(resolved)
        runner = run_coverage if kind == "coverage" else run_adaptivity
        report = runner(config, workers=args.workers)
        rows = [
            f"{i},{_fmt(report.loss[i])},{_fmt(report.squared_radius[i])},"
            f"{report.pieces[i]},{int(report.covered[i])}"
            for i in range(report.replicates)
        ]
        _write_csv(out_dir / "replicates.csv", core, "replicate,loss,sq_radius,pieces,covered", rows)
        outputs.append("replicates.csv")
        summary = (
            f"{_fmt(report.coverage)},{_fmt(report.coverage_std_error)},"
            f"{_fmt(report.mean_squared_radius)},{_fmt(report.q90_squared_radius)},"
            f"{_fmt(report.mean_pieces)}"
        )
        _write_csv(
            out_dir / "summary.csv",
            core,
            "coverage,coverage_se,mean_sq_radius,q90_sq_radius,mean_pieces",
            [summary],
        )
        outputs.append("summary.csv")
        if kind == "adaptivity":
            extra = [f"expectation,,{_fmt(report.expected_pieces_bound)},{_fmt(report.mean_pieces)},"]
            if report.deviation:
                extra += [
                    f"deviation,{_fmt(row.gamma)},{_fmt(row.bound)},{_fmt(row.frequency)},"
                    f"{_fmt(row.std_error)}"
                    for row in report.deviation
                ]
            _write_csv(
                out_dir / "deviation.csv",
                core,
                "check,gamma,bound,value,std_error",
                extra,
            )
            outputs.append("deviation.csv")

    _write_manifest(out_dir, core, args.workers, outputs)
    outputs.append("manifest.json")
    print(f"wrote {', '.join(outputs)} to {out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shapeconf",
        description="Shape-restricted projections, confidence balls, and Monte Carlo experiments.",
    )
    parser.add_argument("--version", action="version", version=f"shapeconf {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_project = sub.add_parser("project", help="project a data file onto a cone")
    p_project.add_argument("--input", required=True, help="one-column file or CSV with a y column")
    p_project.add_argument("--cone", required=True, choices=sorted(_CONES))
    p_project.add_argument("--out", help="output CSV path (default: stdout)")
    p_project.set_defaults(func=cmd_project)

    p_ball = sub.add_parser("ball", help="confidence ball around the cone fit")
    p_ball.add_argument("--input", required=True)
    p_ball.add_argument("--cone", required=True, choices=sorted(_CONES))
    p_ball.add_argument("--sigma", required=True, type=float, help="known noise level")
    p_ball.add_argument("--alpha", required=True, type=float, help="level parameter in (0,1)")
    p_ball.add_argument(
        "--tv",
        action="store_true",
        help="combine with the total-variation radius (monotone only; coverage 1-2*alpha)",
    )
    p_ball.add_argument("--out", help="write the ball center as CSV here")
    p_ball.set_defaults(func=cmd_ball)

    p_exp = sub.add_parser("experiment", help="run a seeded Monte Carlo experiment")
    p_exp.add_argument("--config", required=True, help="flat YAML key/value config")
    p_exp.add_argument("--out", required=True, help="output directory")
    p_exp.add_argument("--workers", type=int, default=1)
    p_exp.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_exp.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"shapeconf: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"shapeconf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
