"""Batch front end: config parsing, sweeps, simulations, validation.

Outputs are pure functions of the config file bytes and the command-line
arguments; numeric formatting is fixed so reruns diff clean. The manifest's
wall_time line is the one intentionally non-reproducible output field.
"""

import argparse
import sys
import time
from configparser import ConfigParser
from importlib import resources
from pathlib import Path

import numpy as np

from .acceptance import run_suite
from .core_optics import GridSpec
from .errors import (
    ConfigError,
    InvalidFieldError,
    InvalidParamsError,
    NdcgiError,
    ShapeMismatchError,
)
from .ghost_pipeline import (
    ExperimentConfig,
    GhostImage,
    double_slit_aperture,
    pinhole_aperture,
    run_experiment,
    uniform_aperture,
)
from .psf_analytic import (
    GeometryParams,
    matched_reference_distance,
    psf_report,
    sweep,
)
from .speckle import SpeckleParams
from .turbulence import TurbulenceSpec

EXIT_OK = 0
EXIT_VALIDATION_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_ERROR = 3

_REQUIRED = object()


def _resolve_config_path(name: str) -> Path:
    if name == "desk":
        return Path(str(resources.files("ndcgi") / "profiles" / "desk.ini"))
    return Path(name)


def _parse_ini(path: Path) -> ConfigParser:
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, "r", encoding="utf-8") as handle:
            parser.read_file(handle)
    except Exception as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return parser


def _get(parser: ConfigParser, section: str, key: str, kind, default=_REQUIRED):
    if not parser.has_option(section, key):
        if default is _REQUIRED:
            raise ConfigError(f"config field [{section}] {key} is required")
        return default
    raw = parser.get(section, key)
    try:
        if kind is bool:
            lowered = raw.strip().lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(
            f"config field [{section}] {key} = {raw!r}: {exc}"
        ) from exc


def load_config(path_or_name: str, seed_override: int | None = None) -> ExperimentConfig:
    """Build an ExperimentConfig from a key=value sectioned file.

    All lengths are meters; cn2 is in m^(-2/3). The name "desk" loads the
    packaged benchtop profile.
    """
    parser = _parse_ini(_resolve_config_path(path_or_name))
    for section in ("geometry", "speckle", "object", "run"):
        if not parser.has_section(section):
            raise ConfigError(f"config section [{section}] is required")

    grid = GridSpec(
        _get(parser, "speckle", "grid_n", int),
        _get(parser, "speckle", "pitch", float),
    )
    omega = _get(parser, "speckle", "omega", float)
    l_c = _get(parser, "speckle", "l_c", float)

    lambda_s = _get(parser, "geometry", "lambda_s", float)
    lambda_r = _get(parser, "geometry", "lambda_r", float)
    z1 = _get(parser, "geometry", "z1", float)
    z2 = _get(parser, "geometry", "z2", float)
    z3 = _get(parser, "geometry", "z3", float,
              default=matched_reference_distance(lambda_s, z1, lambda_r))

    turbulence = None
    if parser.has_section("turbulence"):
        cn2 = _get(parser, "turbulence", "cn2", float)
        turbulence = TurbulenceSpec(
            cn2,
            _get(parser, "turbulence", "path_length", float, default=z1),
            _get(parser, "turbulence", "wavelength", float, default=lambda_s),
        )

    kind = _get(parser, "object", "kind", str)
    if kind == "pinhole":
        mask = pinhole_aperture(grid, _get(parser, "object", "radius", float))
    elif kind == "double_slit":
        mask = double_slit_aperture(
            grid,
            _get(parser, "object", "slit_width", float),
            _get(parser, "object", "slit_separation", float),
        )
    elif kind == "uniform":
        mask = uniform_aperture(grid, _get(parser, "object", "value", float,
                                           default=1.0))
    else:
        raise ConfigError(
            f"config field [object] kind = {kind!r}: expected pinhole, "
            f"double_slit, or uniform"
        )

    seed = _get(parser, "run", "master_seed", int, default=0)
    if seed_override is not None:
        seed = seed_override
    try:
        return ExperimentConfig(
            geometry=GeometryParams(lambda_s, lambda_r, z1, z2, z3, omega, l_c),
            speckle=SpeckleParams(omega, l_c, grid),
            object_mask=mask,
            realizations=_get(parser, "run", "realizations", int),
            master_seed=seed,
            turbulence=turbulence,
            rough_surface=_get(parser, "object", "rough_surface", bool,
                               default=False),
        )
    except NdcgiError as exc:
        raise ConfigError(f"config is inconsistent: {exc}") from exc


def geometry_from_config(path_or_name: str) -> tuple[GeometryParams, TurbulenceSpec | None]:
    config = load_config(path_or_name)
    return config.geometry, config.turbulence


def _fmt(x: float) -> str:
    # scientific notation, 9 significant digits, fixed layout
    return f"{x:.8e}"


def write_sweep_csv(rows, out_path: Path) -> None:
    lines = ["axis_value,w_psf_m,w_fov_m,magnification,turbulent_flag"]
    for value, report in rows:
        lines.append(",".join([
            _fmt(value), _fmt(report.w_psf), _fmt(report.w_fov),
            _fmt(report.magnification), str(int(report.turbulent)),
        ]))
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_image_csv(image: GhostImage, out_path: Path) -> None:
    rows = image.values
    with open(out_path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(",".join(_fmt(v) for v in row))
            handle.write("\n")


def write_pgm(image: GhostImage, out_path: Path) -> None:
    """Min-max normalized 16-bit big-endian binary portable graymap."""
    scaled = np.round(image.normalized() * 65535.0).astype(">u2")
    header = f"P5\n{scaled.shape[1]} {scaled.shape[0]}\n65535\n".encode("ascii")
    out_path.write_bytes(header + scaled.tobytes())


def write_manifest(out_path: Path, digest: str, command: str, outputs, wall_time: float,
                   seed: int) -> None:
    lines = [
        f"config_digest={digest}",
        f"command={command}",
        f"outputs={','.join(str(o) for o in outputs)}",
        f"wall_time={wall_time:.3f}",
        f"seed={seed}",
    ]
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_psf_sweep(config_path: str, axis: str, values: list[float],
                  out_path: str) -> int:
    if not values:
        raise ConfigError("psf-sweep needs at least one --values entry")
    geometry, turbulence = geometry_from_config(config_path)
    rows = sweep(geometry, axis, values, turb=turbulence)
    write_sweep_csv(rows, Path(out_path))
    print(f"wrote {out_path} ({len(rows)} rows)")
    return EXIT_OK


def cmd_simulate(config_path: str, out_dir: str, seed_override: int | None,
                 workers: int) -> int:
    t0 = time.perf_counter()
    config = load_config(config_path, seed_override)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    image = run_experiment(config, workers=workers)
    raw_path = out / "ghost_raw.csv"
    pgm_path = out / "ghost_image.pgm"
    write_image_csv(image, raw_path)
    write_pgm(image, pgm_path)
    analytic = psf_report(config.geometry, config.turbulence)
    wall = time.perf_counter() - t0
    write_manifest(
        out / "manifest.txt", image.config_digest,
        f"simulate --config {config_path}",
        [raw_path.name, pgm_path.name], wall, config.master_seed,
    )
    print(f"simulated {image.realizations} realizations in {wall:.1f}s")
    print(f"analytic point-response width: {_fmt(analytic.w_psf)} m")
    print(f"outputs in {out}")
    return EXIT_OK


def cmd_validate(level: str, out_path: str | None) -> int:
    try:
        results = run_suite(level)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    lines = [r.line() for r in results]
    failed = [r for r in results if not r.passed]
    lines.append(
        f"{len(results) - len(failed)}/{len(results)} criteria passed"
        + (f"; FAILED: {', '.join(str(r.number) for r in failed)}" if failed else "")
    )
    report = "\n".join(lines)
    print(report)
    if out_path:
        Path(out_path).write_text(report + "\n", encoding="utf-8")
    return EXIT_VALIDATION_FAILURE if failed else EXIT_OK


def _parse_values(raw: str) -> list[float]:
    try:
        return [float(tok) for tok in raw.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"--values {raw!r}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ndcgi",
        description="Two-color computational ghost imaging simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("psf-sweep", help="closed-form width sweep to CSV")
    p_sweep.add_argument("--config", required=True,
                         help="config file path, or the built-in name 'desk'")
    p_sweep.add_argument("--axis", required=True,
                         choices=("lambda_r", "lambda_s", "z3", "cn2"))
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated axis values (SI units)")
    p_sweep.add_argument("--out", required=True, help="output CSV path")

    p_sim = sub.add_parser("simulate", help="Monte Carlo ghost image run")
    p_sim.add_argument("--config", required=True,
                       help="config file path, or the built-in name 'desk'")
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.add_argument("--seed", type=int, default=None,
                       help="override the config's master seed")
    p_sim.add_argument("--workers", type=int, default=1,
                       help="parallel worker processes")

    p_val = sub.add_parser("validate", help="run the acceptance suite")
    p_val.add_argument("level", choices=("quick", "full"))
    p_val.add_argument("--out", default=None, help="also write the report here")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "psf-sweep":
            return cmd_psf_sweep(args.config, args.axis,
                                 _parse_values(args.values), args.out)
        if args.command == "simulate":
            return cmd_simulate(args.config, args.out, args.seed, args.workers)
        return cmd_validate(args.level, args.out)
    except (ConfigError, InvalidParamsError, InvalidFieldError,
            ShapeMismatchError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except NdcgiError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
