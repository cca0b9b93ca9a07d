"""Command-line front end.

Subcommands: ``material`` (dispersion table), ``spectrum`` (pair-density
grid), ``maxima`` (beta sweep of collinear maxima), ``total`` (pairs per
pulse in a collection cone), ``fastlight`` (Lorentzian-modified comparison).

All computations are configured through a JSON document passed with
``--config``; every output embeds that configuration verbatim so a run can
be reproduced from its artifact alone.  Exit codes: 0 success, 1 bad
configuration, 2 unknown material, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from . import analysis, dispersion, emission, kinematics, materials
from .dispersion import DispersionError, LorentzianResonance
from .emission import (
    EmissionConfig,
    GaussianProfile,
    config_to_dict,
    profile_from_dict,
)
from .kinematics import KinematicsError, PerturbationKinematics
from .materials import UnknownMaterialError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_UNKNOWN_MATERIAL = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    """The run configuration is malformed or incomplete."""


def _load_config(path) -> dict:
    try:
        with open(path, "r") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    return doc


def _resolve_material(spec):
    if isinstance(spec, str):
        return materials.get_material(spec)
    if isinstance(spec, dict):
        return materials.model_from_dict(spec)
    raise ConfigError("'material' must be a library name or an inline model")


def _require(doc: dict, key: str):
    try:
        return doc[key]
    except KeyError:
        raise ConfigError(f"config is missing required key {key!r}") from None


def _emission_config(doc: dict) -> EmissionConfig:
    material = _resolve_material(_require(doc, "material"))
    try:
        profile = profile_from_dict(_require(doc, "profile"))
        kin = PerturbationKinematics(beta=float(_require(doc, "beta")))
        return EmissionConfig(
            material=material,
            profile=profile,
            kin=kin,
            length_m=float(_require(doc, "L_m")),
            calibration=float(doc.get("calibration", emission.DEFAULT_CALIBRATION)),
        )
    except (ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad emission configuration: {exc}") from exc


def _window(doc: dict, key: str, default) -> tuple[float, float]:
    raw = doc.get(key, default)
    if raw is None:
        return None
    try:
        lo, hi = (float(x) for x in raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key!r} must be a [min, max] pair") from exc
    if not 0.0 < lo < hi:
        raise ConfigError(f"{key!r} must satisfy 0 < min < max")
    return lo, hi


def _write_json(path, doc: dict) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _emit(args, text: str) -> None:
    if args.verbose:
        print(text, file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands

def cmd_material(args) -> int:
    model = _resolve_material(args.name)
    lo, hi = args.window
    lams = np.geomspace(lo, hi, args.samples)
    print(f"# material: {args.name}")
    print("lambda_um,n,n_g,regime")
    for lam in lams:
        try:
            s = dispersion.sample_group_index(model, float(lam))
        except DispersionError:
            print(f"{float(lam)!r},nan,nan,invalid")
            continue
        print(f"{s.wavelength!r},{s.n!r},{s.n_g!r},{s.regime}")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    doc = _load_config(args.config)
    config = _emission_config(doc)
    window1 = _window(doc, "lambda1_window_um", None)
    window2 = _window(doc, "lambda2_window_um", None)
    if window1 is None or window2 is None:
        raise ConfigError("spectrum needs 'lambda1_window_um' and 'lambda2_window_um'")
    resolution = int(doc.get("resolution", 121))
    grid = emission.collinear_grid(config, window1, window2, resolution)
    _emit(args, f"grid {resolution}x{resolution}, max density {grid.max_value():.6g}")
    if args.out.endswith(".csv"):
        snapshot = json.dumps(config_to_dict(config), sort_keys=True)
        grid.to_csv(args.out, header_lines=(f"config: {snapshot}",))
    else:
        grid.to_json(args.out)
    print(f"max density {grid.max_value():.6g} -> {args.out}")
    return EXIT_OK


def cmd_maxima(args) -> int:
    doc = _load_config(args.config)
    config = _emission_config(doc)
    betas = doc.get("betas", [config.kin.beta])
    try:
        betas = [float(b) for b in betas]
    except (TypeError, ValueError) as exc:
        raise ConfigError("'betas' must be a list of numbers") from exc
    window = _window(doc, "lambda1_window_um", (0.2, 20.0))
    sweep = analysis.beta_sweep(config, betas, window=window)
    if not sweep.rows:
        raise analysis.NoEmissionError(
            "; ".join(msg for _, msg in sweep.failures) or "no emission for any beta"
        )
    for row in sweep.rows:
        print(
            f"beta={row.beta:g} lambda1max={row.lambda1_um:.6g} um "
            f"lambda2max={row.lambda2_um:.6g} um N={row.density:.6g}"
        )
    for beta, msg in sweep.failures:
        print(f"beta={beta:g} no emission ({msg})", file=sys.stderr)
    if args.out:
        if args.out.endswith(".csv"):
            snapshot = json.dumps(config_to_dict(config), sort_keys=True)
            sweep.to_csv(args.out, header_lines=(f"config: {snapshot}",))
        else:
            sweep.to_json(args.out, config=config)
        _emit(args, f"sweep written to {args.out}")
    return EXIT_OK


def cmd_total(args) -> int:
    doc = _load_config(args.config)
    config = _emission_config(doc)
    half_angle = math.radians(float(doc.get("cone_half_angle_deg", 30.0)))
    window = _window(doc, "total_lambda_window_um", (0.1, 5.0))
    rel_tol = float(doc.get("rel_tol", 1e-3))
    kwargs = {}
    if "base_resolution" in doc:
        kwargs["base_resolution"] = tuple(int(n) for n in doc["base_resolution"])
    if "max_refinements" in doc:
        kwargs["max_refinements"] = int(doc["max_refinements"])
    result = analysis.total_count(config, half_angle, window, rel_tol=rel_tol, **kwargs)
    print(
        f"pairs per pulse: {result.pairs_per_pulse:.6g} "
        f"(relative quadrature error {result.rel_error:.2g})"
    )
    if args.out:
        _write_json(
            args.out,
            {"result": result.to_dict(), "config": config_to_dict(config)},
        )
        _emit(args, f"total written to {args.out}")
    return EXIT_OK


def cmd_fastlight(args) -> int:
    doc = _load_config(args.config)
    config = _emission_config(doc)
    raw = doc.get("resonance", {})
    amplitude = float(raw.get("amplitude", analysis.FAST_LIGHT_AMPLITUDE))
    width = float(raw.get("width_um", analysis.FAST_LIGHT_WIDTH_UM))
    if "center_um" in raw:
        resonance = LorentzianResonance(
            center=float(raw["center_um"]), amplitude=amplitude, width=width
        )
    else:
        if "max_slope_at_um" in raw:
            at = float(raw["max_slope_at_um"])
        else:
            at = analysis.find_maximum(config).lambda1_um
        resonance = dispersion.fast_light_resonance(
            amplitude=amplitude, width=width, max_slope_at=at
        )
    study = analysis.fast_light_study(
        config,
        resonance,
        window=_window(doc, "fastlight_window_um", None),
        resolution=int(doc.get("resolution", 161)),
    )
    print(
        f"enhancement: {study.enhancement:.6g}, "
        f"peaks above half maximum: {study.peak_count}"
    )
    if args.out:
        _write_json(
            args.out,
            {
                "enhancement": study.enhancement,
                "peak_count": study.peak_count,
                "resonance": dataclasses.asdict(resonance),
                "config": config_to_dict(config),
            },
        )
        _emit(args, f"fast-light study written to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------

def _window_pair(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected 'min,max'")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vacuumpairs",
        description="Photon-pair emission from a superluminal index perturbation.",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=1,
        help="worker count accepted for interface stability; evaluation is "
        "vectorized and currently single-process",
    )
    parser.add_argument("--verbose", action="store_true", help="progress on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("material", help="print a dispersion table")
    p.add_argument("name", help="library material name")
    p.add_argument("--window", type=_window_pair, default=(0.2, 8.0),
                   metavar="MIN,MAX", help="wavelength window in um")
    p.add_argument("--samples", type=int, default=25)
    p.set_defaults(func=cmd_material)

    for name, func, needs_out in (
        ("spectrum", cmd_spectrum, True),
        ("maxima", cmd_maxima, False),
        ("total", cmd_total, False),
        ("fastlight", cmd_fastlight, False),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", required=needs_out, default=None,
                       help="output path (.csv or .json)")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UnknownMaterialError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_UNKNOWN_MATERIAL
    except (ConfigError, ValueError) as exc:
        if isinstance(
            exc,
            (
                DispersionError,
                KinematicsError,
                emission.EmissionError,
                analysis.AnalysisError,
            ),
        ):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
