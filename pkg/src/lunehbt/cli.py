"""Command-line front end.

Four modes: ``analytic`` (closed-form correlator breakdown), ``montecarlo``
(simulation estimate vs. analytic), ``audit`` (sampler moment checks), and
``sweep`` (one row per grid point of a polarizer angle, optionally with
Monte Carlo columns).  Every run document embeds the tool version, the
fully resolved configuration, and the seed, so any output can be reproduced
exactly; JSON outputs round-trip back in through ``--config``.
"""

import argparse
import cmath
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .correlators import TERM_LABELS, CorrelationBreakdown, gamma_hbt, gamma_mz
from .ensemble import EnsembleParams
from .geometry import SetupGeometry
from .montecarlo import (
    FringeScanResult,
    McConfig,
    McEstimate,
    estimate_gamma,
    fringe_scan,
    moment_audit,
)
from .polarization import lune_solid_angle

MODES = ("analytic", "montecarlo", "audit", "sweep")
SETUPS = ("hbt", "mz")
SWEEP_VARS = ("theta3", "theta4")
SWEEP_CSV_HEADER = (
    "var_value",
    "gamma_analytic",
    "gamma_mc_mean",
    "gamma_mc_stderr",
    "z_score",
    "trace_phase",
    "solid_angle",
)

_GEOMETRY_KEYS = ("source_sep", "det_sep", "distance", "area1", "area2", "wavenumber")


class ConfigError(Exception):
    """Invalid run configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class RunConfig:
    mode: str
    setup: str | None
    kappa: float
    kappa_prime: float
    theta3: float
    theta4: float
    source_sep: float | None
    det_sep: float | None
    distance: float | None
    area1: float | None
    area2: float | None
    wavenumber: float | None
    sweep_var: str | None
    sweep_start: float | None
    sweep_stop: float | None
    sweep_steps: int | None
    with_mc: bool
    seed: int
    n_samples: int
    n_streams: int
    output: str
    out: str

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "setup": self.setup,
            "kappa": self.kappa,
            "kappa_prime": self.kappa_prime,
            "theta3": self.theta3,
            "theta4": self.theta4,
            "source_sep": self.source_sep,
            "det_sep": self.det_sep,
            "distance": self.distance,
            "area1": self.area1,
            "area2": self.area2,
            "wavenumber": self.wavenumber,
            "sweep_var": self.sweep_var,
            "sweep_start": self.sweep_start,
            "sweep_stop": self.sweep_stop,
            "sweep_steps": self.sweep_steps,
            "with_mc": self.with_mc,
            "seed": self.seed,
            "n_samples": self.n_samples,
            "n_streams": self.n_streams,
            "output": self.output,
            "out": self.out,
        }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lunehbt",
        description=(
            "Closed-form and Monte Carlo intensity-intensity correlations for "
            "two polarized interferometer layouts."
        ),
    )
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--mode", choices=MODES, help="what to run")
    parser.add_argument("--setup", choices=SETUPS, help="interferometer layout")
    parser.add_argument("--kappa", type=float, help="intensity scale of source 1")
    parser.add_argument(
        "--kappa-prime", type=float, help="intensity scale of source 2"
    )
    parser.add_argument("--theta3", type=float, help="first polarizer angle")
    parser.add_argument("--theta4", type=float, help="second polarizer angle")
    parser.add_argument(
        "--degrees",
        action="store_true",
        help="interpret angle flags in degrees (stored as radians)",
    )
    geo = parser.add_argument_group("hbt geometry (SI units)")
    geo.add_argument("--source-sep", type=float, help="source separation, m")
    geo.add_argument("--det-sep", type=float, help="detector separation, m")
    geo.add_argument("--distance", type=float, help="source-to-detector axial distance, m")
    geo.add_argument("--area1", type=float, help="effective area of source 1, m^2")
    geo.add_argument("--area2", type=float, help="effective area of source 2, m^2")
    geo.add_argument("--wavenumber", type=float, help="optical wavenumber, 1/m")
    sweep = parser.add_argument_group("sweep")
    sweep.add_argument("--sweep-var", choices=SWEEP_VARS, help="angle to scan")
    sweep.add_argument("--sweep-start", type=float)
    sweep.add_argument("--sweep-stop", type=float)
    sweep.add_argument("--sweep-steps", type=int, help="grid size, >= 2")
    sweep.add_argument(
        "--with-mc",
        action="store_true",
        default=None,
        help="add Monte Carlo columns to the sweep",
    )
    mc = parser.add_argument_group("sampling")
    mc.add_argument("--seed", type=int, help="64-bit seed (default: $LUNE_SEED or 0)")
    mc.add_argument("--n-samples", type=int, help="Monte Carlo draws")
    mc.add_argument("--n-streams", type=int, help="independent RNG sub-streams")
    out = parser.add_argument_group("output")
    out.add_argument("--output", choices=("json", "csv"), help="output format")
    out.add_argument("--out", help="output path ('-' for stdout)")
    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config", f"{path} must hold a JSON object")
    # a previous run document embeds its resolved config; accept it directly
    if isinstance(doc.get("config"), dict):
        doc = doc["config"]
    return doc


def _pick(args_value, file_config: dict, key: str, default):
    if args_value is not None:
        return args_value
    if key in file_config and file_config[key] is not None:
        return file_config[key]
    return default


def _require_number(value, field: str, *, positive: bool = False) -> float:
    try:
        number = float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(field, f"expected a number, got {value!r}") from exc
    if not math.isfinite(number):
        raise ConfigError(field, f"must be finite, got {number}")
    if positive and number <= 0:
        raise ConfigError(field, f"must be > 0, got {number}")
    return number


def resolve_config(args: argparse.Namespace) -> RunConfig:
    file_config = _load_config_file(args.config) if args.config else {}

    mode = _pick(args.mode, file_config, "mode", None)
    if mode not in MODES:
        raise ConfigError("mode", f"must be one of {MODES}, got {mode!r}")
    setup = _pick(args.setup, file_config, "setup", None)
    if mode != "audit" and setup not in SETUPS:
        raise ConfigError("setup", f"must be one of {SETUPS}, got {setup!r}")
    if setup is not None and setup not in SETUPS:
        raise ConfigError("setup", f"must be one of {SETUPS}, got {setup!r}")

    kappa = _require_number(_pick(args.kappa, file_config, "kappa", 1.0), "kappa")
    kappa_prime = _require_number(
        _pick(args.kappa_prime, file_config, "kappa_prime", 1.0), "kappa_prime"
    )
    if kappa < 0:
        raise ConfigError("kappa", f"must be >= 0, got {kappa}")
    if kappa_prime < 0:
        raise ConfigError("kappa_prime", f"must be >= 0, got {kappa_prime}")

    scale = math.pi / 180.0 if args.degrees else 1.0
    theta3 = _require_number(_pick(args.theta3, file_config, "theta3", 0.0), "theta3")
    theta4 = _require_number(_pick(args.theta4, file_config, "theta4", 0.0), "theta4")
    if args.theta3 is not None:
        theta3 = args.theta3 * scale
    if args.theta4 is not None:
        theta4 = args.theta4 * scale

    geometry_values = {}
    for key, flag in zip(
        _GEOMETRY_KEYS,
        (args.source_sep, args.det_sep, args.distance, args.area1, args.area2, args.wavenumber),
    ):
        value = _pick(flag, file_config, key, None)
        geometry_values[key] = (
            _require_number(value, key, positive=True) if value is not None else None
        )
    if setup == "hbt" and mode != "audit":
        for key, value in geometry_values.items():
            if value is None:
                raise ConfigError(key, "required for the hbt setup")

    sweep_var = _pick(args.sweep_var, file_config, "sweep_var", None)
    sweep_start = _pick(args.sweep_start, file_config, "sweep_start", None)
    sweep_stop = _pick(args.sweep_stop, file_config, "sweep_stop", None)
    sweep_steps = _pick(args.sweep_steps, file_config, "sweep_steps", None)
    with_mc = bool(_pick(args.with_mc, file_config, "with_mc", False))
    if mode == "sweep":
        if sweep_var not in SWEEP_VARS:
            raise ConfigError(
                "sweep_var", f"must be one of {SWEEP_VARS}, got {sweep_var!r}"
            )
        sweep_start = _require_number(sweep_start, "sweep_start")
        sweep_stop = _require_number(sweep_stop, "sweep_stop")
        if args.sweep_start is not None:
            sweep_start = args.sweep_start * scale
        if args.sweep_stop is not None:
            sweep_stop = args.sweep_stop * scale
        try:
            sweep_steps = int(sweep_steps)
        except (TypeError, ValueError) as exc:
            raise ConfigError("sweep_steps", f"expected an integer, got {sweep_steps!r}") from exc
        if sweep_steps < 2:
            raise ConfigError("sweep_steps", f"must be >= 2, got {sweep_steps}")

    if args.seed is not None:
        seed = args.seed
    elif "seed" in file_config and file_config["seed"] is not None:
        seed = int(file_config["seed"])
    elif os.environ.get("LUNE_SEED"):
        try:
            seed = int(os.environ["LUNE_SEED"])
        except ValueError as exc:
            raise ConfigError("seed", f"LUNE_SEED is not an integer: {os.environ['LUNE_SEED']!r}") from exc
    else:
        seed = 0

    n_samples = int(_pick(args.n_samples, file_config, "n_samples", 100_000))
    if n_samples < 1:
        raise ConfigError("n_samples", f"must be >= 1, got {n_samples}")
    n_streams = int(_pick(args.n_streams, file_config, "n_streams", 1))
    if n_streams < 1:
        raise ConfigError("n_streams", f"must be >= 1, got {n_streams}")

    output = _pick(args.output, file_config, "output", "json")
    if output not in ("json", "csv"):
        raise ConfigError("output", f"must be 'json' or 'csv', got {output!r}")
    out = _pick(args.out, file_config, "out", "-")

    return RunConfig(
        mode=mode,
        setup=setup,
        kappa=kappa,
        kappa_prime=kappa_prime,
        theta3=theta3,
        theta4=theta4,
        **geometry_values,
        sweep_var=sweep_var,
        sweep_start=sweep_start if mode == "sweep" else None,
        sweep_stop=sweep_stop if mode == "sweep" else None,
        sweep_steps=sweep_steps if mode == "sweep" else None,
        with_mc=with_mc,
        seed=seed,
        n_samples=n_samples,
        n_streams=n_streams,
        output=output,
        out=out,
    )


def _geometry(cfg: RunConfig) -> SetupGeometry | None:
    if cfg.setup != "hbt":
        return None
    return SetupGeometry(
        source_separation=cfg.source_sep,
        detector_separation=cfg.det_sep,
        axial_distance=cfg.distance,
        area1=cfg.area1,
        area2=cfg.area2,
        wavenumber=cfg.wavenumber,
    )


def _breakdown(cfg: RunConfig, theta3: float, theta4: float) -> CorrelationBreakdown:
    params = EnsembleParams(cfg.kappa, cfg.kappa_prime)
    if cfg.setup == "hbt":
        return gamma_hbt(_geometry(cfg), params, theta3, theta4)
    return gamma_mz(params, theta3, theta4)


def _solid_angle(cfg: RunConfig, theta3: float, theta4: float) -> float:
    if cfg.setup == "hbt":
        return lune_solid_angle(theta3, theta4)
    return lune_solid_angle(math.pi / 2.0 - theta3, theta4)


def _mc_config(cfg: RunConfig) -> McConfig:
    return McConfig(
        setup=cfg.setup or "mz",
        params=EnsembleParams(cfg.kappa, cfg.kappa_prime),
        theta3=cfg.theta3,
        theta4=cfg.theta4,
        n_samples=cfg.n_samples,
        seed=cfg.seed,
        n_streams=cfg.n_streams,
        geometry=_geometry(cfg),
    )


def _complex_pair(z: complex) -> list[float]:
    return [z.real, z.imag]


def _analytic_results(cfg: RunConfig) -> dict:
    b = _breakdown(cfg, cfg.theta3, cfg.theta4)
    return {
        "total": b.total,
        "geometric_term": b.geometric_term,
        "trace_phase": cmath.phase(b.trace_factor),
        "solid_angle": _solid_angle(cfg, cfg.theta3, cfg.theta4),
        "fringe_coefficient": b.fringe_coefficient,
        "fringe_phase": b.fringe_phase,
        "terms": {label: _complex_pair(b.terms[label]) for label in TERM_LABELS},
    }


def _estimate_results(est: McEstimate) -> dict:
    return {
        "mean": est.mean,
        "std_error": est.std_error,
        "n_effective": est.n_effective,
        "analytic": est.analytic,
        "z_score": est.z_score,
    }


def _audit_results(cfg: RunConfig) -> dict:
    # the audit exercises only the sampler; layout and geometry are irrelevant
    audit_cfg = McConfig(
        setup="mz",
        params=EnsembleParams(cfg.kappa, cfg.kappa_prime),
        theta3=cfg.theta3,
        theta4=cfg.theta4,
        n_samples=cfg.n_samples,
        seed=cfg.seed,
        n_streams=cfg.n_streams,
    )
    report = moment_audit(audit_cfg)
    return {
        "n_samples": report.n_samples,
        "max_abs_z": report.max_abs_z,
        "checks": [
            {
                "category": c.category,
                "source": c.source,
                "indices": list(c.indices),
                "estimate": _complex_pair(c.estimate),
                "expected": _complex_pair(c.expected),
                "std_error": [c.std_error_re, c.std_error_im],
                "z": c.z,
            }
            for c in report.checks
        ],
    }


def _sweep_rows(cfg: RunConfig) -> tuple[list[dict], FringeScanResult | None]:
    grid = np.linspace(cfg.sweep_start, cfg.sweep_stop, cfg.sweep_steps)
    scan = fringe_scan(_mc_config(cfg), cfg.sweep_var, grid) if cfg.with_mc else None
    rows = []
    for idx, value in enumerate(grid):
        theta3 = float(value) if cfg.sweep_var == "theta3" else cfg.theta3
        theta4 = float(value) if cfg.sweep_var == "theta4" else cfg.theta4
        b = _breakdown(cfg, theta3, theta4)
        est = scan.points[idx][1] if scan is not None else None
        rows.append(
            {
                "var_value": float(value),
                "gamma_analytic": b.total,
                "gamma_mc_mean": est.mean if est else None,
                "gamma_mc_stderr": est.std_error if est else None,
                "z_score": est.z_score if est else None,
                "trace_phase": cmath.phase(b.trace_factor),
                "solid_angle": _solid_angle(cfg, theta3, theta4),
            }
        )
    return rows, scan


def _fit_dict(scan: FringeScanResult) -> dict:
    fit = scan.fit
    return {
        "variable": scan.variable,
        "offset": fit.offset,
        "amplitude": fit.amplitude,
        "visibility": fit.visibility,
        "visibility_std_error": fit.visibility_std_error,
        "phase": fit.phase,
        "phase_std_error": fit.phase_std_error,
        "amplitude_free": fit.amplitude_free,
    }


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.15g}"
    return str(value)


def _results_csv(cfg: RunConfig, results: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    if cfg.mode == "sweep":
        writer.writerow(SWEEP_CSV_HEADER)
        for row in results["rows"]:
            writer.writerow(_fmt(row[key]) for key in SWEEP_CSV_HEADER)
    elif cfg.mode == "analytic":
        header = [
            "setup",
            "theta3",
            "theta4",
            "kappa",
            "kappa_prime",
            "total",
            "geometric_term",
            "trace_phase",
            "solid_angle",
        ]
        values = [
            cfg.setup,
            _fmt(cfg.theta3),
            _fmt(cfg.theta4),
            _fmt(cfg.kappa),
            _fmt(cfg.kappa_prime),
            _fmt(results["total"]),
            _fmt(results["geometric_term"]),
            _fmt(results["trace_phase"]),
            _fmt(results["solid_angle"]),
        ]
        for label in TERM_LABELS:
            header += [f"term_{label}_re", f"term_{label}_im"]
            values += [_fmt(results["terms"][label][0]), _fmt(results["terms"][label][1])]
        writer.writerow(header)
        writer.writerow(values)
    elif cfg.mode == "montecarlo":
        header = [
            "setup",
            "theta3",
            "theta4",
            "kappa",
            "kappa_prime",
            "seed",
            "n_streams",
            "n_effective",
            "mean",
            "std_error",
            "analytic",
            "z_score",
        ]
        writer.writerow(header)
        writer.writerow(
            [
                cfg.setup,
                _fmt(cfg.theta3),
                _fmt(cfg.theta4),
                _fmt(cfg.kappa),
                _fmt(cfg.kappa_prime),
                cfg.seed,
                cfg.n_streams,
                results["n_effective"],
                _fmt(results["mean"]),
                _fmt(results["std_error"]),
                _fmt(results["analytic"]),
                _fmt(results["z_score"]),
            ]
        )
    else:  # audit
        writer.writerow(
            [
                "category",
                "source",
                "indices",
                "estimate_re",
                "estimate_im",
                "expected_re",
                "expected_im",
                "std_error_re",
                "std_error_im",
                "z",
            ]
        )
        for c in results["checks"]:
            writer.writerow(
                [
                    c["category"],
                    "" if c["source"] is None else c["source"],
                    "".join(str(i) for i in c["indices"]),
                    _fmt(c["estimate"][0]),
                    _fmt(c["estimate"][1]),
                    _fmt(c["expected"][0]),
                    _fmt(c["expected"][1]),
                    _fmt(c["std_error"][0]),
                    _fmt(c["std_error"][1]),
                    _fmt(c["z"]),
                ]
            )
    return buf.getvalue()


def execute(cfg: RunConfig) -> dict:
    """Run the configured mode and return the full output document."""
    if cfg.mode == "analytic":
        results = _analytic_results(cfg)
    elif cfg.mode == "montecarlo":
        results = _estimate_results(estimate_gamma(_mc_config(cfg)))
    elif cfg.mode == "audit":
        results = _audit_results(cfg)
    else:
        rows, scan = _sweep_rows(cfg)
        results = {"rows": rows}
        if scan is not None:
            results["fit"] = _fit_dict(scan)
    return {
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "config": cfg.as_dict(),
        "results": results,
    }


def _write(cfg: RunConfig, document: dict) -> None:
    if cfg.output == "json":
        payload = json.dumps(document, sort_keys=True, indent=2) + "\n"
    else:
        payload = _results_csv(cfg, document["results"])
    if cfg.out == "-":
        sys.stdout.write(payload)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"lunehbt: error: {exc}", file=sys.stderr)
        return 2
    try:
        document = execute(cfg)
    except (ValueError, np.linalg.LinAlgError) as exc:
        print(f"lunehbt: error: {exc}", file=sys.stderr)
        return 2
    try:
        _write(cfg, document)
    except OSError as exc:
        print(f"lunehbt: error: cannot write {cfg.out}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
