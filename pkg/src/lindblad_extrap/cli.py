"""Experiment harness: config-driven curves, extrapolation, verification,
and figure-recipe reproduction.

Subcommands:

* ``curve``        evolve a model over a quantized step grid, sample the
                   observable with shot noise, write curve.csv + meta.json
* ``extrapolate``  read a curve file, extrapolate to step size zero, write
                   result.json
* ``verify``       run the theory verification suites, write report.json
* ``reproduce``    run a committed figure recipe (fig1..fig4) end to end,
                   both grid kinds, and write a renderer spec

Exit codes: 0 success, 1 runtime error, 2 invalid config or unsupported
regime.  Every output embeds the fully resolved configuration and seeds;
re-running a meta.json reproduces byte-identical CSVs.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .extrapolation import (
    ExtrapolationWeights,
    extrapolate,
    fitted_curve,
    regression_weights,
    richardson_weights,
)
from .grids import (
    StepGrid,
    UnsupportedRegimeError,
    chebyshev_grid,
    equidistant_grid,
    quantize_grid,
    recommended_interval,
)
from .integrators import IntegratorKind, evolve
from .model import generator_bound, model_to_json
from .reference import exact_evolve
from .sampling import BORN, _measure_matrix, rng_stream
from .verification import run_checks
from .zoo import by_name

log = logging.getLogger("lindblad_extrap")

GRID_KINDS = {"chebyshev": chebyshev_grid, "equidistant": equidistant_grid}
INTEGRATORS = {
    "kraus": IntegratorKind.KRAUS_FIRST_ORDER,
    "dilated": IntegratorKind.DILATED_HAMILTONIAN,
}
CURVE_COLUMNS = [
    "node_index",
    "tau",
    "step_count",
    "noiseless",
    "noisy_mean",
    "n_shots",
    "seed",
    "reference",
]


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


def _require(cfg: dict, key: str, where: str):
    if key not in cfg:
        raise ConfigError(f"missing key {key!r} in {where}")
    return cfg[key]


def resolve_config(cfg: dict) -> dict:
    """Validate a config and fill defaults; accepts a meta.json wrapper."""
    if "config" in cfg and "model" not in cfg:
        cfg = cfg["config"]
    model = dict(_require(cfg, "model", "config"))
    _require(model, "name", "config.model")
    model.setdefault("params", {})
    model.setdefault("seed", 0)
    integrator = _require(cfg, "integrator", "config")
    if integrator not in INTEGRATORS:
        raise ConfigError(f"config.integrator must be one of {list(INTEGRATORS)}")
    total_time = float(_require(cfg, "total_time", "config"))
    if total_time <= 0:
        raise ConfigError("config.total_time must be positive")
    grid = dict(_require(cfg, "grid", "config"))
    if grid.get("kind") not in GRID_KINDS:
        raise ConfigError(f"config.grid.kind must be one of {list(GRID_KINDS)}")
    n_nodes = int(_require(grid, "n_nodes", "config.grid"))
    if n_nodes < 2:
        raise ConfigError("config.grid.n_nodes must be >= 2")
    grid["n_nodes"] = n_nodes
    interval = _require(grid, "interval", "config.grid")
    if interval != "auto" and float(interval) <= 0:
        raise ConfigError("config.grid.interval must be positive or 'auto'")
    extrap = dict(cfg.get("extrapolation", {"method": "richardson"}))
    if extrap.get("method") not in ("richardson", "regression"):
        raise ConfigError("config.extrapolation.method must be richardson|regression")
    if extrap["method"] == "regression":
        degree = int(_require(extrap, "degree", "config.extrapolation"))
        if not 0 <= degree < n_nodes - 1:
            raise ConfigError(
                f"regression degree must be in [0, {n_nodes - 2}], got {degree}"
            )
        extrap["degree"] = degree
    else:
        extrap["degree"] = None
    shots = dict(_require(cfg, "shots", "config"))
    if int(_require(shots, "n_shots", "config.shots")) < 1:
        raise ConfigError("config.shots.n_shots must be >= 1")
    shots.setdefault("seed", 0)
    shots.setdefault("mode", BORN)
    if shots["mode"] not in ("born", "gaussian"):
        raise ConfigError("config.shots.mode must be born|gaussian")
    return {
        "model": model,
        "integrator": integrator,
        "total_time": total_time,
        "grid": grid,
        "extrapolation": extrap,
        "shots": shots,
        "reference_tol": float(cfg.get("reference_tol", 1e-10)),
    }


def _build_grid(cfg: dict, model) -> StepGrid:
    grid_cfg = cfg["grid"]
    if grid_cfg["interval"] == "auto":
        l = generator_bound(model)
        try:
            interval = recommended_interval(l, cfg["total_time"])
        except UnsupportedRegimeError as exc:
            raise ConfigError(f"grid interval 'auto' failed: {exc}") from exc
    else:
        interval = float(grid_cfg["interval"])
    raw = GRID_KINDS[grid_cfg["kind"]](interval, grid_cfg["n_nodes"] - 1)
    return quantize_grid(raw, 1.0)


def _node_job(args):
    """Worker for one grid node: evolve and measure.  Top level so process
    pools can pickle it; determinism comes from the keyed stream."""
    (model, rho0, k_steps, kind, obs, n_shots, seed, node_index, mode) = args
    traj = evolve(model, rho0, 1.0, k_steps, kind)
    noiseless = float(np.trace(traj.final_state @ obs.matrix).real)
    mean, _ = _measure_matrix(
        traj.final_state, obs, n_shots, rng_stream(seed, node_index), mode
    )
    return node_index, noiseless, mean


def run_curve(cfg: dict, jobs: int = 1) -> dict:
    """Execute the curve pipeline; returns rows plus resolved metadata.

    The model is rescaled so the evolution always runs to unit time: the
    configured total_time is folded into the generator.
    """
    from .model import rescale_model

    cfg = resolve_config(cfg)
    model, obs, rho0 = by_name(
        cfg["model"]["name"], cfg["model"]["params"], cfg["model"]["seed"]
    )
    rescaled = rescale_model(model, cfg["total_time"])
    grid = _build_grid(cfg, model)
    kind = INTEGRATORS[cfg["integrator"]]
    shots = cfg["shots"]
    payloads = [
        (
            rescaled,
            rho0,
            k,
            kind,
            obs,
            int(shots["n_shots"]),
            int(shots["seed"]),
            j,
            shots["mode"],
        )
        for j, k in enumerate(grid.step_counts)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = sorted(pool.map(_node_job, payloads))
    else:
        results = [_node_job(p) for p in payloads]
    reference = exact_evolve(rescaled, rho0, 1.0, cfg["reference_tol"])
    f_ref = float(np.trace(reference.state.matrix @ obs.matrix).real)
    rows = [
        {
            "node_index": j,
            "tau": grid.nodes[j],
            "step_count": grid.step_counts[j],
            "noiseless": noiseless,
            "noisy_mean": mean,
            "n_shots": int(shots["n_shots"]),
            "seed": int(shots["seed"]),
            "reference": f_ref,
        }
        for j, noiseless, mean in results
    ]
    return {
        "rows": rows,
        "grid": grid,
        "config": cfg,
        "reference": f_ref,
        "model_json": model_to_json(model),
        "generator_bound": generator_bound(model),
    }


def write_curve_outputs(out: Path, curve: dict, formats=("csv",)) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "curve.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CURVE_COLUMNS)
        for row in curve["rows"]:
            writer.writerow(
                [
                    row["node_index"],
                    repr(row["tau"]),
                    row["step_count"],
                    repr(row["noiseless"]),
                    repr(row["noisy_mean"]),
                    row["n_shots"],
                    row["seed"],
                    repr(row["reference"]),
                ]
            )
    meta = {
        "config": curve["config"],
        "grid": curve["grid"].to_json(),
        "reference": curve["reference"],
        "generator_bound": curve["generator_bound"],
        "version": __version__,
    }
    _write_json(out / "meta.json", meta)
    if "json" in formats:
        _write_json(out / "curve.json", {"columns": CURVE_COLUMNS, "rows": curve["rows"]})
    return csv_path


def _write_json(path: Path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_curve_csv(path) -> dict:
    """Parse a curve file into column arrays; tolerates the plain sampling
    export schema (``mean`` instead of ``noisy_mean``)."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ConfigError(f"{path}: empty curve file")
        rows = list(reader)
    if not rows:
        raise ConfigError(f"{path}: no data rows")
    cols = set(rows[0])
    value_col = "noisy_mean" if "noisy_mean" in cols else "mean"
    if "tau" not in cols or value_col not in cols:
        raise ConfigError(f"{path}: need columns tau and noisy_mean (or mean)")
    try:
        taus = [float(r["tau"]) for r in rows]
        values = [float(r[value_col]) for r in rows]
        noiseless = (
            [float(r["noiseless"]) for r in rows] if "noiseless" in cols else None
        )
        reference = float(rows[0]["reference"]) if "reference" in cols else None
    except ValueError as exc:
        raise ConfigError(f"{path}: malformed numeric field ({exc})") from exc
    return {
        "taus": taus,
        "values": values,
        "noiseless": noiseless,
        "reference": reference,
    }


def run_extrapolation(curve: dict, method: str, degree: int | None) -> dict:
    order = np.argsort(curve["taus"])
    taus = [curve["taus"][i] for i in order]
    values = [curve["values"][i] for i in order]
    grid = StepGrid(nodes=tuple(taus), interval_hi=max(taus))
    if method == "richardson":
        weights: ExtrapolationWeights = richardson_weights(grid)
    elif method == "regression":
        if degree is None:
            raise ConfigError("regression extrapolation requires a degree")
        weights = regression_weights(grid, degree)
    else:
        raise ConfigError(f"unknown extrapolation method {method!r}")
    result = extrapolate(weights, values)
    dense = np.linspace(0.0, max(taus), 201)
    payload = result.to_json()
    payload["nodes"] = taus
    payload["node_values"] = values
    payload["curve_samples"] = [
        [float(t), float(v)] for t, v in zip(dense, fitted_curve(weights, values, dense))
    ]
    if curve.get("noiseless") is not None:
        noiseless = [curve["noiseless"][i] for i in order]
        payload["noiseless_value_at_zero"] = extrapolate(weights, noiseless).value_at_zero
    if curve.get("reference") is not None:
        payload["reference"] = curve["reference"]
        payload["extrapolation_error"] = abs(
            payload["value_at_zero"] - curve["reference"]
        )
    return payload


def _load_fig_config(name: str) -> dict:
    ref = resources.files("lindblad_extrap").joinpath(f"configs/{name}.json")
    if not ref.is_file():
        raise ConfigError(f"unknown figure recipe {name!r}")
    return json.loads(ref.read_text())


def run_reproduce(
    name: str,
    out_dir: Path,
    seed: int | None = None,
    shots: int | None = None,
    sampling: str | None = None,
    jobs: int = 1,
) -> dict:
    """Run a figure recipe on both grid kinds and compare extrapolation
    errors against the exact reference."""
    cfg = _load_fig_config(name)
    if seed is not None:
        cfg["shots"]["seed"] = seed
    if shots is not None:
        cfg["shots"]["n_shots"] = shots
    if sampling is not None:
        cfg["shots"]["mode"] = sampling
    extrap = cfg.get("extrapolation", {"method": "richardson", "degree": None})
    comparison = {
        "figure": name,
        "config_overrides": {"seed": seed, "shots": shots, "sampling": sampling},
    }
    panels = []
    reference = None
    for kind in ("equidistant", "chebyshev"):
        sub = dict(cfg, grid=dict(cfg["grid"], kind=kind))
        curve = run_curve(sub, jobs=jobs)
        panel_dir = out_dir / kind
        write_curve_outputs(panel_dir, curve)
        parsed = {
            "taus": [r["tau"] for r in curve["rows"]],
            "values": [r["noisy_mean"] for r in curve["rows"]],
            "noiseless": [r["noiseless"] for r in curve["rows"]],
            "reference": curve["reference"],
        }
        result = run_extrapolation(parsed, extrap["method"], extrap.get("degree"))
        _write_json(panel_dir / "result.json", result)
        reference = curve["reference"]
        comparison[kind] = {
            "value_at_zero": result["value_at_zero"],
            "error": result["extrapolation_error"],
            "gamma_l1": result["gamma_l1"],
        }
        panels.append(
            {
                "label": f"{kind.capitalize()} time steps",
                "curve_csv": f"{kind}/curve.csv",
                "result_json": f"{kind}/result.json",
            }
        )
    comparison["reference"] = reference
    comparison["chebyshev_beats_equidistant"] = bool(
        comparison["chebyshev"]["error"] < comparison["equidistant"]["error"]
    )
    _write_json(out_dir / "comparison.json", comparison)
    spec = {
        "title": name,
        "panels": panels,
        "axis_labels": {"x": "step size tau", "y": "observable"},
        "output": f"{name}.svg",
    }
    _write_json(out_dir / "figure_spec.json", spec)
    return comparison


def _cmd_curve(args) -> int:
    with open(args.config) as fh:
        cfg = json.load(fh)
    if args.seed is not None:
        if "config" in cfg and "model" not in cfg:
            cfg = cfg["config"]
        cfg.setdefault("shots", {})["seed"] = args.seed
    if args.dry_run:
        print(json.dumps(resolve_config(cfg), indent=2, sort_keys=True))
        return 0
    curve = run_curve(cfg, jobs=args.jobs)
    formats = ("csv", "json") if args.format == "json" else ("csv",)
    path = write_curve_outputs(Path(args.out), curve, formats)
    log.info("wrote %s", path)
    return 0


def _cmd_extrapolate(args) -> int:
    curve = read_curve_csv(args.curve)
    payload = run_extrapolation(curve, args.method, args.degree)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "result.json", payload)
    print(json.dumps({"value_at_zero": payload["value_at_zero"]}, sort_keys=True))
    return 0


def _cmd_verify(args) -> int:
    overrides = {}
    if args.l is not None:
        if args.scope != "sequences":
            raise ConfigError("--l applies to the sequences scope only")
        overrides["l_values"] = (args.l,)
    checks = run_checks(args.scope, **overrides)
    passed = all(c.passed for c in checks)
    report = {
        "scope": args.scope,
        "passed": passed,
        "checks": [c.to_json() for c in checks],
        "version": __version__,
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "report.json", report)
    for c in checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name} (margin {c.margin:.3e})")
    return 0 if passed else 1


def _cmd_reproduce(args) -> int:
    comparison = run_reproduce(
        args.figure,
        Path(args.out) / args.figure,
        seed=args.seed,
        shots=args.shots,
        sampling=args.sampling,
        jobs=args.jobs,
    )
    print(json.dumps(comparison, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lindblad-extrap",
        description="Lindblad simulation with zero-step-size extrapolation",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curve", help="evolve + sample an observable curve")
    p.add_argument("--config", required=True, help="experiment config JSON (or meta.json)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="worker pool size for nodes")
    p.add_argument("--seed", type=int, default=None, help="override the shot seed")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--dry-run", action="store_true", help="emit resolved config only")
    p.set_defaults(fn=_cmd_curve)

    p = sub.add_parser("extrapolate", help="extrapolate a curve file to tau=0")
    p.add_argument("--curve", required=True, help="curve.csv path")
    p.add_argument("--method", choices=("richardson", "regression"), default="richardson")
    p.add_argument("--degree", type=int, default=None, help="regression degree")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=_cmd_extrapolate)

    p = sub.add_parser("verify", help="run the theory verification suites")
    p.add_argument(
        "--scope",
        choices=("sequences", "gevrey", "dilation", "nodes", "all"),
        default="all",
    )
    p.add_argument("--l", type=float, default=None, help="generator bound override")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("reproduce", help="run a committed figure recipe")
    p.add_argument("figure", choices=("fig1", "fig2", "fig3", "fig4"))
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override the shot seed")
    p.add_argument("--shots", type=int, default=None, help="override the shot count")
    p.add_argument("--sampling", choices=("born", "gaussian"), default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=_cmd_reproduce)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("LINDBLAD_EXTRAP_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, UnsupportedRegimeError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - runtime failures exit 1
        log.exception("runtime failure")
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
