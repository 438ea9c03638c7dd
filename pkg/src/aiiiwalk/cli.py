"""Command-line entry point: ``aiiiwalk {walk,ensemble,stats,spectrum,replay,presets}``."""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, config as cfgmod, disorder, observables, spectral
from .config import ConfigError
from .ensemble import EnsembleError, peak_statistics, run_ensemble
from .spectral import EigensolverError
from .walk import EdgeError, init_localized, lattice_for, step_experiment, step_floquet

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2
NUMERIC_ERRORS = (EdgeError, EigensolverError, EnsembleError, FloatingPointError, np.linalg.LinAlgError)


def _f(x) -> str:
    return f"{float(x):.17g}"


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


# --- commands -------------------------------------------------------------------


def cmd_walk(cfg, out: Path, workers=None) -> list[str]:
    t_max = cfg["t_max"]
    L = lattice_for(t_max)
    spec = replace(cfgmod.disorder_spec(cfg), n_sites=2 * L + 1, n_steps=max(t_max, 1))
    field = disorder.draw(spec, disorder.RealizationSeed(spec.base_seed, cfg["realization"]), origin=-L)
    step = step_floquet if cfg["form"] == "floquet" else step_experiment

    state = init_localized(0, cfg["input_spin"], L)
    records, dps = [], []
    for t in range(t_max + 1):
        records.append(observables.measure_probabilities(state, cfg["measure_basis"], t, cfg["input_spin"]))
        dps.append(observables.spin_polarization(observables.measure_probabilities(state, "sigma2_RL", t)))
        if t < t_max:
            state = step(state, field, t)

    observables.write_probabilities_csv(records, out / "probabilities.csv")
    observables.write_polarization_csv(observables.PolarizationSeries(np.arange(t_max + 1), np.array(dps)), out / "polarization.csv")
    disorder.export_csv(field, out / "angles.csv", origin=-L)
    return ["probabilities.csv", "polarization.csv", "angles.csv"]


def _fit_rows(result, cfg):
    rows = []
    for t, rec in sorted(result.mean_probability.items()):
        ratio = observables.edge_peak_ratio(rec.sites, rec.traced(), t) if t >= 2 else float("nan")
        try:
            fits = observables.fit_profile(rec, cfg["fit_window"])
        except ValueError as exc:
            rows.append([t, "none", "nan", "nan", "nan", "", "", _f(ratio), f"fit failed: {exc}"])
            continue
        best = max(fits, key=lambda f: f.fit_quality).model
        for f in fits:
            rows.append([t, f.model, _f(f.scale), _f(f.loglog_slope), _f(f.fit_quality), f.q_window[0], f.q_window[1], _f(ratio), "preferred" if f.model == best else ""])
    return rows


def cmd_ensemble(cfg, out: Path, workers=None) -> list[str]:
    ec = cfgmod.ensemble_config(cfg, workers)
    _progress(f"ensemble: {ec.n_realizations} realizations of {ec.disorder.model}, t_max={ec.t_max}")
    result = run_ensemble(ec)
    observables.write_probabilities_csv(list(result.mean_probability.values()), out / "probabilities.csv")
    observables.write_polarization_csv(result.mean_delta_p, out / "polarization.csv", result.stderr_delta_p)
    observables.write_spectrum_csv(result.spectrum, out / "spectrum.csv")
    _write_rows(
        out / "fits.csv",
        ["t", "model", "scale", "loglog_slope", "r2", "q_lo", "q_hi", "edge_peak_ratio", "note"],
        _fit_rows(result, cfg),
    )
    files = ["probabilities.csv", "polarization.csv", "spectrum.csv", "fits.csv"]
    if result.per_realization_delta_p is not None:
        dp = result.per_realization_delta_p
        _write_rows(out / "per_realization.csv", ["realization"] + [f"t{t}" for t in range(dp.shape[1])],
                    [[i] + [_f(x) for x in row] for i, row in enumerate(dp)])
        files.append("per_realization.csv")
    return files


def cmd_stats(cfg, out: Path, workers=None) -> list[str]:
    ec = cfgmod.ensemble_config(cfg, workers)
    n_ens = cfg["n_ensembles"]
    _progress(f"stats: {n_ens} x {ec.n_realizations} realizations of {ec.disorder.model}")
    stats = peak_statistics(replace(ec, snapshots=()), n_ens)
    _write_rows(out / "scatter.csv", ["ensemble", "S0", "Spi"], [[e, _f(a), _f(b)] for e, (a, b) in enumerate(stats.samples)])
    observables.write_spectrum_csv(stats.mean_spectrum, out / "spectrum_stats.csv", stats.std_spectrum)
    return ["scatter.csv", "spectrum_stats.csv"]


def _ring_field(cfg):
    n = cfg["n_sites"]
    model, theta = cfg["model"], cfg["theta"]
    if model == "dephasing_binary":
        raise ConfigError("spectrum needs a static angle field; dephasing_binary is time dependent")
    spec = disorder.DisorderSpec(model, theta, cfg["phi"], cfg["seed"], n_sites=n)
    return disorder.draw(spec, disorder.RealizationSeed(cfg["seed"], cfg["realization"]), origin=0)


def cmd_spectrum(cfg, out: Path, workers=None) -> list[str]:
    n = cfg["n_sites"]
    if n % 2:
        raise ConfigError(f"n_sites must be even for the spectrum, got {n}")
    field = _ring_field(cfg)
    spec = spectral.quasienergies(field, n, cfg["form"], cfg["seed"])
    report = spectral.symmetry_report(field, n, cfg["form"])
    spectral.export_csv(spec, out / "eigenphases.csv")
    gaps = [
        [name, _f(c), _f(spectral.gap_at(spec, c)), _f(spec.level_spacing), _f(spectral.gap_at(spec, c) / spec.level_spacing)]
        for name, c in spectral.CENTERS.items()
    ]
    _write_rows(out / "gaps.csv", ["center", "value", "gap", "level_spacing", "gap_over_spacing"], gaps)
    _write_rows(out / "symmetry.csv", ["quantity", "value"],
                [[k, _f(v)] for k, v in vars(report).items()])
    return ["eigenphases.csv", "gaps.csv", "symmetry.csv"]


COMMANDS = {"walk": cmd_walk, "ensemble": cmd_ensemble, "stats": cmd_stats, "spectrum": cmd_spectrum}


# --- manifest -------------------------------------------------------------------


def sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def run_command(name: str, cfg, out: Path, workers=None) -> dict:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    files = COMMANDS[name](cfg, out, workers)
    manifest = {
        "command": name,
        "config": cfg.echo(),
        "base_seed": cfg["seed"],
        "tool_version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "outputs": {f: sha256(out / f) for f in files},
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def replay(manifest_path, out: Path, workers=None) -> tuple[bool, dict]:
    with open(manifest_path) as fh:
        old = json.load(fh)
    cfg = cfgmod.resolve({k: (v, f"{manifest_path}:{k}") for k, v in old["config"].items()})
    new = run_command(old["command"], cfg, out, workers)
    return new["outputs"] == old["outputs"], new


# --- argument parsing --------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="aiiiwalk", description="Disordered spin-1/2 quantum walk simulator")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        src = p.add_mutually_exclusive_group()
        src.add_argument("--config", "-c", type=Path)
        src.add_argument("--preset", "-p")
        p.add_argument("--set", "-s", action="append", default=[], metavar="KEY=VALUE")
        p.add_argument("--out", "-o", type=Path)
        p.add_argument("--workers", "-j", type=int)
        if name == "stats":
            p.add_argument("--n-ensembles", type=int)
    p = sub.add_parser("replay")
    p.add_argument("manifest", type=Path)
    p.add_argument("--out", "-o", type=Path, required=True)
    p.add_argument("--workers", "-j", type=int)
    sub.add_parser("presets")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "presets":
            print("\n".join(cfgmod.preset_names()))
            return EXIT_OK
        if args.command == "replay":
            same, new = replay(args.manifest, args.out, args.workers)
            print("replay identical" if same else "replay MISMATCH")
            return EXIT_OK if same else EXIT_NUMERIC
        overrides = list(args.set)
        if getattr(args, "n_ensembles", None) is not None:
            overrides.append(f"n_ensembles={args.n_ensembles}")
        cfg = cfgmod.load(args.config, args.preset, overrides)
        label = args.preset or (args.config.stem if args.config else "default")
        out = args.out or Path("runs") / f"{args.command}-{label}"
        manifest = run_command(args.command, cfg, out, args.workers)
        for f in manifest["outputs"]:
            print(out / f)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
