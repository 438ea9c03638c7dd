"""Flat ``key = value`` run configuration with shipped presets.

Lines are ``key = value``; ``#`` starts a comment. Angles accept plain
floats or multiples of pi (``pi/8``, ``-3*pi/16``). Unknown keys are errors.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from importlib import resources

from .disorder import MODELS, DisorderSpec
from .ensemble import EnsembleConfig, default_workers
from .walk import SPIN_ALIASES, SPIN_VECTORS


class ConfigError(ValueError):
    pass


_PI_RE = re.compile(r"^([+-]?)(\d*\.?\d*)\s*\*?\s*pi(?:\s*/\s*(\d+(?:\.\d*)?))?$")


def parse_angle(text: str) -> float:
    s = text.strip()
    m = _PI_RE.match(s)
    if m:
        sign, coef, denom = m.groups()
        val = (float(coef) if coef else 1.0) * math.pi / (float(denom) if denom else 1.0)
        return -val if sign == "-" else val
    return float(s)


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int_pair(text: str) -> tuple:
    parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
    if len(parts) != 2:
        raise ValueError(f"expected two integers, got {text!r}")
    return tuple(int(p) for p in parts)


def _int_list(text: str) -> tuple:
    return tuple(int(p) for p in re.split(r"[,\s]+", text.strip()) if p)


def _choice(options):
    def parse(text):
        t = text.strip()
        if t not in options:
            raise ValueError(f"expected one of {sorted(options)}, got {t!r}")
        return t

    return parse


def _optional_pair(text: str):
    return None if text.strip() in ("auto", "") else _int_pair(text)


SPINS = tuple(SPIN_VECTORS) + tuple(SPIN_ALIASES)

# key -> (parser, default)
SCHEMA = {
    "model": (_choice(MODELS), "static_binary"),
    "theta": (parse_angle, "pi/8"),
    "phi": (parse_angle, "0"),
    "seed": (int, "0"),
    "t_max": (int, "14"),
    "n_realizations": (int, "500"),
    "input_spin": (_choice(SPINS), "-"),
    "measure_basis": (_choice(("sigma2_RL", "sigma3")), "sigma2_RL"),
    "window": (_int_pair, "5, 14"),
    "snapshots": (_int_list, "14"),
    "n_ensembles": (int, "200"),
    "n_sites": (int, "64"),
    "form": (_choice(("floquet", "experiment")), "floquet"),
    "keep_per_realization": (_bool, "false"),
    "fit_window": (_optional_pair, "auto"),
    "realization": (int, "0"),
}


@dataclass
class RunConfig:
    values: dict
    raw: dict

    def __getitem__(self, key):
        return self.values[key]

    def echo(self) -> dict:
        """Resolved configuration as re-parseable strings (floats via repr)."""
        out = {}
        for key, val in self.values.items():
            if isinstance(val, bool):
                out[key] = "true" if val else "false"
            elif isinstance(val, float):
                out[key] = repr(val)
            elif isinstance(val, tuple):
                out[key] = ", ".join(str(v) for v in val)
            elif val is None:
                out[key] = "auto"
            else:
                out[key] = str(val)
        return out


def parse_text(text: str, source: str = "<config>") -> dict:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, val = (p.strip() for p in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        raw[key] = (val, f"{source}:{lineno}")
    return raw


def resolve(raw: dict, overrides=()) -> RunConfig:
    merged = {k: (v, "default") for k, (_, v) in SCHEMA.items()}
    merged.update(raw)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected key=value")
        key, val = (p.strip() for p in item.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"override: unknown key {key!r}")
        merged[key] = (val, "command line")
    values = {}
    for key, (text, where) in merged.items():
        try:
            values[key] = SCHEMA[key][0](text)
        except ValueError as exc:
            raise ConfigError(f"{where}: key {key!r}: {exc}") from None
    return RunConfig(values, {k: v for k, (v, _) in merged.items()})


def preset_names() -> list[str]:
    files = resources.files("aiiiwalk") / "presets"
    return sorted(p.name[:-4] for p in files.iterdir() if p.name.endswith(".cfg"))


def preset_text(name: str) -> str:
    path = resources.files("aiiiwalk") / "presets" / f"{name}.cfg"
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return path.read_text()


def load(path=None, preset=None, overrides=()) -> RunConfig:
    if path is not None and preset is not None:
        raise ConfigError("give either a config file or a preset, not both")
    if preset is not None:
        raw = parse_text(preset_text(preset), f"preset:{preset}")
    elif path is not None:
        try:
            text = open(path).read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        raw = parse_text(text, str(path))
    else:
        raw = {}
    return resolve(raw, overrides)


def disorder_spec(cfg: RunConfig) -> DisorderSpec:
    try:
        return DisorderSpec(cfg["model"], cfg["theta"], cfg["phi"], cfg["seed"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def ensemble_config(cfg: RunConfig, workers: int | None = None) -> EnsembleConfig:
    try:
        return EnsembleConfig(
            disorder=disorder_spec(cfg),
            n_realizations=cfg["n_realizations"],
            t_max=cfg["t_max"],
            input_spin=cfg["input_spin"],
            measure_basis=cfg["measure_basis"],
            window=cfg["window"],
            worker_count=workers if workers is not None else default_workers(),
            snapshots=cfg["snapshots"],
            keep_per_realization=cfg["keep_per_realization"],
            form=cfg["form"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
