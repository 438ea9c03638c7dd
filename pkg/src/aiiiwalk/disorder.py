"""Angle-field realizations for the binary, dephasing and clean-gap models.

Every realization draws from its own generator, seeded by the pair
``(base_seed, realization_index)`` through :class:`numpy.random.SeedSequence`.
The mapping is stable across runs and independent of how realizations are
distributed over workers.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .walk import AngleField

MODELS = ("clean", "static_binary", "dephasing_binary", "uniform_theta", "staggered_theta")


@dataclass(frozen=True)
class DisorderSpec:
    model: str = "static_binary"
    theta_amplitude: float = np.pi / 8
    phi_value: float = 0.0
    base_seed: int = 0
    n_sites: int = 31
    n_steps: int = 14

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown disorder model {self.model!r}; expected one of {MODELS}")
        if not 0.0 <= self.theta_amplitude <= np.pi / 2 + 1e-15:
            raise ValueError(f"theta_amplitude must lie in [0, pi/2], got {self.theta_amplitude}")
        if self.base_seed < 0:
            raise ValueError("base_seed must be non-negative")
        if self.n_sites < 1 or self.n_steps < 1:
            raise ValueError("n_sites and n_steps must be positive")


@dataclass(frozen=True)
class RealizationSeed:
    base_seed: int
    realization_index: int

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.base_seed, self.realization_index]))


def _binary(rng: np.random.Generator, theta: float, shape) -> np.ndarray:
    # +theta or -theta with probability 1/2 each
    return theta * (2.0 * rng.integers(0, 2, size=shape) - 1.0)


def _phi(spec: DisorderSpec) -> np.ndarray:
    return np.full(spec.n_sites, float(spec.phi_value))


def draw_static(spec: DisorderSpec, seed: RealizationSeed) -> AngleField:
    if spec.model != "static_binary":
        raise ValueError(f"draw_static needs model 'static_binary', got {spec.model!r}")
    theta = _binary(seed.generator(), spec.theta_amplitude, spec.n_sites)
    return AngleField(_phi(spec), theta)


def draw_dephasing(spec: DisorderSpec, seed: RealizationSeed) -> AngleField:
    if spec.model != "dephasing_binary":
        raise ValueError(f"draw_dephasing needs model 'dephasing_binary', got {spec.model!r}")
    by_step = _binary(seed.generator(), spec.theta_amplitude, (spec.n_steps, spec.n_sites))
    return AngleField(_phi(spec), by_step[0].copy(), time_dependent=True, theta_by_step=by_step)


def make_uniform(theta_bar: float, n_sites: int) -> AngleField:
    return AngleField(np.zeros(n_sites), np.full(n_sites, float(theta_bar)))


def make_staggered(amplitude: float, n_sites: int, origin: int = 0) -> AngleField:
    """theta_q = amplitude * (-1)^q, with array index ``i`` holding site ``q = i + origin``."""
    q = np.arange(n_sites) + origin
    return AngleField(np.zeros(n_sites), amplitude * (-1.0) ** q)


def draw(spec: DisorderSpec, seed: RealizationSeed, origin: int = 0) -> AngleField:
    """Realization for any model; deterministic models ignore the seed."""
    if spec.model == "static_binary":
        return draw_static(spec, seed)
    if spec.model == "dephasing_binary":
        return draw_dephasing(spec, seed)
    if spec.model == "clean":
        return AngleField(_phi(spec), np.zeros(spec.n_sites))
    if spec.model == "uniform_theta":
        return AngleField(_phi(spec), np.full(spec.n_sites, spec.theta_amplitude))
    field = make_staggered(spec.theta_amplitude, spec.n_sites, origin)
    return AngleField(_phi(spec), field.theta)


def draw_theta_batch(spec: DisorderSpec, base_seed: int, indices, origin: int = 0) -> np.ndarray:
    """Stack theta arrays for many realizations.

    Shape is ``(len(indices), n_sites)`` for static models and
    ``(len(indices), n_steps, n_sites)`` for dephasing.
    """
    rows = []
    for i in indices:
        f = draw(spec, RealizationSeed(base_seed, int(i)), origin)
        rows.append(f.theta_by_step if f.time_dependent else f.theta)
    return np.stack(rows)


# --- CSV audit / replay --------------------------------------------------------


def export_csv(field: AngleField, path, origin: int = 0) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if field.time_dependent:
            w.writerow(["step", "site", "theta"])
            for s, row in enumerate(field.theta_by_step):
                for i, th in enumerate(row):
                    w.writerow([s, i + origin, f"{th:.17g}"])
        else:
            w.writerow(["site", "theta"])
            for i, th in enumerate(field.theta):
                w.writerow([i + origin, f"{th:.17g}"])


def import_csv(path) -> AngleField:
    with open(Path(path), newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if header == ["site", "theta"]:
        sites = sorted({int(r[0]) for r in body})
        theta = np.array([float(r[1]) for r in sorted(body, key=lambda r: int(r[0]))])
        return AngleField(np.zeros(len(sites)), theta)
    if header == ["step", "site", "theta"]:
        steps = max(int(r[0]) for r in body) + 1
        sites = sorted({int(r[1]) for r in body})
        lo = sites[0]
        by_step = np.zeros((steps, len(sites)))
        for r in body:
            by_step[int(r[0]), int(r[1]) - lo] = float(r[2])
        return AngleField(np.zeros(len(sites)), by_step[0].copy(), True, by_step)
    raise ValueError(f"unrecognized angle CSV header {header}")
