"""Seeded disorder ensembles, averaged observables and peak statistics.

Realizations are grouped into fixed-size blocks that do not depend on the
worker count; each block is evolved as one vectorized batch. Per-realization
results are gathered in index order and averaged with a fixed pairwise tree,
so any number of workers gives bitwise identical output.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .disorder import DisorderSpec, RealizationSeed, draw_static, draw_theta_batch
from .observables import PolarizationSeries, PowerSpectrum, ProbabilityRecord, _delta_p, _probabilities, power_spectrum
from .walk import EdgeError, _experiment, _floquet, lattice_for, spin_vector

BLOCK_SIZE = 100
WORKERS_ENV = "AIIIWALK_WORKERS"


class EnsembleError(RuntimeError):
    def __init__(self, realization_index: int, cause: Exception):
        super().__init__(f"realization {realization_index} failed: {cause}")
        self.realization_index = realization_index


def default_workers() -> int:
    return int(os.environ.get(WORKERS_ENV, "1"))


@dataclass(frozen=True)
class EnsembleConfig:
    disorder: DisorderSpec = field(default_factory=DisorderSpec)
    n_realizations: int = 500
    t_max: int = 14
    input_spin: str = "-"
    measure_basis: str = "sigma2_RL"
    window: tuple = (5, 14)
    worker_count: int = 1
    snapshots: tuple = (14,)
    keep_per_realization: bool = False
    form: str = "floquet"

    def __post_init__(self):
        if self.n_realizations < 1:
            raise ValueError("n_realizations must be >= 1")
        if self.window[0] < 1 or self.window[1] < self.window[0]:
            raise ValueError(f"invalid spectrum window {self.window}")
        if self.window[1] > self.t_max:
            raise ValueError(f"window {self.window} extends past t_max={self.t_max}")
        if any(t < 0 or t > self.t_max for t in self.snapshots):
            raise ValueError(f"snapshot times {self.snapshots} must lie in [0, t_max]")
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")
        if self.form not in ("floquet", "experiment"):
            raise ValueError(f"unknown form {self.form!r}")

    @property
    def lattice_halfwidth(self) -> int:
        return lattice_for(self.t_max)

    def resolved_disorder(self) -> DisorderSpec:
        return replace(self.disorder, n_sites=2 * self.lattice_halfwidth + 1, n_steps=max(self.t_max, 1))


@dataclass
class EnsembleResult:
    mean_probability: dict
    mean_delta_p: PolarizationSeries
    spectrum: PowerSpectrum
    stderr_delta_p: np.ndarray
    per_realization_delta_p: np.ndarray | None = None


@dataclass
class PeakStatistics:
    samples: np.ndarray
    n_ensembles: int
    n_realizations_each: int
    mean_spectrum: PowerSpectrum
    std_spectrum: np.ndarray


# --- reduction ---------------------------------------------------------------------


def tree_sum(a: np.ndarray) -> np.ndarray:
    """Sum over axis 0 with a fixed pairwise split; order depends only on the length."""
    n = a.shape[0]
    if n <= 8:
        acc = a[0].copy()
        for i in range(1, n):
            acc = acc + a[i]
        return acc
    h = n // 2
    return tree_sum(a[:h]) + tree_sum(a[h:])


def tree_mean(a: np.ndarray) -> np.ndarray:
    return tree_sum(a) / a.shape[0]


def mean_and_stderr(a: np.ndarray):
    """Two-pass mean and standard error (ddof=1) along axis 0."""
    n = a.shape[0]
    m = tree_mean(a)
    if n < 2:
        return m, np.zeros_like(m)
    var = tree_sum((a - m) ** 2) / (n - 1)
    return m, np.sqrt(var) / np.sqrt(n)


# --- block evolution ---------------------------------------------------------------


def _evolve_block(task):
    spec, indices, t_max, input_spin, basis, snapshots, form = task
    L = lattice_for(t_max)
    n = 2 * L + 1
    thetas = draw_theta_batch(spec, spec.base_seed, indices, origin=-L)
    dephasing = thetas.ndim == 3
    half_phi = spec.phi_value / 2 if spec.phi_value else None

    amps = np.zeros((len(indices), n, 2), dtype=complex)
    amps[:, L] = spin_vector(input_spin)
    dps = np.empty((len(indices), t_max + 1))
    snaps = {}
    for t in range(t_max + 1):
        dps[:, t] = _delta_p(amps)
        if t in snapshots:
            snaps[t] = _probabilities(amps, basis)
        if t == t_max:
            break
        theta = thetas[:, t] if dephasing else thetas
        if form == "floquet":
            amps = _floquet(amps, theta / 2, half_phi)
        else:
            amps = _experiment(amps, theta)
    return dps, snaps


def _run_block_checked(task):
    try:
        return _evolve_block(task)
    except EdgeError as exc:
        spec, indices, *rest = task
        for i in indices:
            try:
                _evolve_block((spec, [i], *rest))
            except EdgeError:
                raise EnsembleError(int(i), exc) from exc
        raise


def _blocks(indices):
    indices = list(indices)
    return [indices[i : i + BLOCK_SIZE] for i in range(0, len(indices), BLOCK_SIZE)]


def _map(tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [_run_block_checked(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(_run_block_checked, tasks))


def _tasks(config: EnsembleConfig, indices, snapshots):
    spec = config.resolved_disorder()
    return [
        (spec, blk, config.t_max, config.input_spin, config.measure_basis, tuple(snapshots), config.form)
        for blk in _blocks(indices)
    ]


def _assemble(config: EnsembleConfig, outputs, snapshots) -> EnsembleResult:
    dps = np.concatenate([o[0] for o in outputs])
    mean_dp, err = mean_and_stderr(dps)
    t_values = np.arange(config.t_max + 1)
    series = PolarizationSeries(t_values, mean_dp)
    probs = {}
    for t in snapshots:
        stack = np.concatenate([o[1][t] for o in outputs])
        probs[t] = ProbabilityRecord(t, tree_mean(stack), config.measure_basis, config.input_spin)
    return EnsembleResult(
        probs,
        series,
        power_spectrum(series, config.window),
        err,
        dps if config.keep_per_realization else None,
    )


def run_ensemble(config: EnsembleConfig, first_index: int = 0) -> EnsembleResult:
    """Average over realizations ``first_index .. first_index + n_realizations - 1``."""
    indices = range(first_index, first_index + config.n_realizations)
    snaps = tuple(sorted(set(config.snapshots)))
    outputs = _map(_tasks(config, indices, snaps), config.worker_count)
    return _assemble(config, outputs, snaps)


def peak_statistics(config: EnsembleConfig, n_ensembles: int) -> PeakStatistics:
    """(S(0), S(pi)) of ``n_ensembles`` independent ensembles.

    Ensemble ``e`` uses realization indices ``e * n_realizations + i``, so
    seed blocks never overlap.
    """
    if n_ensembles < 1:
        raise ValueError("n_ensembles must be >= 1")
    n_r = config.n_realizations
    tasks, owners = [], []
    for e in range(n_ensembles):
        ts = _tasks(config, range(e * n_r, (e + 1) * n_r), ())
        tasks += ts
        owners += [e] * len(ts)
    outputs = _map(tasks, config.worker_count)

    spectra = []
    for e in range(n_ensembles):
        mine = [o for o, k in zip(outputs, owners) if k == e]
        spectra.append(_assemble(config, mine, ()).spectrum)
    s = np.stack([sp.s_values for sp in spectra])
    samples = np.array([sp.peak_pair for sp in spectra])
    mean_s = tree_mean(s)
    std_s = np.sqrt(tree_sum((s - mean_s) ** 2) / (n_ensembles - 1)) if n_ensembles > 1 else np.zeros_like(mean_s)
    mean_spec = PowerSpectrum(spectra[0].omega_values, mean_s, spectra[0].window)
    return PeakStatistics(samples, n_ensembles, n_r, mean_spec, std_s)


def fluctuation_probe(config: EnsembleConfig, t: int | None = None) -> float:
    """Std over realizations of the mean of ``t`` binary angles (default t_max)."""
    if config.disorder.model != "static_binary":
        raise ValueError("fluctuation probe needs the static_binary model")
    t = config.t_max if t is None else t
    spec = replace(config.disorder, n_sites=t)
    means = np.array(
        [draw_static(spec, RealizationSeed(spec.base_seed, i)).theta.mean() for i in range(config.n_realizations)]
    )
    return float(np.std(means, ddof=1)) if means.size > 1 else 0.0


def fluctuation_scaling(config: EnsembleConfig, times=(16, 64, 256)) -> float:
    """Slope of log std against log t; 1/sqrt(t) scaling gives -0.5."""
    stds = [fluctuation_probe(config, t) for t in times]
    return float(np.polyfit(np.log(times), np.log(stds), 1)[0])


def spectrum_background(spectrum: PowerSpectrum) -> np.ndarray:
    """S values at every grid frequency other than 0 and pi."""
    n = spectrum.s_values.size
    mask = np.ones(n, dtype=bool)
    mask[0] = False
    if n % 2 == 0:
        mask[n // 2] = False
    return spectrum.s_values[mask]
