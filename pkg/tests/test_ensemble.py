import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import aiiiwalk.ensemble as ens
from aiiiwalk.disorder import DisorderSpec, RealizationSeed, draw
from aiiiwalk.ensemble import (
    EnsembleConfig,
    EnsembleError,
    fluctuation_probe,
    fluctuation_scaling,
    mean_and_stderr,
    peak_statistics,
    run_ensemble,
    spectrum_background,
    tree_sum,
)
from aiiiwalk.observables import measure_probabilities, spin_polarization
from aiiiwalk.walk import init_localized, lattice_for, step_floquet

THETA = np.pi / 8


def cfg(model="static_binary", **kw):
    base = dict(n_realizations=40, t_max=14, snapshots=(14,))
    base.update(kw)
    return EnsembleConfig(DisorderSpec(model, THETA, base_seed=kw.pop("seed", 11)), **base)


def single_run(spec, index, t_max, spin="-", basis="sigma2_RL"):
    L = lattice_for(t_max)
    full = replace(spec, n_sites=2 * L + 1, n_steps=t_max)
    field = draw(full, RealizationSeed(spec.base_seed, index), origin=-L)
    s = init_localized(0, spin, L)
    dps, recs = [], []
    for t in range(t_max + 1):
        recs.append(measure_probabilities(s, basis, t))
        dps.append(spin_polarization(measure_probabilities(s, "sigma2_RL", t)))
        if t < t_max:
            s = step_floquet(s, field, t)
    return np.array(dps), recs


def test_single_clean_realization_matches_direct_run():
    c = EnsembleConfig(DisorderSpec("clean", 0.0), n_realizations=1, t_max=6, window=(2, 5), snapshots=(3, 6))
    r = run_ensemble(c)
    dps, recs = single_run(c.disorder, 0, 6)
    np.testing.assert_array_equal(r.mean_delta_p.delta_p, dps)
    for t in (3, 6):
        np.testing.assert_array_equal(r.mean_probability[t].values, recs[t].values)
    assert np.all(r.stderr_delta_p == 0)


@pytest.mark.parametrize("model", ["static_binary", "dephasing_binary"])
def test_batched_realizations_match_direct_runs(model):
    c = cfg(model, n_realizations=5, keep_per_realization=True)
    r = run_ensemble(c, first_index=7)
    for k in range(5):
        dps, _ = single_run(c.disorder, 7 + k, c.t_max)
        np.testing.assert_allclose(r.per_realization_delta_p[k], dps, atol=1e-14)


def test_per_realization_mean_and_stderr():
    r = run_ensemble(cfg(n_realizations=60, keep_per_realization=True))
    m = r.per_realization_delta_p
    np.testing.assert_allclose(m.mean(axis=0), r.mean_delta_p.delta_p, atol=1e-12)
    # direct two-pass reference
    n = m.shape[0]
    mu = m.sum(axis=0) / n
    sd = np.sqrt(((m - mu) ** 2).sum(axis=0) / (n - 1))
    np.testing.assert_allclose(r.stderr_delta_p, sd / np.sqrt(n), rtol=1e-10, atol=1e-15)


def test_per_realization_dropped_by_default():
    assert run_ensemble(cfg(n_realizations=3)).per_realization_delta_p is None


def test_records_normalized():
    r = run_ensemble(cfg("dephasing_binary", n_realizations=30, snapshots=(0, 7, 14)))
    for rec in r.mean_probability.values():
        assert rec.total() == pytest.approx(1.0, abs=1e-10)
        assert np.all(rec.values >= 0)


@pytest.mark.parametrize("model", ["static_binary", "dephasing_binary"])
def test_worker_count_determinism(model):
    base = cfg(model, n_realizations=250, keep_per_realization=True)
    results = [run_ensemble(replace(base, worker_count=w)) for w in (1, 4, 16)]
    for r in results[1:]:
        assert np.array_equal(r.mean_delta_p.delta_p, results[0].mean_delta_p.delta_p)
        assert np.array_equal(r.stderr_delta_p, results[0].stderr_delta_p)
        assert np.array_equal(r.spectrum.s_values, results[0].spectrum.s_values)
        assert np.array_equal(r.mean_probability[14].values, results[0].mean_probability[14].values)


def test_peak_statistics_worker_determinism():
    base = cfg(n_realizations=120, snapshots=())
    a = peak_statistics(base, 6)
    b = peak_statistics(replace(base, worker_count=4), 6)
    assert np.array_equal(a.samples, b.samples)
    assert np.array_equal(a.std_spectrum, b.std_spectrum)


def test_evolution_error_reports_realization(monkeypatch):
    monkeypatch.setattr(ens, "lattice_for", lambda t: t - 2)
    with pytest.raises(EnsembleError) as info:
        run_ensemble(cfg(n_realizations=3), first_index=5)
    assert info.value.realization_index == 5


def test_config_validation():
    with pytest.raises(ValueError):
        cfg(n_realizations=0)
    with pytest.raises(ValueError):
        cfg(window=(0, 5))
    with pytest.raises(ValueError):
        cfg(window=(5, 20))
    with pytest.raises(ValueError):
        cfg(snapshots=(30,))


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=200))
@settings(max_examples=60, deadline=None)
def test_tree_sum(values):
    a = np.array(values)
    assert tree_sum(a) == pytest.approx(math.fsum(values), abs=1e-9)


def test_mean_and_stderr_single():
    m, e = mean_and_stderr(np.array([[1.0, 2.0]]))
    np.testing.assert_array_equal(m, [1.0, 2.0])
    np.testing.assert_array_equal(e, [0.0, 0.0])


# --- peak statistics ----------------------------------------------------------------


def test_single_ensemble_degenerates_to_run():
    c = cfg(n_realizations=50, snapshots=())
    ps = peak_statistics(c, 1)
    r = run_ensemble(c)
    np.testing.assert_array_equal(ps.mean_spectrum.s_values, r.spectrum.s_values)
    assert tuple(ps.samples[0]) == r.spectrum.peak_pair


def test_samples_in_unit_square():
    ps = peak_statistics(cfg(n_realizations=50, snapshots=()), 8)
    assert ps.samples.shape == (8, 2)
    assert np.all(ps.samples >= 0) and np.all(ps.samples <= 1)
    assert np.all(ps.samples.sum(axis=1) <= 1 + 1e-12)
    assert ps.mean_spectrum.s_values.sum() == pytest.approx(1.0)


def test_seed_blocks_disjoint():
    # ensemble e covers indices e*n .. (e+1)*n - 1
    c = cfg(n_realizations=30, snapshots=())
    ps = peak_statistics(c, 3)
    r2 = run_ensemble(c, first_index=60)
    assert tuple(ps.samples[2]) == r2.spectrum.peak_pair


@pytest.mark.slow
def test_static_peaks_exceed_dephasing_and_dephasing_flat():
    n_ens = 50
    s = peak_statistics(EnsembleConfig(DisorderSpec("static_binary", THETA, base_seed=21), snapshots=()), n_ens)
    d = peak_statistics(EnsembleConfig(DisorderSpec("dephasing_binary", THETA, base_seed=21), snapshots=()), n_ens)
    assert s.samples.sum(axis=1).mean() >= 2 * d.samples.sum(axis=1).mean()
    n_w = d.mean_spectrum.s_values.size
    assert d.mean_spectrum.s_values.max() < 1.5 * 2 / n_w


def test_dephased_polarization_decays():
    c = EnsembleConfig(DisorderSpec("dephasing_binary", THETA, base_seed=3), n_realizations=500, t_max=39, snapshots=())
    r = run_ensemble(c)
    late = r.mean_delta_p.delta_p[30:]
    assert np.all(np.abs(late) < 0.05)
    assert np.all(np.abs(late) < 5 * r.stderr_delta_p[30:] + 0.01)


def test_background_bins():
    c = cfg(n_realizations=10, snapshots=())
    sp = run_ensemble(c).spectrum
    bg = spectrum_background(sp)
    assert bg.size == 8
    assert bg.sum() + sum(sp.peak_pair) == pytest.approx(1.0)


# --- fluctuation probe ------------------------------------------------------------------


def test_fluctuation_binomial_std():
    c = EnsembleConfig(DisorderSpec("static_binary", THETA, base_seed=5), n_realizations=10_000, snapshots=())
    assert fluctuation_probe(c, 100) == pytest.approx(THETA / 10, rel=0.05)


def test_fluctuation_zero_theta():
    c = EnsembleConfig(DisorderSpec("static_binary", 0.0), n_realizations=100, snapshots=())
    assert fluctuation_probe(c, 50) == 0.0


def test_fluctuation_slope():
    c = EnsembleConfig(DisorderSpec("static_binary", THETA, base_seed=6), n_realizations=4000, snapshots=())
    assert fluctuation_scaling(c, (16, 64, 256)) == pytest.approx(-0.5, abs=0.1)


def test_fluctuation_needs_static():
    with pytest.raises(ValueError):
        fluctuation_probe(cfg("dephasing_binary"))
