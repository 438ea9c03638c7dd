"""Spin-resolved probabilities, spin polarization, power spectra and profile fits."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .walk import UP, WalkerState

BASES = ("sigma3", "sigma2_RL")
BASIS_LABELS = {"sigma3": ("up", "down"), "sigma2_RL": ("+", "-")}

# rows are <+| and <-| in sigma3 coordinates
_TO_RL = np.array([[1.0, -1.0j], [1.0, 1.0j]]) / np.sqrt(2.0)


@dataclass(frozen=True)
class ProbabilityRecord:
    """Probabilities ``values[i, k]`` for site ``q = i - L`` and outcome ``k``.

    Outcome order follows :data:`BASIS_LABELS`: (up, down) or (+, -).
    """

    t: int
    values: np.ndarray
    basis_tag: str = "sigma2_RL"
    input_tag: str = "-"

    @property
    def lattice_halfwidth(self) -> int:
        return (self.values.shape[0] - 1) // 2

    @property
    def sites(self) -> np.ndarray:
        L = self.lattice_halfwidth
        return np.arange(-L, L + 1)

    def traced(self) -> np.ndarray:
        return self.values.sum(axis=-1)

    def total(self) -> float:
        return float(self.values.sum())


@dataclass(frozen=True)
class PolarizationSeries:
    t_values: np.ndarray
    delta_p: np.ndarray


@dataclass(frozen=True)
class PowerSpectrum:
    omega_values: np.ndarray
    s_values: np.ndarray
    window: tuple

    def at(self, omega: float) -> float:
        k = np.flatnonzero(np.isclose(self.omega_values, omega % (2 * np.pi), atol=1e-12))
        if k.size == 0:
            raise KeyError(f"omega={omega} is not on the {self.omega_values.size}-point grid")
        return float(self.s_values[k[0]])

    @property
    def peak_pair(self) -> tuple[float, float]:
        """(S(0), S(pi)); S(pi) is 0 when pi is off-grid (odd window length)."""
        n = self.omega_values.size
        return float(self.s_values[0]), float(self.s_values[n // 2]) if n % 2 == 0 else 0.0


@dataclass(frozen=True)
class ProfileFit:
    model: str
    scale: float
    loglog_slope: float
    fit_quality: float
    q_window: tuple


# --- probabilities --------------------------------------------------------------


def _change(amps: np.ndarray, from_basis: str, to_basis: str) -> np.ndarray:
    for b in (from_basis, to_basis):
        if b not in BASES:
            raise ValueError(f"unknown basis {b!r}; expected one of {BASES}")
    if from_basis == to_basis:
        return amps.copy()
    M = _TO_RL if to_basis == "sigma2_RL" else _TO_RL.conj().T
    return amps @ M.T


def _probabilities(amps: np.ndarray, basis: str) -> np.ndarray:
    return np.abs(_change(amps, "sigma3", basis)) ** 2


def basis_change(obj, from_basis: str, to_basis: str):
    """Re-express amplitudes (array or WalkerState) in another spin basis.

    Probability records carry no phases and cannot be converted; measure the
    state again instead.
    """
    if isinstance(obj, WalkerState):
        if obj.basis != from_basis:
            raise ValueError(f"state is in basis {obj.basis!r}, not {from_basis!r}")
        return WalkerState(_change(obj.amplitudes, from_basis, to_basis), obj.lattice_halfwidth, to_basis)
    if isinstance(obj, ProbabilityRecord):
        if obj.basis_tag == from_basis == to_basis:
            return obj
        raise ValueError("probability records cannot change basis; measure the state in the target basis")
    return _change(np.asarray(obj, dtype=complex), from_basis, to_basis)


def measure_probabilities(state: WalkerState, basis: str = "sigma2_RL", t: int = 0, input_tag: str = "-") -> ProbabilityRecord:
    norm2 = np.sum(np.abs(state.amplitudes) ** 2)
    if abs(norm2 - 1.0) > 1e-8:
        raise ValueError(f"state norm^2 = {norm2:.12g} deviates from 1; evolution is corrupted")
    amps = _change(state.amplitudes, state.basis, "sigma3")
    return ProbabilityRecord(t, _probabilities(amps, basis), basis, input_tag)


def spin_polarization(record: ProbabilityRecord) -> float:
    """Site-summed P(q, -) - P(q, +) for a walker started in |->."""
    if record.basis_tag != "sigma2_RL":
        raise ValueError(f"spin polarization needs a sigma2_RL record, got {record.basis_tag!r}")
    return float(np.sum(record.values[:, 1] - record.values[:, 0]))


def _delta_p(amps: np.ndarray) -> np.ndarray:
    p = _probabilities(amps, "sigma2_RL")
    return np.sum(p[..., 1] - p[..., 0], axis=-1)


def sigma2_expectation(amps: np.ndarray, basis: str = "sigma3") -> float:
    if basis == "sigma2_RL":
        return float(np.sum(np.abs(amps[..., 0]) ** 2 - np.abs(amps[..., 1]) ** 2))
    up, dn = amps[..., UP], amps[..., 1 - UP]
    # <psi| sigma_2 |psi> = 2 Im(conj(up) dn)
    return float(np.sum(2 * np.imag(np.conj(up) * dn)))


# --- power spectrum --------------------------------------------------------------


def _window_slice(series: PolarizationSeries, window):
    t_min, t_max = window
    if t_max < t_min:
        raise ValueError(f"empty window {window}")
    t = np.asarray(series.t_values)
    sel = (t >= t_min) & (t <= t_max)
    if sel.sum() != t_max - t_min + 1:
        raise ValueError(f"window {window} not covered by series t in [{t.min()}, {t.max()}]")
    if sel.sum() < 2:
        raise ValueError("window needs at least two time steps")
    return t[sel], np.asarray(series.delta_p)[sel]


def power_spectrum(series: PolarizationSeries, window=(5, 14)) -> PowerSpectrum:
    """|sum_t exp(i w t) dP(t)|^2 on the DFT grid w_k = 2 pi k / N_w, normalized to sum 1."""
    t, dp = _window_slice(series, window)
    n_w = t.size
    omega = 2 * np.pi * np.arange(n_w) / n_w
    amp = np.exp(1j * np.outer(omega, t)) @ dp
    power = np.abs(amp) ** 2
    total = power.sum()
    s = power / total if total > 0 else np.zeros_like(power)
    return PowerSpectrum(omega, s, tuple(window))


def spectrum_curve(series: PolarizationSeries, window=(5, 14), n_points: int = 513):
    """Display curve on a fine grid, scaled by the on-grid normalization.

    Only for plotting; the grid values returned by :func:`power_spectrum` are
    the analysed quantities.
    """
    t, dp = _window_slice(series, window)
    omega_grid = 2 * np.pi * np.arange(t.size) / t.size
    total = np.sum(np.abs(np.exp(1j * np.outer(omega_grid, t)) @ dp) ** 2)
    omega = np.linspace(0, 2 * np.pi, n_points)
    power = np.abs(np.exp(1j * np.outer(omega, t)) @ dp) ** 2
    return omega, power / total if total > 0 else power * 0


# --- profile fits ----------------------------------------------------------------


def _linregress(x, y):
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 0.0
    return slope, intercept, r2


def fit_profile_arrays(q, prob, q_window) -> tuple[ProfileFit, ProfileFit]:
    """Fit -ln P against |q| (exponential) and q^2 (gaussian) on lo <= |q| <= hi.

    Zero-probability sites are dropped. The log-log slope regresses
    ln(-ln(P(q)/P_ref)) on ln|q| with P_ref = P(0), or for odd times (P(0)=0)
    the origin value extrapolated by the better of the two fits; sites with
    P(q) >= P_ref carry no decay information and are left out of it.
    """
    q = np.asarray(q)
    prob = np.asarray(prob, dtype=float)
    lo, hi = q_window
    in_win = (np.abs(q) >= lo) & (np.abs(q) <= hi)
    if np.any(prob[in_win] < 0):
        raise ValueError("negative probability in fit window")
    sel = in_win & (prob > 0)
    if sel.sum() < 4:
        raise ValueError(f"fit window {q_window} has {sel.sum()} occupied sites, need >= 4")
    aq, p = np.abs(q[sel]).astype(float), prob[sel]
    y = -np.log(p)
    k_exp, c_exp, r2_exp = _linregress(aq, y)
    k_gau, c_gau, r2_gau = _linregress(aq**2, y)

    p0 = prob[q == 0]
    if p0.size and p0[0] > 0:
        p_ref = p0[0]
    else:
        p_ref = np.exp(-(c_exp if r2_exp >= r2_gau else c_gau))
    dec = p < p_ref
    if dec.sum() < 2:
        raise ValueError("profile does not decay away from the origin; log-log slope undefined")
    slope_ll, _, _ = _linregress(np.log(aq[dec]), np.log(-np.log(p[dec] / p_ref)))

    window = (int(lo), int(hi))
    exp_fit = ProfileFit("exponential", 1.0 / k_exp if k_exp > 0 else float("inf"), float(slope_ll), float(r2_exp), window)
    gau_fit = ProfileFit("gaussian", float(np.sqrt(1.0 / k_gau)) if k_gau > 0 else float("inf"), float(slope_ll), float(r2_gau), window)
    return exp_fit, gau_fit


def default_fit_window(t: int) -> tuple[int, int]:
    return (2, t - 4)


def fit_profile(record: ProbabilityRecord, q_window=None) -> tuple[ProfileFit, ProfileFit]:
    """Exponential and gaussian fits of the spin-traced profile (exponential first)."""
    window = default_fit_window(record.t) if q_window is None else q_window
    return fit_profile_arrays(record.sites, record.traced(), window)


def edge_peak_ratio(q, prob, t: int) -> float:
    """Mean P at the light-cone edge |q| = t over mean P at the next occupied sites |q| = t - 2.

    Above 1 the profile turns up at the edge (quasi-ballistic peak).
    """
    q = np.asarray(q)
    prob = np.asarray(prob, dtype=float)
    edge = prob[np.abs(q) == t].mean()
    inner = prob[np.abs(q) == t - 2].mean()
    return float(edge / inner) if inner > 0 else float("inf")


# --- CSV emitters ------------------------------------------------------------------


def _f(x) -> str:
    return f"{float(x):.17g}"


def write_probabilities_csv(records, path) -> None:
    """Long format: t, q, P (spin traced), then one column per outcome."""
    records = list(records)
    labels = BASIS_LABELS[records[0].basis_tag]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "q", "P", f"P_{labels[0]}", f"P_{labels[1]}"])
        for rec in records:
            for q, row in zip(rec.sites, rec.values):
                w.writerow([rec.t, int(q), _f(row.sum()), _f(row[0]), _f(row[1])])


def write_polarization_csv(series: PolarizationSeries, path, stderr=None) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "delta_p"] + (["stderr"] if stderr is not None else []))
        for i, (t, d) in enumerate(zip(series.t_values, series.delta_p)):
            w.writerow([int(t), _f(d)] + ([_f(stderr[i])] if stderr is not None else []))


def write_spectrum_csv(spectrum: PowerSpectrum, path, std=None) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["omega", "S"] + (["std"] if std is not None else []))
        for i, (om, s) in enumerate(zip(spectrum.omega_values, spectrum.s_values)):
            w.writerow([_f(om), _f(s)] + ([_f(std[i])] if std is not None else []))
