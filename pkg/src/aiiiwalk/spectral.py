"""Chiral and sublattice symmetry checks and quasienergy spectra on a ring."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .walk import SIGMA2, AngleField, build_unitary_matrix, spin_operator, sublattice_operator

CENTERS = {"0": 0.0, "pi": np.pi, "pi/2": np.pi / 2, "-pi/2": -np.pi / 2}


class EigensolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuasienergySpectrum:
    eigenphases: np.ndarray
    n_sites: int
    form_tag: str = "floquet"
    angle_summary: tuple = (0.0, 0.0, None)

    def __post_init__(self):
        eps = np.sort(np.asarray(self.eigenphases, dtype=float))
        if eps.size != 2 * self.n_sites:
            raise ValueError(f"expected {2 * self.n_sites} eigenphases, got {eps.size}")
        object.__setattr__(self, "eigenphases", eps)

    @property
    def level_spacing(self) -> float:
        return 2 * np.pi / self.eigenphases.size

    def shifted(self, delta: float) -> "QuasienergySpectrum":
        return QuasienergySpectrum(wrap_phase(self.eigenphases + delta), self.n_sites, self.form_tag, self.angle_summary)


@dataclass
class SymmetryReport:
    chiral_residual: float = float("nan")
    sublattice_residual: float = float("nan")
    mirror_residual_0: float = float("nan")
    mirror_residual_pi_shift: float = float("nan")


def wrap_phase(x):
    """Map angles into (-pi, pi]."""
    y = np.mod(np.asarray(x, dtype=float) + np.pi, 2 * np.pi) - np.pi
    return np.where(y <= -np.pi, np.pi, y)


def circular_distance(a, b):
    d = np.mod(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)), 2 * np.pi)
    return np.minimum(d, 2 * np.pi - d)


def _spin_structure(U: np.ndarray) -> int:
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1] or U.shape[0] % 2:
        raise ValueError(f"expected a square operator of even dimension, got shape {U.shape}")
    return U.shape[0] // 2


def check_chiral(U: np.ndarray) -> float:
    """max |sigma_2 U sigma_2 U - 1|, zero iff sigma_2 U sigma_2 = U^dagger."""
    n = _spin_structure(U)
    C = spin_operator(SIGMA2, n)
    return float(np.max(np.abs(C @ U @ C @ U - np.eye(2 * n))))


def check_sublattice(U: np.ndarray) -> float:
    """max |S U + U S| with S = (-1)^q sitewise."""
    n = _spin_structure(U)
    if n % 2:
        raise ValueError(f"sublattice operator needs an even number of sites, got {n}")
    S = sublattice_operator(n)
    return float(np.max(np.abs(S @ U + U @ S)))


def eigenphases(U: np.ndarray) -> np.ndarray:
    """Quasienergies eps with U|psi> = exp(-i eps)|psi>, in (-pi, pi], sorted.

    Uses the complex Schur form; for a unitary input it is diagonal up to
    rounding, so its diagonal holds the eigenvalues.
    """
    try:
        T, _ = scipy.linalg.schur(np.asarray(U, dtype=complex), output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverError(str(exc)) from exc
    lam = np.diag(T)
    if not np.all(np.isfinite(lam)):
        raise EigensolverError("non-finite eigenvalues")
    return np.sort(wrap_phase(-np.angle(lam)))


def quasienergies(angles: AngleField, n_sites: int, form: str = "floquet", seed=None) -> QuasienergySpectrum:
    U = build_unitary_matrix(angles, n_sites, form=form)
    theta = angles.theta
    stagger = float(np.mean(theta * (-1.0) ** np.arange(theta.size)))
    return QuasienergySpectrum(eigenphases(U), n_sites, form, (float(np.mean(theta)), stagger, seed))


def _multiset_mismatch(a: np.ndarray, b: np.ndarray) -> float:
    # sorted circular lists pair up under some cyclic shift; take the best one
    a, b = np.sort(wrap_phase(a)), np.sort(wrap_phase(b))
    n = a.size
    idx = (np.arange(n)[None, :] + np.arange(n)[:, None]) % n
    d = circular_distance(a[None, :], b[idx])
    return float(np.min(np.max(d, axis=1)))


def mirror_check(spec: QuasienergySpectrum, tolerance: float = 1e-9) -> dict:
    """Mismatch of the spectrum with its reflection and with its pi shift."""
    eps = spec.eigenphases
    m0 = _multiset_mismatch(eps, -eps)
    mpi = _multiset_mismatch(eps, eps + np.pi)
    return {
        "mirror_residual_0": m0,
        "mirror_residual_pi_shift": mpi,
        "passed": bool(m0 < tolerance and mpi < tolerance),
    }


def gap_at(spec: QuasienergySpectrum, center: float) -> float:
    """Full gap width around ``center``: twice the distance to the nearest level."""
    return float(2 * np.min(circular_distance(spec.eigenphases, center)))


def symmetry_report(angles: AngleField, n_sites: int, form: str = "floquet") -> SymmetryReport:
    U = build_unitary_matrix(angles, n_sites, form=form)
    spec = QuasienergySpectrum(eigenphases(U), n_sites, form)
    m = mirror_check(spec)
    return SymmetryReport(check_chiral(U), check_sublattice(U), m["mirror_residual_0"], m["mirror_residual_pi_shift"])


def export_csv(spec: QuasienergySpectrum, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "eigenphase"])
        for i, e in enumerate(spec.eigenphases):
            w.writerow([i, f"{e:.17g}"])
