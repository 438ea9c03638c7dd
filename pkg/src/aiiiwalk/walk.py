"""Spin-1/2 walker state and single-step Floquet evolution.

Amplitudes are stored as an array of shape ``(n_sites, 2)`` with the spin
index fastest; ``[..., 0]`` is spin up and ``[..., 1]`` spin down. All step
operators are read right to left: the rightmost factor acts first.

The private ``_*`` kernels work on arbitrary leading batch dimensions so the
ensemble code can evolve many realizations at once.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

UP, DOWN = 0, 1
_INV_SQRT2 = 1.0 / np.sqrt(2.0)

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)


class EdgeError(RuntimeError):
    """Raised when a shift would push amplitude off the open lattice."""


class SpinAxis(enum.Enum):
    AXIS1 = 1
    AXIS3 = 3

    @property
    def pauli(self) -> np.ndarray:
        return SIGMA1 if self is SpinAxis.AXIS1 else SIGMA3


# spin labels: sigma_3 basis ("up", "down") and sigma_2 basis ("+", "-");
# R and L are the circular-polarization names of + and -
SPIN_VECTORS = {
    "up": np.array([1.0, 0.0], dtype=complex),
    "down": np.array([0.0, 1.0], dtype=complex),
    "+": np.array([1.0, 1.0j], dtype=complex) * _INV_SQRT2,
    "-": np.array([1.0, -1.0j], dtype=complex) * _INV_SQRT2,
}
SPIN_ALIASES = {"R": "+", "L": "-", "plus": "+", "minus": "-", "↑": "up", "↓": "down"}


def spin_vector(label: str) -> np.ndarray:
    key = SPIN_ALIASES.get(label, label)
    if key not in SPIN_VECTORS:
        raise ValueError(f"unknown spin label {label!r}; expected one of {sorted(SPIN_VECTORS)}")
    return SPIN_VECTORS[key].copy()


@dataclass(frozen=True)
class WalkerState:
    amplitudes: np.ndarray
    lattice_halfwidth: int
    basis: str = "sigma3"

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2 * self.lattice_halfwidth + 1, 2):
            raise ValueError(
                f"amplitudes must have shape {(2 * self.lattice_halfwidth + 1, 2)}, got {amps.shape}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_sites(self) -> int:
        return 2 * self.lattice_halfwidth + 1

    @property
    def sites(self) -> np.ndarray:
        return np.arange(-self.lattice_halfwidth, self.lattice_halfwidth + 1)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def amplitude(self, q: int, spin: int) -> complex:
        return complex(self.amplitudes[q + self.lattice_halfwidth, spin])


@dataclass(frozen=True)
class AngleField:
    """One realization of coin angles.

    ``theta_by_step[s]`` replaces ``theta`` during step ``s`` (zero-based)
    when the field is time dependent.
    """

    phi: np.ndarray
    theta: np.ndarray
    time_dependent: bool = False
    theta_by_step: np.ndarray | None = field(default=None)

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        theta = np.asarray(self.theta, dtype=float)
        if phi.ndim != 1 or theta.shape != phi.shape:
            raise ValueError("phi and theta must be 1d arrays of equal length")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "theta", theta)
        if self.time_dependent:
            if self.theta_by_step is None:
                raise ValueError("time-dependent field needs theta_by_step")
            tbs = np.asarray(self.theta_by_step, dtype=float)
            if tbs.ndim != 2 or tbs.shape[1] != phi.size:
                raise ValueError("theta_by_step must have shape (n_steps, n_sites)")
            object.__setattr__(self, "theta_by_step", tbs)
        elif self.theta_by_step is not None:
            raise ValueError("theta_by_step given for a static field")

    @property
    def n_sites(self) -> int:
        return self.phi.size

    @classmethod
    def clean(cls, n_sites: int) -> "AngleField":
        return cls(np.zeros(n_sites), np.zeros(n_sites))

    def theta_at(self, step_index: int) -> np.ndarray:
        if not self.time_dependent:
            return self.theta
        if not 0 <= step_index < self.theta_by_step.shape[0]:
            raise IndexError(
                f"step {step_index} outside the {self.theta_by_step.shape[0]} drawn steps"
            )
        return self.theta_by_step[step_index]


# --- batched kernels ---------------------------------------------------------


def _shift(amps: np.ndarray, inverse: bool = False, periodic: bool = False) -> np.ndarray:
    up, dn = amps[..., UP], amps[..., DOWN]
    if periodic:
        out = np.empty_like(amps)
        s = -1 if inverse else 1
        out[..., UP] = np.roll(up, s, axis=-1)
        out[..., DOWN] = np.roll(dn, -s, axis=-1)
        return out
    # amplitude leaving the lattice: up at the right edge, down at the left (forward)
    lost_up, lost_dn = (up[..., 0], dn[..., -1]) if inverse else (up[..., -1], dn[..., 0])
    if np.any(lost_up != 0) or np.any(lost_dn != 0):
        raise EdgeError("walker support reached the lattice edge; enlarge the lattice")
    out = np.zeros_like(amps)
    if inverse:
        out[..., :-1, UP] = up[..., 1:]
        out[..., 1:, DOWN] = dn[..., :-1]
    else:
        out[..., 1:, UP] = up[..., :-1]
        out[..., :-1, DOWN] = dn[..., 1:]
    return out


def _coin1(amps: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    # exp(-i alpha sigma_1) sitewise
    c, s = np.cos(alpha), np.sin(alpha)
    up, dn = amps[..., UP], amps[..., DOWN]
    out = np.empty_like(amps)
    out[..., UP] = c * up - 1j * s * dn
    out[..., DOWN] = c * dn - 1j * s * up
    return out


def _coin3(amps: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    ph = np.exp(-1j * alpha)
    out = np.empty_like(amps)
    out[..., UP] = ph * amps[..., UP]
    out[..., DOWN] = np.conj(ph) * amps[..., DOWN]
    return out


def _floquet(amps, half_theta, half_phi=None, periodic=False):
    if half_phi is not None:
        amps = _coin3(amps, half_phi)
    amps = _coin1(amps, half_theta)
    amps = _shift(amps, periodic=periodic)
    amps = _coin1(amps, half_theta)
    if half_phi is not None:
        amps = _coin3(amps, half_phi)
    return amps


def _experiment(amps, theta, periodic=False):
    return _shift(_coin1(amps, theta), periodic=periodic)


# --- public operations -------------------------------------------------------


def init_localized(q0: int, spin: str, L: int) -> WalkerState:
    """Walker on site ``q0`` in spin state ``spin`` ("up", "down", "+", "-", "R", "L")."""
    if abs(q0) > L:
        raise ValueError(f"site {q0} outside lattice [-{L}, {L}]")
    amps = np.zeros((2 * L + 1, 2), dtype=complex)
    amps[q0 + L] = spin_vector(spin)
    return WalkerState(amps, L)


def apply_shift(state: WalkerState, direction: str = "forward") -> WalkerState:
    if direction not in ("forward", "inverse"):
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    return WalkerState(_shift(state.amplitudes, inverse=direction == "inverse"), state.lattice_halfwidth)


def apply_coin(state: WalkerState, axis: SpinAxis, half_angles) -> WalkerState:
    """Multiply the spinor on site q by exp(-i half_angles[q] sigma_axis)."""
    alpha = np.asarray(half_angles, dtype=float)
    if alpha.ndim and alpha.shape != (state.n_sites,):
        raise ValueError(f"expected {state.n_sites} angles, got {alpha.shape}")
    kernel = _coin1 if SpinAxis(axis) is SpinAxis.AXIS1 else _coin3
    return WalkerState(kernel(state.amplitudes, alpha), state.lattice_halfwidth)


def _check_field(state: WalkerState, angles: AngleField):
    if state.basis != "sigma3":
        raise ValueError("evolution needs amplitudes in the sigma3 basis")
    if angles.n_sites != state.n_sites:
        raise ValueError(f"angle field has {angles.n_sites} sites, lattice has {state.n_sites}")


def step_floquet(state: WalkerState, angles: AngleField, step_index: int = 0) -> WalkerState:
    _check_field(state, angles)
    half_phi = angles.phi / 2 if np.any(angles.phi) else None
    amps = _floquet(state.amplitudes, angles.theta_at(step_index) / 2, half_phi)
    return WalkerState(amps, state.lattice_halfwidth)


def step_experiment(state: WalkerState, angles: AngleField, step_index: int = 0) -> WalkerState:
    """One hardware step T R_1(theta): full coin rotation, then the shift. phi is ignored."""
    _check_field(state, angles)
    amps = _experiment(state.amplitudes, angles.theta_at(step_index))
    return WalkerState(amps, state.lattice_halfwidth)


def evolve(state: WalkerState, angles: AngleField, n_steps: int, form: str = "floquet") -> WalkerState:
    step = {"floquet": step_floquet, "experiment": step_experiment}[form]
    for s in range(n_steps):
        state = step(state, angles, s)
    return state


def evolve_full_experiment(state: WalkerState, angles: AngleField, n_roundtrips: int) -> WalkerState:
    """(T R_1(theta))^N T: initial pass through the fibre arms, then N round trips."""
    state = apply_shift(state)
    return evolve(state, angles, n_roundtrips, form="experiment")


def evolve_full_hardware(state: WalkerState, angles: AngleField, n_roundtrips: int) -> WalkerState:
    """sigma_1 (T^-1 R_1(theta))^N sigma_1 T, with the EOM in/out-coupling flips."""
    amps = _shift(state.amplitudes)[..., ::-1]
    for s in range(n_roundtrips):
        amps = _shift(_coin1(amps, angles.theta_at(s)), inverse=True)
    return WalkerState(amps[..., ::-1].copy(), state.lattice_halfwidth)


def evolve_ring(amplitudes, angles: AngleField, n_steps: int, form: str = "floquet") -> np.ndarray:
    """Evolve ``(n_sites, 2)`` amplitudes on a periodic ring.

    Used to cross-check dynamics against :func:`build_unitary_matrix`; site
    index 0 is ring position 0.
    """
    amps = np.asarray(amplitudes, dtype=complex)
    if amps.shape != (angles.n_sites, 2):
        raise ValueError(f"amplitudes shape {amps.shape} does not match {angles.n_sites} ring sites")
    half_phi = angles.phi / 2 if np.any(angles.phi) else None
    for s in range(n_steps):
        theta = angles.theta_at(s)
        if form == "floquet":
            amps = _floquet(amps, theta / 2, half_phi, periodic=True)
        else:
            amps = _shift(_coin1(amps, theta), periodic=True)
    return amps


def lattice_for(t_max: int) -> int:
    """Half-width that keeps a walker started at q=0 off the edge for t_max steps."""
    return t_max + 1


# --- dense matrices (periodic closure) ----------------------------------------


def shift_matrix(n_sites: int, inverse: bool = False) -> np.ndarray:
    """Periodic T on (q, sigma) row-major ordering, sigma fastest."""
    dim = 2 * n_sites
    T = np.zeros((dim, dim), dtype=complex)
    for q in range(n_sites):
        T[2 * ((q + 1) % n_sites) + UP, 2 * q + UP] = 1.0
        T[2 * ((q - 1) % n_sites) + DOWN, 2 * q + DOWN] = 1.0
    return T.T.copy() if inverse else T


def coin_matrix(axis: SpinAxis, half_angles) -> np.ndarray:
    pauli = SpinAxis(axis).pauli
    blocks = [scipy.linalg.expm(-1j * a * pauli) for a in np.asarray(half_angles, dtype=float)]
    return scipy.linalg.block_diag(*blocks)


def sublattice_operator(n_sites: int) -> np.ndarray:
    return np.diag(np.repeat((-1.0) ** np.arange(n_sites), 2)).astype(complex)


def spin_operator(pauli: np.ndarray, n_sites: int) -> np.ndarray:
    return np.kron(np.eye(n_sites), pauli)


def build_unitary_matrix(
    angles: AngleField,
    n_sites: int,
    boundary: str = "periodic",
    form: str = "floquet",
    step_index: int = 0,
) -> np.ndarray:
    """Dense single-step operator of dimension 2 n_sites.

    Columns and rows are ordered (q, sigma) row-major with sigma fastest,
    q = 0 .. n_sites-1 around the ring.
    """
    if boundary != "periodic":
        raise ValueError("only periodic closure is supported for dense operators")
    if n_sites % 2:
        raise ValueError(f"n_sites must be even for a bipartite ring, got {n_sites}")
    if angles.n_sites != n_sites:
        raise ValueError(f"angle field has {angles.n_sites} sites, expected {n_sites}")
    theta = angles.theta_at(step_index)
    T = shift_matrix(n_sites)
    if form == "floquet":
        R1 = coin_matrix(SpinAxis.AXIS1, theta / 2)
        R3 = coin_matrix(SpinAxis.AXIS3, angles.phi / 2)
        return R3 @ R1 @ T @ R1 @ R3
    if form == "experiment":
        return T @ coin_matrix(SpinAxis.AXIS1, theta)
    raise ValueError(f"unknown form {form!r}")
