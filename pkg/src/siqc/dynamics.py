"""Small-n density-matrix simulator for the secular chain Hamiltonian.

The chain Hamiltonian is diagonal in the z basis,

    H / hbar = sum_i omega_i Iz_i - sum_{i<j} delta_ij Iz_i Iz_j,

so free evolution is a pure phase map and ideal pi pulses are basis
permutations; both paths are numerically exact up to rounding.  Finite
pulses evolve the state under the rotating-frame Hamiltonian at the
addressed qubit's carrier (detuning ``larmor_step * (j - i)`` on spectator
j, transverse drive on every spin) via scipy's scaling-and-squaring matrix
exponential.

States are dense 2^n x 2^n matrices capped at n = 12: every verification
target in this package needs at most 8 qubits, and density matrices keep
the mixed states produced by cooling representable.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import expm

from .chain import SpinChainModel
from .scheduler import PulseSchedule

MAX_QUBITS = 12

_HERMITICITY_TOL = 1e-12
_TRACE_TOL = 1e-12
_POSITIVITY_TOL = 1e-10


class DynamicsError(ValueError):
    """Raised for states or evolution requests outside the model's domain."""


@dataclass(frozen=True)
class DriveParams:
    """Finite selective-pulse drive in the rotating frame.

    Attributes:
        nutation_rate: gamma * B1 in rad/s (on-resonance Rabi rate).
        qubit: index of the addressed qubit (carrier on its resonance).
        duration: pulse length in seconds; None means a pi pulse,
            pi / nutation_rate.
        ideal: if True the pulse is an instantaneous exact rotation and the
            nutation rate is ignored.
    """

    nutation_rate: float
    qubit: int
    duration: Optional[float] = None
    ideal: bool = False

    def __post_init__(self):
        if not self.ideal and self.nutation_rate <= 0:
            raise ValueError("finite drive requires a positive nutation rate")


class DensityState:
    """Validated n-qubit density matrix (n <= 12)."""

    def __init__(self, matrix: np.ndarray, check: bool = True):
        matrix = np.asarray(matrix, dtype=complex)
        dim = matrix.shape[0]
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DynamicsError("density matrix must be square")
        n = int(round(np.log2(dim)))
        if 2**n != dim:
            raise DynamicsError("density matrix dimension must be a power of two")
        if n > MAX_QUBITS:
            raise DynamicsError(f"at most {MAX_QUBITS} qubits are supported")
        self.n = n
        self.matrix = matrix
        if check:
            self.validate()

    def validate(self):
        m = self.matrix
        scale = max(np.abs(m).max(), 1.0)
        if np.abs(m - m.conj().T).max() > _HERMITICITY_TOL * scale:
            raise DynamicsError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > _TRACE_TOL or abs(np.trace(m).imag) > _TRACE_TOL:
            raise DynamicsError("density matrix trace must be 1")
        eig = np.linalg.eigvalsh(m)
        if eig.min() < -_POSITIVITY_TOL:
            raise DynamicsError("density matrix has a significantly negative eigenvalue")

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def copy(self) -> "DensityState":
        return DensityState(self.matrix.copy(), check=False)


_SINGLE = {
    "0": np.array([[1, 0], [0, 0]], dtype=complex),
    "1": np.array([[0, 0], [0, 1]], dtype=complex),
    "+": np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex),
    "-": np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex),
}


def product_state(specs: Sequence) -> DensityState:
    """Product state from per-qubit specs: '0', '1', '+', '-' or {'bias': p}.

    A bias entry is the diagonal thermal single-spin state with
    P(0) = (1 + p) / 2, so plane_magnetization returns p / 2.
    """
    mats = []
    for spec in specs:
        if isinstance(spec, str):
            if spec not in _SINGLE:
                raise DynamicsError(f"unknown qubit spec {spec!r}")
            mats.append(_SINGLE[spec])
        elif isinstance(spec, dict) and "bias" in spec:
            p = float(spec["bias"])
            if not -1.0 <= p <= 1.0:
                raise DynamicsError("bias must lie in [-1, 1]")
            mats.append(np.diag([(1 + p) / 2, (1 - p) / 2]).astype(complex))
        else:
            raise DynamicsError(f"unknown qubit spec {spec!r}")
    rho = mats[0]
    for m in mats[1:]:
        rho = np.kron(rho, m)
    return DensityState(rho)


def _bit_values(n: int, qubit: int) -> np.ndarray:
    """Bit of each basis index for the given qubit (qubit 0 most significant)."""
    idx = np.arange(2**n)
    return (idx >> (n - 1 - qubit)) & 1


def iz_diagonal(n: int, qubit: int) -> np.ndarray:
    """Diagonal of Iz for one qubit: +1/2 on |0>, -1/2 on |1>."""
    return 0.5 - _bit_values(n, qubit).astype(float)


def hamiltonian_diagonal(chain: SpinChainModel, n: Optional[int] = None) -> np.ndarray:
    """Diagonal of H/hbar for the first n qubits of the chain (rad/s)."""
    n = chain.n if n is None else n
    if n > chain.n:
        raise DynamicsError("state has more qubits than the chain model")
    h = np.zeros(2**n)
    mz = [iz_diagonal(n, q) for q in range(n)]
    for i in range(n):
        h += chain.larmor[i] * mz[i]
    for i in range(n):
        for j in range(i + 1, n):
            h -= chain.coupling[i, j] * mz[i] * mz[j]
    return h


def free_evolve(state: DensityState, chain: SpinChainModel, duration: float) -> DensityState:
    """Evolve under the bare secular Hamiltonian (diagonal phase map)."""
    h = hamiltonian_diagonal(chain, state.n)
    phase = np.exp(-1j * h * duration)
    rho = state.matrix * np.outer(phase, phase.conj())
    return DensityState(rho, check=False)


def _flip_indices(n: int, qubit: int) -> np.ndarray:
    return np.arange(2**n) ^ (1 << (n - 1 - qubit))


def apply_ideal_pi(state: DensityState, qubit: int) -> DensityState:
    """Instantaneous pi rotation about x on one qubit (exact basis flip)."""
    if not 0 <= qubit < state.n:
        raise DynamicsError("addressed qubit out of range")
    perm = _flip_indices(state.n, qubit)
    rho = state.matrix[np.ix_(perm, perm)]
    return DensityState(rho, check=False)


def _pauli_x_sum(n: int) -> np.ndarray:
    dim = 2**n
    out = np.zeros((dim, dim))
    idx = np.arange(dim)
    for q in range(n):
        out[idx, _flip_indices(n, q)] += 0.5  # Ix has matrix element 1/2
    return out


def rotating_frame_unitary(
    chain: SpinChainModel, n: int, drive: DriveParams, duration: float
) -> np.ndarray:
    """Propagator for a finite pulse at the addressed qubit's carrier."""
    carrier = chain.larmor[drive.qubit]
    h = np.zeros(2**n)
    mz = [iz_diagonal(n, q) for q in range(n)]
    for j in range(n):
        h += (chain.larmor[j] - carrier) * mz[j]
    for i in range(n):
        for j in range(i + 1, n):
            h -= chain.coupling[i, j] * mz[i] * mz[j]
    ham = np.diag(h).astype(complex) + drive.nutation_rate * _pauli_x_sum(n)
    return expm(-1j * ham * duration)


@dataclass(frozen=True)
class PulseResult:
    state: DensityState
    spectator_error: float


def selective_pi(
    state: DensityState, chain: SpinChainModel, drive: DriveParams
) -> PulseResult:
    """Apply a selective pi pulse; report the worst spectator flip error.

    For a finite pulse the spectator error is the largest probability, over
    spectator qubits, that a spectator prepared in |0> together with the
    rest of the register flips during the pulse.  Selectivity degrades once
    the nutation rate approaches the qubit spacing; a warning (not an
    error) is issued above larmor_step / 5.
    """
    if not 0 <= drive.qubit < state.n:
        raise DynamicsError("addressed qubit out of range")
    if drive.ideal:
        return PulseResult(apply_ideal_pi(state, drive.qubit), 0.0)
    if drive.nutation_rate > chain.larmor_step / 5:
        warnings.warn(
            "nutation rate exceeds larmor_step/5; pulse selectivity is poor",
            stacklevel=2,
        )
    duration = drive.duration if drive.duration is not None else np.pi / drive.nutation_rate
    u = rotating_frame_unitary(chain, state.n, drive, duration)
    rho = u @ state.matrix @ u.conj().T
    ground = u[:, 0]  # column: evolution of |00...0>
    err = 0.0
    for q in range(state.n):
        if q == drive.qubit:
            continue
        flipped = _bit_values(state.n, q) == 1
        err = max(err, float(np.sum(np.abs(ground[flipped]) ** 2)))
    return PulseResult(DensityState(rho, check=False), err)


def evolve(
    state: DensityState,
    chain: SpinChainModel,
    schedule: Optional[PulseSchedule],
    duration: float,
    drive: Optional[DriveParams] = None,
) -> DensityState:
    """Piecewise evolution under the chain Hamiltonian and a pulse schedule.

    With ``schedule=None`` this is bare free evolution for any duration.
    With a schedule, the duration must be an integer number of cycles: the
    toggling-frame averaging only guarantees refocusing stroboscopically.
    Pulses are instantaneous rotations unless ``drive`` requests finite
    pulses, in which case each scheduled pulse becomes a rotating-frame
    window of length pi / nutation_rate appended to its slot.
    """
    if duration < 0:
        raise DynamicsError("duration must be non-negative")
    if schedule is None:
        return free_evolve(state, chain, duration)
    cycles_float = duration / schedule.cycle_time
    cycles = int(round(cycles_float))
    if cycles < 1 or abs(cycles_float - cycles) > 1e-9 * max(cycles, 1):
        raise DynamicsError(
            "duration must be a whole number of schedule cycles "
            "(refocusing holds only stroboscopically)"
        )
    if max(schedule.qubits) >= chain.n:
        raise DynamicsError("schedule addresses qubits beyond the chain")
    if max(schedule.qubits) >= state.n:
        raise DynamicsError("schedule addresses qubits beyond the state")
    k_order = schedule.slots
    flips_at = {k: [] for k in range(1, k_order + 1)}
    for q in sorted(schedule.toggling):
        row = schedule.toggling[q]
        for k in range(1, k_order + 1):
            if row[k % k_order] != row[k - 1]:
                flips_at[k].append(q)
    current = state
    for _ in range(cycles):
        for k in range(1, k_order + 1):
            current = free_evolve(current, chain, schedule.slot_duration)
            for q in flips_at[k]:
                if drive is None or drive.ideal:
                    current = apply_ideal_pi(current, q)
                else:
                    pulse = DriveParams(
                        nutation_rate=drive.nutation_rate, qubit=q
                    )
                    current = selective_pi(current, chain, pulse).state
    return DensityState(current.matrix, check=False)


def plane_magnetization(state: DensityState, qubit: int) -> float:
    """Expectation of Iz on one qubit, in [-1/2, +1/2]."""
    if not 0 <= qubit < state.n:
        raise DynamicsError("qubit index out of range")
    diag = state.matrix.diagonal().real
    return float(np.sum(diag * iz_diagonal(state.n, qubit)))


def reduced_qubit(state: DensityState, qubit: int) -> np.ndarray:
    """Single-qubit reduced density matrix by partial trace."""
    n = state.n
    tensor = state.matrix.reshape((2,) * (2 * n))
    order = [qubit] + [q for q in range(n) if q != qubit]
    order = order + [n + q for q in order]
    tensor = np.transpose(tensor, order)
    tensor = tensor.reshape(2, 2 ** (n - 1), 2, 2 ** (n - 1))
    return np.einsum("ikjk->ij", tensor)


def coherence(state: DensityState, qubit: int) -> complex:
    """Single-qubit coherence 2 <1|rho_q|0>: magnitude 1 for a pure |+>."""
    rdm = reduced_qubit(state, qubit)
    return complex(2 * rdm[1, 0])


def energy(state: DensityState, chain: SpinChainModel) -> float:
    """<H>/hbar in rad/s (diagonal Hamiltonian expectation)."""
    h = hamiltonian_diagonal(chain, state.n)
    return float(np.sum(state.matrix.diagonal().real * h))
