"""Spin-chain model: zig-zag geometry, Larmor ladder, dipolar couplings.

The qubit chain is a row of spin-1/2 nuclei whose positions advance by the
lattice step ``a`` along the field axis (z) while alternating a lateral
offset ``b = a/sqrt(2)``, so that the bond direction satisfies
cos^2(theta) = 2/3.  The lateral offset is taken along x; only relative
geometry enters the secular dipolar coupling, so this convention is
observable only through the stored positions.

The secular coupling strength between spins i and j is

    delta_ij = (mu0 / 4 pi) * gamma^2 * hbar * (3 cos^2 theta_ij - 1) / r_ij^3

with theta_ij the angle between the inter-spin vector and the field axis.
The corresponding interaction Hamiltonian is H_ij = -hbar * delta_ij *
Iz_i * Iz_j, which is the convention assumed by the dynamics module.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import CONSTANTS, PhysicalConstants
from .device import DeviceConfig


@dataclass(frozen=True)
class SpinChainModel:
    """Frequencies and couplings for one chain of ``n`` qubits.

    Attributes:
        n: qubit count.
        positions: (n, 3) positions in metres along the zig-zag chain.
        larmor: per-qubit Larmor frequencies, rad/s, evenly spaced.
        larmor_step: inter-qubit Larmor spacing, rad/s (a * gamma * gradient).
        coupling: symmetric (n, n) matrix of secular coupling strengths,
            rad/s, zero diagonal.
        gradient: longitudinal field gradient used, T/m.
    """

    n: int
    positions: np.ndarray
    larmor: np.ndarray
    larmor_step: float
    coupling: np.ndarray
    gradient: float
    constants: PhysicalConstants = field(default=CONSTANTS, repr=False)

    @property
    def nearest_coupling(self) -> float:
        """Coupling strength of adjacent qubits, rad/s (0 for n = 1)."""
        if self.n < 2:
            return 0.0
        return float(self.coupling[0, 1])


def zigzag_positions(n: int, a: float) -> np.ndarray:
    """Positions of ``n`` chain sites: step ``a`` in z, alternate offset in x."""
    b = a / np.sqrt(2.0)
    idx = np.arange(n)
    pos = np.zeros((n, 3))
    pos[:, 0] = b * (idx % 2)
    pos[:, 2] = a * idx
    return pos


def coupling_matrix(
    positions: np.ndarray, constants: PhysicalConstants = CONSTANTS
) -> np.ndarray:
    """All-pairs secular dipolar coupling strengths from raw positions."""
    pos = np.asarray(positions, dtype=float)
    n = pos.shape[0]
    diff = pos[:, None, :] - pos[None, :, :]
    r = np.linalg.norm(diff, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        cos2 = (diff[..., 2] / r) ** 2
        mat = (
            (constants.mu0 / (4 * np.pi))
            * constants.gamma**2
            * constants.hbar
            * (3 * cos2 - 1)
            / r**3
        )
    mat[np.arange(n), np.arange(n)] = 0.0
    return mat


def build_chain(
    config: DeviceConfig,
    n: int,
    gradient: float | None = None,
    constants: PhysicalConstants = CONSTANTS,
) -> SpinChainModel:
    """Construct the chain model for ``n`` qubits in the given gradient.

    The Larmor ladder is omega_i = gamma * (B0 + gradient * z_i); the
    lateral zig-zag offset does not enter the ladder because the transverse
    field variation over one offset is negligible by construction.

    Raises:
        ValueError: if n < 1 or the gradient is not strictly positive.
    """
    if n < 1:
        raise ValueError("chain must contain at least one qubit")
    grad = config.field_gradient if gradient is None else gradient
    if grad <= 0:
        raise ValueError("gradient must be strictly positive")
    a = config.lattice_step
    positions = zigzag_positions(n, a)
    step = a * constants.gamma * grad
    larmor = constants.gamma * config.b0 + step * np.arange(n)
    coupling = coupling_matrix(positions, constants)
    return SpinChainModel(
        n=n,
        positions=positions,
        larmor=larmor,
        larmor_step=step,
        coupling=coupling,
        gradient=grad,
        constants=constants,
    )


def plane_bandwidth(
    config: DeviceConfig,
    field_map: np.ndarray,
    constants: PhysicalConstants = CONSTANTS,
) -> float:
    """Larmor spread (rad/s) of one qubit plane over a sampled field map.

    ``field_map`` holds Bz samples (tesla) taken across the active region;
    any array shape is accepted.  The result is gamma * (max - min), the
    full frequency band occupied by the ~chain_count ensemble copies of one
    qubit.  For plane addressability it must stay below the inter-qubit
    spacing ``a * gamma * field_gradient``.

    Raises:
        ValueError: if the field map is empty.
    """
    values = np.asarray(field_map, dtype=float).ravel()
    if values.size == 0:
        raise ValueError("field map must contain at least one sample")
    return float(constants.gamma * (values.max() - values.min()))


def addressable(config: DeviceConfig, bandwidth: float) -> bool:
    """True when a plane's Larmor spread fits inside the qubit spacing."""
    return bandwidth < config.lattice_step * CONSTANTS.gamma * config.field_gradient
