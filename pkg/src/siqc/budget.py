"""Signal, noise, and decoherence budget of the bridge-detected spin device.

Contents: doubly clamped beam mechanics, thermal force noise of the
detector, the pseudo-pure-state signal force, the three modelled
decoherence channels (bridge thermal drift, in-plane inter-chain
flip-flops, unrefocused inter-chain couplings during recoupling), the
truncation decoherence of block-decoupled chains, and the resulting
gate-count optimum.

Cross-chain couplings are evaluated on a square 2D array of chains with
pitch D (the measured average chain distance); a seeded random-displacement
mode exists to probe sensitivity to that idealization.  The second-moment
sum is truncated by a convergence criterion, not a fixed radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .constants import CONSTANTS, PhysicalConstants
from .device import DeviceConfig


@dataclass(frozen=True)
class BridgeMechanics:
    """Lumped-oscillator view of the doubly clamped bridge.

    ``effective_mass`` is defined by the lumped identity k = m w_c^2, which
    ties the stored spring constant and resonance together.
    """

    spring_constant: float
    resonance: float  # rad/s
    quality_factor: float
    temperature: float

    def __post_init__(self):
        for name in ("spring_constant", "resonance", "quality_factor", "temperature"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def effective_mass(self) -> float:
        return self.spring_constant / self.resonance**2


def beam_mechanics(config: DeviceConfig) -> BridgeMechanics:
    """Doubly clamped Euler-Bernoulli beam: centre-load stiffness and f1.

    k = 16 E w t^3 / l^3 (192 E I / l^3 with I = w t^3 / 12) and the
    fundamental clamped-clamped mode w_c = 2 pi * 1.03 (t / l^2) sqrt(E/rho).
    """
    length = config.bridge_length
    k = 16.0 * config.youngs_modulus * config.bridge_width * config.bridge_thickness**3 / length**3
    f1 = 1.03 * (config.bridge_thickness / length**2) * math.sqrt(
        config.youngs_modulus / config.density
    )
    return BridgeMechanics(
        spring_constant=k,
        resonance=2 * math.pi * f1,
        quality_factor=config.quality_factor,
        temperature=config.temperature,
    )


def thermal_force_noise(
    mech: BridgeMechanics, bandwidth: float, constants: PhysicalConstants = CONSTANTS
) -> float:
    """Fluctuation-dissipation force floor sqrt(4 kB T k dv / (w_c Q)), N."""
    if bandwidth <= 0:
        raise ValueError("bandwidth must be strictly positive")
    return math.sqrt(
        4.0
        * constants.kB
        * mech.temperature
        * mech.spring_constant
        * bandwidth
        / (mech.resonance * mech.quality_factor)
    )


def signal_force(
    p: float, n: int, config: DeviceConfig, constants: PhysicalConstants = CONSTANTS
) -> float:
    """Gradient force of the n-qubit pseudo-pure subensemble at polarization p.

    F = (hbar dw / 2a) N [((1+p)/2)^n - ((1-p)/2)^n]; the prefactor is the
    single-spin force mu dB/dz times the chain count, with dw the Larmor
    step a gamma dB/dz.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("polarization must lie in [0, 1]")
    if n < 1:
        raise ValueError("qubit count must be >= 1")
    per_spin = constants.hbar * constants.gamma * config.field_gradient / 2.0
    bracket = ((1.0 + p) / 2.0) ** n - ((1.0 - p) / 2.0) ** n
    return per_spin * config.chain_count * bracket


def t2_bridge(
    mech: BridgeMechanics,
    larmor_step: float,
    lattice_step: float,
    feedback_factor: float = 1.0,
    constants: PhysicalConstants = CONSTANTS,
) -> float:
    """Dephasing time from the bridge's thermal position drift, seconds.

    T2 = k w_c Q a^2 / (dw^2 kB T), optionally multiplied by an active-
    feedback stabilization factor (default off).
    """
    if larmor_step <= 0 or lattice_step <= 0:
        raise ValueError("larmor_step and lattice_step must be strictly positive")
    if feedback_factor < 1:
        raise ValueError("feedback_factor must be >= 1")
    base = (
        mech.spring_constant
        * mech.resonance
        * mech.quality_factor
        * lattice_step**2
        / (larmor_step**2 * constants.kB * mech.temperature)
    )
    return base * feedback_factor


def t2_interchain(
    chain_spacing: float, constants: PhysicalConstants = CONSTANTS
) -> float:
    """Flip-flop dephasing between equal-frequency chains: 4 pi D^3 / (g^2 hbar mu0)."""
    if chain_spacing <= 0:
        raise ValueError("chain spacing must be strictly positive")
    return 4 * math.pi * chain_spacing**3 / (constants.gamma**2 * constants.hbar * constants.mu0)


@dataclass(frozen=True)
class ChainLattice:
    """Square 2D array of neighbouring chains around a reference chain.

    ``spacing`` is the chain pitch (both transverse axes) and
    ``lattice_step`` the in-chain spacing used to normalize distances.
    ``jitter`` displaces every chain by a seeded Gaussian offset of that
    standard deviation (metres) to probe the regular-lattice idealization.
    """

    spacing: float
    lattice_step: float
    jitter: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.spacing <= 0 or self.lattice_step <= 0:
            raise ValueError("spacing and lattice_step must be strictly positive")
        if self.jitter < 0:
            raise ValueError("jitter must be non-negative")

    def normalized_distances(self, max_ring: int) -> np.ndarray:
        """Lateral chain distances / lattice_step for rings 1..max_ring."""
        return np.concatenate([self.ring_distances(r) for r in range(1, max_ring + 1)])

    def ring_distances(self, ring: int) -> np.ndarray:
        """Normalized distances of the chains on one square ring."""
        return _ring_distances(self, ring)


def _square_ring(ring: int) -> np.ndarray:
    """Integer (i, j) coordinates with max(|i|, |j|) == ring."""
    side = np.arange(-ring, ring + 1)
    top = np.stack([side, np.full_like(side, ring)], axis=1)
    bottom = np.stack([side, np.full_like(side, -ring)], axis=1)
    inner = np.arange(-ring + 1, ring)
    left = np.stack([np.full_like(inner, -ring), inner], axis=1)
    right = np.stack([np.full_like(inner, ring), inner], axis=1)
    return np.concatenate([top, bottom, left, right])


@lru_cache(maxsize=None)
def _ring_distances(lattice: "ChainLattice", ring: int) -> np.ndarray:
    coords = _square_ring(ring).astype(float) * lattice.spacing
    if lattice.jitter > 0:
        # seed per ring so the enumeration order cannot change the draws
        rng = np.random.default_rng((lattice.seed, ring))
        coords = coords + rng.normal(0.0, lattice.jitter, coords.shape)
    return np.linalg.norm(coords, axis=1) / lattice.lattice_step


def device_lattice(config: DeviceConfig, jitter: float = 0.0, seed: int = 0) -> ChainLattice:
    return ChainLattice(
        spacing=config.chain_spacing,
        lattice_step=config.lattice_step,
        jitter=jitter,
        seed=seed,
    )


@lru_cache(maxsize=None)
def second_moment_sum(
    m: int, lattice: ChainLattice, rel_tol: float = 1e-12, max_rings: int = 100_000
) -> float:
    """Sum over chains of (lam^2/m^2 - 2)^2 / (lam^2/m^2 + 1)^5.

    Rings of the square lattice are added until a whole ring contributes
    less than ``rel_tol`` of the running sum (each term decays like the
    sixth power of distance, so the tail is negligible).
    """
    if m < 1:
        raise ValueError("plane separation m must be >= 1")
    total = 0.0
    for ring in range(1, max_rings + 1):
        lam = lattice.ring_distances(ring)
        if lam.size == 0:
            raise ValueError("chain lattice is empty")
        x = (lam / m) ** 2
        contribution = float(np.sum((x - 2.0) ** 2 / (x + 1.0) ** 5))
        total += contribution
        if ring > 1 and contribution < rel_tol * total:
            return total
    raise RuntimeError("second-moment sum failed to converge")


def gate_error(m: int, lattice: ChainLattice) -> float:
    """Approximate per-gate error when recoupling qubits m planes apart.

    The ratio of the gate time m^3/delta to the cross-coupling dephasing
    time; independent of the coupling strength itself.
    """
    return 0.25 * math.sqrt(second_moment_sum(m, lattice))


def t2_recouple(m: int, lattice: ChainLattice, nearest_coupling: float) -> float:
    """Dephasing time during recoupling from unrefocused cross-chain couplings.

    (1/T2)^2 = (1/16) (delta/m^3)^2 * second_moment_sum(m).
    """
    if nearest_coupling <= 0:
        raise ValueError("nearest coupling must be strictly positive")
    rate = 0.25 * (nearest_coupling / m**3) * math.sqrt(second_moment_sum(m, lattice))
    return 1.0 / rate


def t2_truncation(l: int, nearest_coupling: float, lattice: ChainLattice) -> float:
    """Decoherence time of a block-truncated decoupling scheme.

    T2 * delta = l^3 [1 + F(l)^2]^(-1/2): the leading unrefocused coupling
    is to the same-row qubit l planes away in the next block, degraded by
    the cross-chain gate-error factor.
    """
    if l < 1:
        raise ValueError("block size must be >= 1")
    f = gate_error(l, lattice)
    return l**3 / (nearest_coupling * math.sqrt(1.0 + f * f))


def t2_total(t2_other: float, t2_trunc: float) -> float:
    """Combine truncation decoherence with all other processes: harmonic sum."""
    if t2_other <= 0 or t2_trunc <= 0:
        raise ValueError("decoherence times must be strictly positive")
    if math.isinf(t2_trunc):
        return t2_other
    return 1.0 / (1.0 / t2_other + 1.0 / t2_trunc)


def gates_times_length(
    n: int,
    l: int,
    t2_other: float,
    nearest_coupling: float,
    larmor_step: float,
    lattice: ChainLattice,
) -> float:
    """Logic-gate count times the pulse-length unit, T2 / (t_c / L).

    Decoupling in blocks of l costs t_c = L l^2 / dw per cycle; a block
    covering the whole chain (l >= n) leaves nothing unrefocused, so the
    truncation channel only opens for l < n.
    """
    if not 1 <= l <= n:
        raise ValueError("need 1 <= l <= n")
    if l >= n:
        t2 = t2_other
        block = n
    else:
        t2 = t2_total(t2_other, t2_truncation(l, nearest_coupling, lattice))
        block = l
    return t2 * larmor_step / block**2


def optimize_l(
    n: int,
    t2_other: float,
    nearest_coupling: float,
    larmor_step: float,
    lattice: ChainLattice,
) -> int:
    """Block size maximizing the gate count, by exhaustive scan over 1..n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    best_l = 1
    best = -math.inf
    for l in range(1, n + 1):
        g = gates_times_length(n, l, t2_other, nearest_coupling, larmor_step, lattice)
        if g > best:
            best = g
            best_l = l
    return best_l


def optimal_l_continuous(t2_other: float, nearest_coupling: float) -> float:
    """Small-error stationary point (delta * T2 / 2)^(1/3) of the gate count."""
    return (nearest_coupling * t2_other / 2.0) ** (1.0 / 3.0)


@dataclass(frozen=True)
class DecoherenceBudget:
    """Catalogue of decoherence contributions and the derived gate budget."""

    t2_bridge: float
    t2_interchain: float
    t2_recouple_adjacent: float
    t2_truncation: float
    t2_other: float
    t2_total: float
    gate_error_adjacent: float
    optimal_block: int
    clock_time: float
    gates: float
    gates_times_length: float

    def to_dict(self) -> dict:
        return {
            "t2_bridge_s": self.t2_bridge,
            "t2_interchain_s": self.t2_interchain,
            "t2_recouple_adjacent_s": self.t2_recouple_adjacent,
            "t2_truncation_s": self.t2_truncation,
            "t2_other_s": self.t2_other,
            "t2_total_s": self.t2_total,
            "gate_error_adjacent": self.gate_error_adjacent,
            "optimal_block": self.optimal_block,
            "clock_time_s": self.clock_time,
            "gates": self.gates,
            "gates_times_length": self.gates_times_length,
        }


def build_budget(
    config: DeviceConfig,
    n: int,
    t2_other: Optional[float] = None,
    mech: Optional[BridgeMechanics] = None,
    constants: PhysicalConstants = CONSTANTS,
) -> DecoherenceBudget:
    """Assemble the full budget for an n-qubit computation.

    ``t2_other`` defaults to the harmonic combination of the two modelled
    always-on channels (bridge drift and inter-chain flip-flops); pass a
    value to reproduce specific design curves.
    """
    from .chain import build_chain  # local import to avoid a cycle

    if mech is None:
        mech = beam_mechanics(config)
    chain = build_chain(config, n=min(n, 2) if n >= 2 else 1, constants=constants)
    step = chain.larmor_step
    delta = chain.nearest_coupling if n >= 2 else (
        build_chain(config, n=2, constants=constants).nearest_coupling
    )
    bridge = t2_bridge(
        mech, step, config.lattice_step, config.feedback_factor, constants
    )
    interchain = t2_interchain(config.chain_spacing, constants)
    if t2_other is None:
        t2_0 = 1.0 / (1.0 / bridge + 1.0 / interchain)
    else:
        t2_0 = t2_other
    lattice = device_lattice(config)
    l_star = optimize_l(n, t2_0, delta, step, lattice)
    if l_star >= n:
        trunc = math.inf
        total = t2_0
    else:
        trunc = t2_truncation(l_star, delta, lattice)
        total = t2_total(t2_0, trunc)
    block = min(n, l_star)
    t_c = config.pulse_length_factor * block**2 / step
    return DecoherenceBudget(
        t2_bridge=bridge,
        t2_interchain=interchain,
        t2_recouple_adjacent=t2_recouple(1, lattice, delta),
        t2_truncation=trunc,
        t2_other=t2_0,
        t2_total=total,
        gate_error_adjacent=gate_error(1, lattice),
        optimal_block=l_star,
        clock_time=t_c,
        gates=total / t_c,
        gates_times_length=total * step / block**2,
    )
