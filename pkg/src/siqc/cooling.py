"""Algorithmic cooling by recursive 3-bit majority compression.

The elementary step is the reversible circuit

    b <- b XOR a;  c <- c XOR a;  a <- a XOR (b AND c)

which leaves bit ``a`` holding the majority of the three inputs.  For
independent inputs of equal bias p the target bias becomes (3p - p^3) / 2.
Rounds of this step over disjoint triples concentrate polarization into a
shrinking subregister; the discarded support bits are decoupled and
ignored.  Being a permutation of the joint distribution, every step
conserves total Shannon entropy exactly, which bounds the achievable cold
register by n0 * (1 - H2((1 + p0) / 2)) bits; for small p0 that bound is
the familiar n0 * p0^2 / (2 ln 2).

Two register representations are provided: an exact joint probability
table (up to 20 bits) and a bias-propagation approximation that tracks one
number per bit and treats bits as independent after each step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

MAX_EXACT_BITS = 20


class CoolingError(ValueError):
    pass


def binary_entropy(x: float) -> float:
    """H2(x) in bits, with the 0 log 0 = 0 convention."""
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def negentropy_per_bit(bias: float) -> float:
    """1 - H2((1 + p)/2): recoverable order per bit at bias p."""
    return 1.0 - binary_entropy((1.0 + bias) / 2.0)


def entropy_limit(n0: int, p0: float) -> tuple[float, float]:
    """Cold-register size bounds: (exact Shannon bound, small-p approximation).

    Returns ``n0 * (1 - H2((1+p0)/2))`` and ``n0 * p0^2 / (2 ln 2)``, the
    number of fully polarized bits the register's entropy budget allows.
    """
    if not 0 < p0 < 1:
        raise CoolingError("initial bias must satisfy 0 < p0 < 1")
    exact = n0 * negentropy_per_bit(p0)
    approx = n0 * p0**2 / (2 * math.log(2))
    return exact, approx


def majority_bias(pa: float, pb: float, pc: float) -> float:
    """Bias of maj(a, b, c) for independent bits with the given biases."""
    return (pa + pb + pc - pa * pb * pc) / 2.0


@dataclass
class CoolingRegister:
    """Classical-bit register under reversible cooling steps.

    Exactly one of ``table`` (joint probability over 2^n states, exact
    mode) or ``biases`` (per-bit bias vector, independent-bit approximate
    mode) is set.  Bit 0 is the most significant bit of the state index and
    bias means P(0) - P(1).
    """

    mode: str
    table: Optional[np.ndarray] = None
    biases: Optional[np.ndarray] = None
    history: list = field(default_factory=list)

    @classmethod
    def uniform_bias(cls, n_bits: int, bias: float, mode: str = "approximate"):
        if n_bits < 1:
            raise CoolingError("register needs at least one bit")
        if not -1.0 <= bias <= 1.0:
            raise CoolingError("bias must lie in [-1, 1]")
        if mode == "approximate":
            return cls(mode=mode, biases=np.full(n_bits, float(bias)))
        if mode == "exact":
            if n_bits > MAX_EXACT_BITS:
                raise CoolingError(f"exact mode supports at most {MAX_EXACT_BITS} bits")
            p0 = (1.0 + bias) / 2.0
            bits = _bit_matrix(n_bits)
            table = np.prod(np.where(bits == 0, p0, 1.0 - p0), axis=1)
            return cls(mode=mode, table=table)
        raise CoolingError(f"unknown mode {mode!r}")

    @property
    def n_bits(self) -> int:
        if self.mode == "exact":
            return int(round(math.log2(self.table.size)))
        return self.biases.size

    def bias_of(self, bit: int) -> float:
        if self.mode == "approximate":
            return float(self.biases[bit])
        marks = _bit_matrix(self.n_bits)[:, bit]
        p0 = float(self.table[marks == 0].sum())
        return 2.0 * p0 - 1.0

    def entropy(self) -> float:
        """Total Shannon entropy in bits (exact mode only)."""
        if self.mode != "exact":
            raise CoolingError("entropy is only defined for the exact joint table")
        p = self.table[self.table > 0]
        return float(-(p * np.log2(p)).sum())

    def validate(self):
        if self.mode == "exact":
            if abs(self.table.sum() - 1.0) > 1e-12:
                raise CoolingError("joint table must sum to 1")
            if self.table.min() < -1e-15:
                raise CoolingError("joint table has negative probability")
        else:
            if np.any(np.abs(self.biases) > 1.0 + 1e-15):
                raise CoolingError("biases must lie in [-1, 1]")


def _bit_matrix(n_bits: int) -> np.ndarray:
    idx = np.arange(2**n_bits)
    return ((idx[:, None] >> (n_bits - 1 - np.arange(n_bits))) & 1).astype(np.int8)


def _compression_permutation(n_bits: int, a: int, b: int, c: int) -> np.ndarray:
    """State-index permutation of the majority compression circuit."""
    idx = np.arange(2**n_bits)
    bit_a = (idx >> (n_bits - 1 - a)) & 1
    bit_b = (idx >> (n_bits - 1 - b)) & 1
    bit_c = (idx >> (n_bits - 1 - c)) & 1
    new_b = bit_b ^ bit_a
    new_c = bit_c ^ bit_a
    new_a = bit_a ^ (new_b & new_c)
    out = idx.copy()
    out ^= (bit_a ^ new_a) << (n_bits - 1 - a)
    out ^= (bit_b ^ new_b) << (n_bits - 1 - b)
    out ^= (bit_c ^ new_c) << (n_bits - 1 - c)
    return out


def compress3(register: CoolingRegister, bits: Sequence[int]) -> CoolingRegister:
    """Apply the 3-bit majority compression; the first index is the target.

    Exact mode permutes the joint table (entropy preserving).  Approximate
    mode updates the target to the exact majority marginal for independent
    inputs and the supports to the XOR marginals, then keeps treating all
    bits as independent.
    """
    a, b, c = bits
    if len({a, b, c}) != 3:
        raise CoolingError("compress3 needs three distinct bit indices")
    n = register.n_bits
    if not all(0 <= q < n for q in (a, b, c)):
        raise CoolingError("bit index out of range")
    if register.mode == "exact":
        perm = _compression_permutation(n, a, b, c)
        new_table = np.empty_like(register.table)
        new_table[perm] = register.table
        out = CoolingRegister(
            mode="exact", table=new_table, history=register.history + [(a, b, c)]
        )
    else:
        pa, pb, pc = (float(register.biases[q]) for q in (a, b, c))
        biases = register.biases.copy()
        biases[a] = majority_bias(pa, pb, pc)
        biases[b] = pa * pb
        biases[c] = pa * pc
        out = CoolingRegister(
            mode="approximate", biases=biases, history=register.history + [(a, b, c)]
        )
    return out


def _discard(register: CoolingRegister, keep: Sequence[int]) -> CoolingRegister:
    """Drop all bits not in ``keep`` (marginalize / slice the bias vector)."""
    keep = list(keep)
    if register.mode == "approximate":
        return CoolingRegister(
            mode="approximate",
            biases=register.biases[keep].copy(),
            history=register.history,
        )
    n = register.n_bits
    shape = (2,) * n
    axes = tuple(q for q in range(n) if q not in keep)
    table = register.table.reshape(shape).sum(axis=axes).reshape(-1)
    return CoolingRegister(mode="exact", table=table, history=register.history)


@dataclass(frozen=True)
class CoolResult:
    cold_bits: int
    bias: float
    steps: int
    rounds: int
    entropy_bound_exact: float
    entropy_bound_paper: float
    target_reached: bool


def cool(
    n0: int,
    p0: float,
    rounds: Optional[int] = None,
    target_bias: Optional[float] = None,
    mode: str = "approximate",
) -> CoolResult:
    """Run recursive majority cooling on a fresh register.

    Policy is either a fixed number of rounds or a target bias to reach.
    Each round partitions the live register into consecutive triples,
    compresses each onto its first bit, and discards everything else
    (supports and any leftover bits), so the cold registers stay at a
    single uniform bias.  Cooling stops early when fewer than three bits
    remain.

    Raises:
        CoolingError: for n0 < 3, p0 outside (0, 1), or a target bias >= 1,
            which no amount of compression can reach.
    """
    if n0 < 3:
        raise CoolingError("cooling needs an initial register of at least 3 bits")
    if not 0 < p0 < 1:
        raise CoolingError("initial bias must satisfy 0 < p0 < 1")
    if rounds is None and target_bias is None:
        raise CoolingError("give either a round count or a target bias")
    if target_bias is not None and target_bias >= 1.0:
        raise CoolingError("target bias >= 1 is unreachable by entropy compression")
    bound_exact, bound_paper = entropy_limit(n0, p0)

    register = CoolingRegister.uniform_bias(n0, p0, mode=mode)
    steps = 0
    done_rounds = 0
    bias = p0
    while True:
        if target_bias is not None and bias >= target_bias:
            reached = True
            break
        if rounds is not None and done_rounds >= rounds:
            reached = target_bias is None or bias >= target_bias
            break
        live = register.n_bits
        if live < 3:
            reached = target_bias is None or bias >= target_bias
            break
        groups = live // 3
        keep = []
        for g in range(groups):
            register = compress3(register, (3 * g, 3 * g + 1, 3 * g + 2))
            steps += 1
            keep.append(3 * g)
        register = _discard(register, keep)
        done_rounds += 1
        bias = min(register.bias_of(q) for q in range(register.n_bits))

    cold_bits = register.n_bits
    # entropy accounting: the cold register can never beat the Shannon bound
    yield_bits = cold_bits * negentropy_per_bit(bias)
    if yield_bits > bound_exact + 1e-9:
        raise CoolingError("cooling run exceeded the entropy bound (internal error)")
    return CoolResult(
        cold_bits=cold_bits,
        bias=bias,
        steps=steps,
        rounds=done_rounds,
        entropy_bound_exact=bound_exact,
        entropy_bound_paper=bound_paper,
        target_reached=reached,
    )
