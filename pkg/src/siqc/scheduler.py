"""Decoupling / recoupling pulse schedules built from orthogonal sign rows.

Assigning each qubit a row of a Hadamard sign matrix as its toggling-frame
sign sequence makes every pairwise Ising coupling average to zero over one
cycle (distinct rows are orthogonal), while two qubits sharing a row keep
their full coupling.  A schedule realizes the sign sequences with selective
pi pulses at slot boundaries: a qubit's sign flips exactly where a pulse on
it is scheduled.

Pulses sharing a boundary are serialized on the single RF channel, each
taking ``pulse_length_factor / larmor_step`` seconds, so one cycle of a
size-``n_block`` sequence costs

    t_c = pulse_length_factor * K * n_block / larmor_step

which reduces to the familiar L n^2 / dw scaling when the sign-matrix order
K matches the block size.  Long chains are truncated into contiguous blocks
of ``set_size``; couplings between blocks are not refocused and feed the
truncation decoherence model in the budget module.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .chain import SpinChainModel

HADAMARD_ORDER_CAP = 2**20


class ScheduleError(ValueError):
    """Raised for schedule requests the block scheme cannot express."""


@dataclass(frozen=True)
class SignMatrix:
    """Square matrix of +/-1 entries with mutually orthogonal rows."""

    order: int
    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries)
        if m.shape != (self.order, self.order):
            raise ValueError("entries must be a square matrix of the stated order")
        if not np.all(np.abs(m) == 1):
            raise ValueError("entries must be +/-1")
        gram = m @ m.T
        if not np.array_equal(gram, self.order * np.eye(self.order, dtype=m.dtype)):
            raise ValueError("rows are not mutually orthogonal")

    def row(self, index: int) -> np.ndarray:
        return self.entries[index]


def hadamard(order_request: int, cap: int = HADAMARD_ORDER_CAP) -> SignMatrix:
    """Smallest Sylvester-construction sign matrix of order 2^k >= request."""
    if order_request < 1:
        raise ValueError("order_request must be >= 1")
    order = 1
    while order < order_request:
        order *= 2
    if order > cap:
        raise ScheduleError(f"requested order {order_request} exceeds cap {cap}")
    m = np.array([[1]], dtype=np.int64)
    while m.shape[0] < order:
        m = np.block([[m, m], [m, -m]])
    return SignMatrix(order=order, entries=m)


@dataclass(frozen=True)
class Pulse:
    time: float
    qubit: int
    angle: float = np.pi
    axis: str = "x"


@dataclass(frozen=True)
class PulseSchedule:
    """Timed pi-pulse sequence and the toggling signs it implements.

    ``toggling[q][k]`` is qubit q's sign during slot k.  All qubits start at
    +1; a pulse on q at the boundary ending slot k flips its sign for slot
    k+1, and the flip count over a full cycle is even so the cycle is
    stroboscopically repeatable.
    """

    slot_duration: float
    slots: int
    pulses: tuple[Pulse, ...]
    toggling: dict[int, tuple[int, ...]]
    cycle_time: float
    recoupled_pair: Optional[tuple[int, int]] = None
    pulse_time: float = 0.0
    block_size: int = field(default=0)

    @property
    def qubits(self) -> list[int]:
        return sorted(self.toggling)

    def sign_array(self) -> np.ndarray:
        """(n_qubits, slots) array of toggling signs ordered by qubit index."""
        return np.array([self.toggling[q] for q in self.qubits], dtype=np.int64)


def _assign_rows(block: list[int], matrix: SignMatrix,
                 recouple: Optional[tuple[int, int]]) -> dict[int, int]:
    """Map each qubit in the block to a sign-matrix row index.

    Rows are handed out in block order; a recoupled pair shares the row of
    its first member and everyone else keeps distinct rows.
    """
    rows: dict[int, int] = {}
    next_row = 0
    pair = set(recouple) if recouple else set()
    pair_row: Optional[int] = None
    for q in block:
        if q in pair:
            if pair_row is None:
                pair_row = next_row
                next_row += 1
            rows[q] = pair_row
        else:
            rows[q] = next_row
            next_row += 1
    return rows


def decoupling_schedule(
    chain: SpinChainModel,
    set_size: int,
    pulse_length_factor: float = 1.0,
    recouple: Optional[tuple[int, int]] = None,
) -> PulseSchedule:
    """Compile a decoupling (optionally recoupling) schedule for the chain.

    The chain is split into contiguous blocks of ``set_size`` qubits; each
    block's qubits receive distinct rows of the order-K Sylvester matrix
    (K = next power of two >= set_size, shorter final blocks padded with
    idle rows).  With ``recouple=(i, j)`` the two qubits share one row and
    keep their full mutual coupling; the pair must lie within one block.

    Raises:
        ScheduleError: for a recoupling pair spanning two blocks, which the
            block scheme cannot express (use bit swapping instead).
    """
    if not 1 <= set_size <= chain.n:
        raise ScheduleError("set_size must satisfy 1 <= set_size <= chain qubit count")
    if pulse_length_factor <= 0:
        raise ValueError("pulse_length_factor must be strictly positive")
    if recouple is not None:
        i, j = recouple
        if i == j:
            raise ScheduleError("recoupling pair must be two distinct qubits")
        if not (0 <= i < chain.n and 0 <= j < chain.n):
            raise ScheduleError("recoupling pair out of range")
        if i // set_size != j // set_size:
            raise ScheduleError(
                "recoupling pair spans two truncation blocks; couple nearby "
                "qubits and move data by bit swapping instead"
            )
    matrix = hadamard(set_size)
    k_order = matrix.order
    pulse_time = pulse_length_factor / chain.larmor_step
    slot_duration = set_size * pulse_time
    cycle_time = k_order * slot_duration

    toggling: dict[int, tuple[int, ...]] = {}
    pulses: list[Pulse] = []
    for start in range(0, chain.n, set_size):
        block = list(range(start, min(start + set_size, chain.n)))
        pair = recouple if recouple and recouple[0] in block else None
        rows = _assign_rows(block, matrix, pair)
        for q in block:
            toggling[q] = tuple(int(s) for s in matrix.row(rows[q]))
        # serialized pulses at each boundary; boundary k ends slot k-1
        for k in range(1, k_order + 1):
            flipping = [
                q for q in block
                if toggling[q][k % k_order] != toggling[q][k - 1]
            ]
            count = len(flipping)
            for idx, q in enumerate(flipping):
                t = k * slot_duration - (count - idx) * pulse_time
                pulses.append(Pulse(time=t, qubit=q))
    pulses.sort(key=lambda p: (p.time, p.qubit))
    return PulseSchedule(
        slot_duration=slot_duration,
        slots=k_order,
        pulses=tuple(pulses),
        toggling=toggling,
        cycle_time=cycle_time,
        recoupled_pair=tuple(recouple) if recouple else None,
        pulse_time=pulse_time,
        block_size=set_size,
    )


def average_couplings(schedule: PulseSchedule, chain: SpinChainModel) -> np.ndarray:
    """Cycle-averaged coupling matrix delta_ij * (1/K) sum_k s_i(k) s_j(k).

    The sign correlation is computed in exact integer arithmetic, so fully
    decoupled pairs come out as exactly 0.0 and recoupled or same-row pairs
    as exactly delta_ij.  Unrefocused inter-block pairs appear with their
    bare coupling whenever their rows happen to coincide.
    """
    qubits = schedule.qubits
    if qubits != list(range(chain.n)):
        raise ValueError("schedule does not cover the whole chain")
    signs = schedule.sign_array()
    corr = signs @ signs.T  # exact integers
    avg = chain.coupling * (corr / float(schedule.slots))
    zero = corr == 0
    avg[zero] = 0.0
    return avg


def clock_time(n_block: int, pulse_length_factor: float, larmor_step: float) -> float:
    """Cycle time L * n^2 / dw of a size-n decoupling sequence."""
    if n_block < 1:
        raise ValueError("n_block must be >= 1")
    return pulse_length_factor * n_block**2 / larmor_step


def toggling_from_pulses(schedule: PulseSchedule) -> dict[int, tuple[int, ...]]:
    """Reconstruct toggling signs purely from the stored pulse times.

    Each pulse is attributed to the slot boundary it precedes; signs start
    at +1 and flip at every attributed boundary.  Round-trips the assigned
    rows exactly for any schedule this module builds.
    """
    k_order = schedule.slots
    tau = schedule.slot_duration
    flips: dict[int, set[int]] = {q: set() for q in schedule.toggling}
    for p in schedule.pulses:
        boundary = int(np.ceil(p.time / tau - 1e-12))
        if not 1 <= boundary <= k_order:
            raise ValueError(f"pulse at t={p.time} outside the cycle")
        if boundary in flips[p.qubit]:
            raise ValueError("two pulses on one qubit at the same boundary")
        flips[p.qubit].add(boundary)
    out: dict[int, tuple[int, ...]] = {}
    for q, bset in flips.items():
        sign = 1
        row = []
        for k in range(k_order):
            if k in bset:
                sign = -sign
            row.append(sign)
        out[q] = tuple(row)
    return out


def schedule_to_json(schedule: PulseSchedule) -> str:
    doc = {
        "slot_duration_s": schedule.slot_duration,
        "slots": schedule.slots,
        "pulse_time_s": schedule.pulse_time,
        "block_size": schedule.block_size,
        "cycle_time_s": schedule.cycle_time,
        "pulses": [
            {"t_s": p.time, "qubit": p.qubit, "angle_rad": p.angle}
            for p in schedule.pulses
        ],
        "toggling": {str(q): list(row) for q, row in sorted(schedule.toggling.items())},
        "recoupled_pair": list(schedule.recoupled_pair)
        if schedule.recoupled_pair
        else None,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def schedule_from_json(text: str) -> PulseSchedule:
    doc = json.loads(text)
    toggling = {int(q): tuple(int(s) for s in row) for q, row in doc["toggling"].items()}
    pulses = tuple(
        Pulse(time=p["t_s"], qubit=p["qubit"], angle=p.get("angle_rad", np.pi))
        for p in doc["pulses"]
    )
    return PulseSchedule(
        slot_duration=doc["slot_duration_s"],
        slots=doc["slots"],
        pulses=pulses,
        toggling=toggling,
        cycle_time=doc["cycle_time_s"],
        recoupled_pair=tuple(doc["recoupled_pair"]) if doc.get("recoupled_pair") else None,
        pulse_time=doc.get("pulse_time_s", 0.0),
        block_size=doc.get("block_size", 0),
    )
