"""Exact state-vector simulator for small qubit registers.

This is the ground-truth oracle: every bookkeeping rule used by the Monte
Carlo simulator (recovery after a failed heralded gate, GHZ fusion and
growth, the aux-mediated CNOT unit, the full logical CNOT sequence) is
verified against explicit state vectors built here.

Conventions:
  * Qubit k corresponds to bit k of the amplitude index, qubit 0 being the
    least significant bit.
  * ``measure`` removes the measured qubit from the register; ``dephase``
    projects without removing (an unread environment measurement).
  * The encoded zero ``make_ghz(n)`` is the uniform superposition of all
    even-parity bitstrings, i.e. (|+>^n + |->^n)/sqrt(2).
"""
from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 14
ATOL = 1e-10

_SQRT2_INV = 1.0 / math.sqrt(2.0)

H = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
# Two-qubit matrices act on basis |q1 q0> with q0 the first target argument.
CZ = np.diag([1, 1, 1, -1]).astype(complex)
# CNOT(control, target): flips target when control is 1.
CNOT = np.array(
    [[1, 0, 0, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0]], dtype=complex)


class BasisKind(enum.Enum):
    QUBIT = "qubit"
    ROTATED = "rotated"


@dataclass(frozen=True)
class MeasurementRecord:
    qubit: int
    basis: BasisKind
    outcome: int  # 0 -> |0> or |+>, 1 -> |1> or |->


@dataclass
class PureState:
    num_qubits: int
    amplitudes: np.ndarray

    def copy(self) -> "PureState":
        return PureState(self.num_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def check(self) -> None:
        if self.num_qubits > 0 and len(self.amplitudes) != 1 << self.num_qubits:
            raise ValueError("amplitude vector length mismatch")
        if abs(self.norm() - 1.0) > ATOL:
            raise ValueError(f"state not normalized: |psi|={self.norm()}")


EMPTY_STATE = PureState(0, np.array([1.0 + 0j]))


def zero_state(n: int) -> PureState:
    _check_register_size(n)
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = 1.0
    return PureState(n, amps)


def product_state(kets: str) -> PureState:
    """State from a ket string over {0,1,+,-}; kets[0] is qubit 0."""
    single = {
        "0": np.array([1, 0], dtype=complex),
        "1": np.array([0, 1], dtype=complex),
        "+": np.array([1, 1], dtype=complex) * _SQRT2_INV,
        "-": np.array([1, -1], dtype=complex) * _SQRT2_INV,
    }
    _check_register_size(len(kets))
    amps = np.array([1.0 + 0j])
    for ch in reversed(kets):
        amps = np.kron(amps, single[ch])
    return PureState(len(kets), amps)


def _check_register_size(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"register size {n} outside 1..{MAX_QUBITS}")


def _check_targets(state: PureState, targets: tuple[int, ...]) -> None:
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate targets {targets}")
    for q in targets:
        if not 0 <= q < state.num_qubits:
            raise ValueError(f"qubit {q} out of range for {state.num_qubits}-qubit register")


def u_psi_matrix(a: complex, b: complex) -> np.ndarray:
    """Preparation map a*I + b*X. Unitary on single basis states; used to
    imprint logical amplitudes on one qubit of an encoded zero."""
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > ATOL:
        raise ValueError("require |a|^2 + |b|^2 = 1")
    return a * I2 + b * X


def _apply_1q(amps: np.ndarray, n: int, mat: np.ndarray, q: int) -> np.ndarray:
    t = amps.reshape([2] * n)
    axis = n - 1 - q
    t = np.moveaxis(t, axis, 0)
    t = np.tensordot(mat, t, axes=([1], [0]))
    t = np.moveaxis(t, 0, axis)
    return np.ascontiguousarray(t.reshape(-1))


def _apply_2q(amps: np.ndarray, n: int, mat: np.ndarray, q1: int, q0: int) -> np.ndarray:
    """Apply 4x4 ``mat`` on qubits (q1, q0); basis order |q1 q0>."""
    t = amps.reshape([2] * n)
    a1, a0 = n - 1 - q1, n - 1 - q0
    t = np.moveaxis(t, (a1, a0), (0, 1))
    shape = t.shape
    t = mat @ t.reshape(4, -1)
    t = t.reshape(shape)
    t = np.moveaxis(t, (0, 1), (a1, a0))
    return np.ascontiguousarray(t.reshape(-1))


def apply_gate(state: PureState, gate: str, targets: tuple[int, ...] | list[int],
               a: complex = 0.0, b: complex = 0.0) -> PureState:
    """Apply one of H, X, Z, CZ, CNOT, U_PSI to the given targets.

    CNOT takes (control, target). U_PSI takes (a, b) with |a|^2+|b|^2=1 and
    renormalizes afterwards (it is a preparation map, exact on basis states
    and on encoded blocks).
    """
    targets = tuple(targets)
    _check_targets(state, targets)
    name = gate.upper()
    if name in ("H", "X", "Z", "U_PSI"):
        if len(targets) != 1:
            raise ValueError(f"{name} takes one target")
        mat = {"H": H, "X": X, "Z": Z}.get(name)
        if mat is None:
            mat = u_psi_matrix(a, b)
        amps = _apply_1q(state.amplitudes, state.num_qubits, mat, targets[0])
    elif name in ("CZ", "CNOT"):
        if len(targets) != 2:
            raise ValueError(f"{name} takes two targets")
        mat = CZ if name == "CZ" else CNOT
        # CNOT(control, target): control is the high bit of the 4x4 basis.
        amps = _apply_2q(state.amplitudes, state.num_qubits, mat, targets[0], targets[1])
    else:
        raise ValueError(f"unknown gate {gate!r}")
    nrm = np.linalg.norm(amps)
    if nrm < 1e-12:
        raise ValueError("operation annihilated the state")
    if abs(nrm - 1.0) > 1e-12:
        amps = amps / nrm
    return PureState(state.num_qubits, amps)


def make_ghz(n: int) -> PureState:
    """Encoded zero |0^n> = (|+>^n + |->^n)/sqrt(2): the uniform
    superposition of all even-parity bitstrings."""
    _check_register_size(n)
    dim = 1 << n
    amps = np.zeros(dim, dtype=complex)
    idx = np.arange(dim)
    parity = np.zeros(dim, dtype=np.int64)
    for k in range(n):
        parity ^= (idx >> k) & 1
    amps[parity == 0] = 1.0
    amps /= np.linalg.norm(amps)
    return PureState(n, amps)


def make_logical(n: int, a: complex, b: complex) -> PureState:
    """a|0^n> + b|1^n>, prepared by applying the a*I + b*X map to one qubit
    of the encoded zero."""
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > ATOL:
        raise ValueError("require |a|^2 + |b|^2 = 1")
    return apply_gate(make_ghz(n), "U_PSI", (0,), a=a, b=b)


def logical_direct(n: int, a: complex, b: complex) -> PureState:
    """a|0^n> + b|1^n> built directly from parity sectors (used to cross
    check make_logical)."""
    _check_register_size(n)
    dim = 1 << n
    idx = np.arange(dim)
    parity = np.zeros(dim, dtype=np.int64)
    for k in range(n):
        parity ^= (idx >> k) & 1
    amps = np.where(parity == 0, complex(a), complex(b)).astype(complex)
    amps /= math.sqrt(dim / 2)
    return PureState(n, amps)


def _outcome_probs(state: PureState, qubit: int, basis: BasisKind) -> tuple[np.ndarray, np.ndarray]:
    work = state
    if basis is BasisKind.ROTATED:
        work = apply_gate(state, "H", (qubit,))
    n = work.num_qubits
    t = work.amplitudes.reshape([2] * n)
    axis = n - 1 - qubit
    t = np.moveaxis(t, axis, 0)
    p0 = float(np.sum(np.abs(t[0]) ** 2))
    p1 = float(np.sum(np.abs(t[1]) ** 2))
    return np.array([p0, p1]), t


def project(state: PureState, qubit: int, basis: BasisKind, outcome: int,
            remove: bool) -> tuple[float, PureState]:
    """Project a qubit onto an outcome; returns (probability, post-state).

    With remove=True the measured qubit leaves the register. Probability-0
    branches return (0.0, state) unchanged.
    """
    _check_targets(state, (qubit,))
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    probs, t = _outcome_probs(state, qubit, basis)
    p = probs[outcome]
    if p <= 0.0:
        return 0.0, state
    branch = t[outcome] / math.sqrt(p)
    n = state.num_qubits
    if remove:
        if n == 1:
            return p, EMPTY_STATE
        amps = np.ascontiguousarray(branch.reshape(-1))
        return p, PureState(n - 1, amps)
    full = np.zeros_like(t)
    full[outcome] = branch
    full = np.moveaxis(full, 0, n - 1 - qubit)
    amps = np.ascontiguousarray(full.reshape(-1))
    if basis is BasisKind.ROTATED:
        post = apply_gate(PureState(n, amps), "H", (qubit,))
        return p, post
    return p, PureState(n, amps)


def measure(state: PureState, qubit: int, basis: BasisKind,
            rng: random.Random) -> tuple[MeasurementRecord, PureState]:
    """Sample a Born-rule outcome and remove the qubit from the register.

    Rotated-basis outcomes: 0 is |+>, 1 is |->. Measuring the last qubit
    returns the empty-register sentinel.
    """
    probs, _ = _outcome_probs(state, qubit, basis)
    outcome = 0 if rng.random() < probs[0] else 1
    _, post = project(state, qubit, basis, outcome, remove=True)
    return MeasurementRecord(qubit, basis, outcome), post


def dephase(state: PureState, qubit: int, rng: random.Random) -> PureState:
    """Unread qubit-basis projection: the environment learns the qubit value
    but the qubit stays in the register."""
    probs, _ = _outcome_probs(state, qubit, BasisKind.QUBIT)
    outcome = 0 if rng.random() < probs[0] else 1
    _, post = project(state, qubit, BasisKind.QUBIT, outcome, remove=False)
    return post


def fidelity(s1: PureState, s2: PureState) -> float:
    """|<s1|s2>|^2 (global phase invariant)."""
    if s1.num_qubits != s2.num_qubits:
        raise ValueError("register size mismatch")
    return float(abs(np.vdot(s1.amplitudes, s2.amplitudes)) ** 2)
