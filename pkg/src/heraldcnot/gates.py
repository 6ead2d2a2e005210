"""Stochastic models of the primitive operations: heralded CZ, effective
CNOT, Bell-pair generation, and the teleported (non-local) CNOT.

Success/failure is Bernoulli in p_cz; durations are outcome independent.
Heralded errors are charged multiplicatively, on success only: a failed
gate's participants are measured out and re-encoded, so its error is
absorbed into the recovery path. Single-qubit rotations and measurements
are deterministic, instantaneous and error free by default (configurable).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

INTRA_NODE = "intra_node"
INTER_NODE = "inter_node"


@dataclass(frozen=True)
class GateParams:
    p_cz: float = 1.0
    t_cz: float = 10e-6
    eps_cz: float = 1e-4
    t_bell_remote: float = 160e-6
    t_bell_local: float = 10e-6
    eps_bell: float = 1e-4
    t_coh: float = 1.0
    measure_time: float = 0.0
    reset_time: float = 0.0
    bell_time_model: str = "fixed"     # fixed | geometric
    bell_gen_success: float = 0.5      # per-attempt success in geometric mode

    def __post_init__(self):
        for name in ("p_cz", "eps_cz", "eps_bell", "bell_gen_success"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        for name in ("t_cz", "t_bell_remote", "t_bell_local", "t_coh",
                     "measure_time", "reset_time"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.bell_time_model not in ("fixed", "geometric"):
            raise ValueError(f"unknown bell_time_model {self.bell_time_model!r}")


class QubitRef(NamedTuple):
    cavity: str
    qubit: int


@dataclass(frozen=True)
class GateOutcome:
    success: bool
    duration: float
    heralded_error_factor: float  # 1 - eps on success, 1.0 otherwise
    participants: tuple = ()


@dataclass(frozen=True)
class BellPair:
    link: str
    generation_time: float
    error: float


@dataclass(frozen=True)
class TeleportedOutcome:
    success: bool
    duration: float
    failed_side: Optional[str]  # "control" | "target" | None
    bell: BellPair
    cz_control_ok: bool
    cz_target_ok: bool


def sample_cz(params: GateParams, rng,
              participants: tuple = ()) -> GateOutcome:
    """One heralded CZ attempt: Bernoulli(p_cz) success, duration t_cz either
    way. On failure both participants are dephased (qubit-basis projection)
    and must be routed through recovery."""
    ok = rng.random() < params.p_cz
    factor = (1.0 - params.eps_cz) if ok else 1.0
    return GateOutcome(ok, params.t_cz, factor, participants)


def effective_cnot(control: QubitRef, target: QubitRef, params: GateParams,
                   rng) -> GateOutcome:
    """CNOT synthesized as Hadamard-CZ-Hadamard on the target (rotations are
    free). Both qubits must share a cavity; cross-cavity gates teleport.

    On failure the dephasing acts on the post-Hadamard frame of the target,
    so callers must only ever put auxiliary qubits in the target slot of a
    gate that touches logical information (the aux discipline)."""
    if control.cavity != target.cavity:
        raise ValueError(
            f"effective_cnot is local; {control.cavity!r} != {target.cavity!r}"
            " (use teleported_cnot)")
    out = sample_cz(params, rng, participants=(control, target))
    return out


def bell_generation_time(link: str, params: GateParams, rng) -> float:
    if link == INTER_NODE:
        base = params.t_bell_remote
    elif link == INTRA_NODE:
        base = params.t_bell_local
    else:
        raise ValueError(f"unknown link kind {link!r}")
    if params.bell_time_model == "fixed":
        return base
    # geometric repeat-until-success with the same mean: per-attempt time
    # base * q, success probability q per attempt
    q = params.bell_gen_success
    attempts = 1
    while rng.random() >= q:
        attempts += 1
    return base * q * attempts


def generate_bell(link: str, params: GateParams, rng) -> BellPair:
    """Produce one Bell pair on the given link after its generation time
    (the quoted times are treated as mean effective times)."""
    return BellPair(link, bell_generation_time(link, params, rng), params.eps_bell)


def teleported_cnot(control: QubitRef, target: QubitRef, params: GateParams,
                    rng, link: str = INTER_NODE) -> TeleportedOutcome:
    """Gate teleportation of a CNOT through one Bell pair: one local heralded
    CZ at the control side, one at the target side, plus free measurements
    and Pauli corrections. Succeeds only if both CZs succeed.

    The Bell pair is consumed either way. On failure both data qubits end up
    dephased (the non-failed side through its Bell-half entanglement) and
    must be recovered; ``failed_side`` reports the first failed CZ. Duration
    is bell generation + 2 t_cz, serial."""
    bell = generate_bell(link, params, rng)
    ok_a = rng.random() < params.p_cz
    ok_b = rng.random() < params.p_cz
    success = ok_a and ok_b
    failed = None if success else ("control" if not ok_a else "target")
    return TeleportedOutcome(success, bell.generation_time + 2 * params.t_cz,
                             failed, bell, ok_a, ok_b)


def heralded_factor(cz_successes: int, bell_pairs_used: int,
                    params: GateParams) -> float:
    """Multiplicative no-error probability of all successful heralded
    operations in a trial."""
    return ((1.0 - params.eps_cz) ** cz_successes
            * (1.0 - params.eps_bell) ** bell_pairs_used)


def exposure_factor(qubit_seconds: float, t_coh: float) -> float:
    """prod_q exp(-tau_q / T_coh) collapses to exp(-sum tau / T_coh)."""
    if t_coh == math.inf:
        return 1.0
    return math.exp(-qubit_seconds / t_coh)
