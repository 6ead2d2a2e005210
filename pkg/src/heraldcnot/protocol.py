"""The logical CNOT procedures as deterministic state machines over blocks,
auxiliary qubits, heralded gates, and time.

Frozen gate sequence (certified against the state-vector oracle, see
``verify``): the resource block is grown to n+1 qubits, one of which is the
designated port. Unit A couples the port to the control block psi, unit B
couples it to the target block phi; each coupling is an aux-mediated
effective CNOT with the port as control. The port is then measured in the
rotated basis and all of psi is read out by a qubit-basis parity
measurement, teleporting psi's logical content into the resource remainder
with the CNOT applied to phi. Pauli frames from the measurement outcomes
are tracked classically at zero cost. Failed stage-2 gates destroy the port
and with it any coupling made so far, so the unit sequence restarts.

For unencoded qubits (n = 1) a single direct effective CNOT is performed
and any failure is a logical loss.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .encoding import (GrowthHooks, LogicalBlock, LogicalLoss, QubitPool,
                       recover_after_failure, reencode)
from .gates import INTER_NODE, INTRA_NODE, GateParams, bell_generation_time

LOCAL = "local"
NETWORK = "network"


@dataclass(frozen=True)
class NetworkTopology:
    """Two nodes, each with a data cavity and a resource cavity, linked by
    intra-node channels between cavities and an inter-node fiber."""
    nodes: tuple[str, ...] = ("n1", "n2")

    def __post_init__(self):
        if len(self.nodes) != 2:
            raise ValueError("topology supports exactly two nodes")

    def data_cavity(self, node: str) -> str:
        return f"{node}.data"

    def resource_cavity(self, node: str) -> str:
        return f"{node}.res"

    def cavities(self) -> list[str]:
        out = []
        for node in self.nodes:
            out.extend((self.data_cavity(node), self.resource_cavity(node)))
        return out

    def link_kind(self, cav_a: str, cav_b: str) -> str:
        if cav_a == cav_b:
            return "same"
        if cav_a.split(".")[0] == cav_b.split(".")[0]:
            return INTRA_NODE
        return INTER_NODE


@dataclass(frozen=True)
class ProtocolConfig:
    n: int
    mode: str = LOCAL
    gate_params: GateParams = field(default_factory=GateParams)
    pool_size: Optional[int] = None          # free qubits per cavity, default 4n
    resource_prep: str = "pipelined"         # pipelined | serial
    same_node_gate_mode: str = "teleported"  # teleported | direct
    decoherence_model: str = "exponential"   # exponential | linear

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("encoding level n must be >= 1")
        if self.mode not in (LOCAL, NETWORK):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.resource_prep not in ("pipelined", "serial"):
            raise ValueError(f"unknown resource_prep {self.resource_prep!r}")
        if self.same_node_gate_mode not in ("teleported", "direct"):
            raise ValueError(f"unknown same_node_gate_mode {self.same_node_gate_mode!r}")
        if self.decoherence_model not in ("exponential", "linear"):
            raise ValueError(f"unknown decoherence_model {self.decoherence_model!r}")
        if not 0.0 < self.gate_params.p_cz <= 1.0:
            raise ValueError("trials require p_cz in (0, 1]")
        if self.pool_size is not None and self.pool_size < self.n:
            raise ValueError("pool_size must be at least n")

    def effective_pool_size(self) -> int:
        return self.pool_size if self.pool_size is not None else max(4 * self.n, 8)


@dataclass
class TrialRecord:
    completed: bool = False
    logical_loss: bool = False
    elapsed: float = 0.0
    qubit_seconds: float = 0.0           # sum of per-qubit exposures
    per_qubit_exposure: Optional[dict[int, float]] = None
    cz_attempts: int = 0
    cz_successes: int = 0
    bell_pairs_consumed: int = 0
    bell_pairs_used: int = 0             # consumed by gates that succeeded
    reencode_time: float = 0.0
    events: Optional[list[tuple]] = None


class Trial(GrowthHooks):
    """Single trial execution context: clock, exposure accounting, pools,
    counters, and the optional event log (detail mode)."""

    def __init__(self, config: ProtocolConfig, rng: random.Random,
                 detail: bool = False):
        self.config = config
        self.params = config.gate_params
        self.rng = rng
        self.detail = detail or config.decoherence_model == "linear"
        self.clock = 0.0
        self.live_count = 0
        self.qubit_seconds = 0.0
        self.cz_attempts = 0
        self.cz_successes = 0
        self.bell_consumed = 0
        self.bell_used = 0
        self.reencode_time = 0.0
        self.pools: dict[str, QubitPool] = {}
        self.topology = NetworkTopology()
        self.events: Optional[list[tuple]] = [] if self.detail else None
        self._join_times: Optional[dict[int, float]] = {} if self.detail else None
        self._exposure: Optional[dict[int, float]] = {} if self.detail else None
        self._next_qubit = 0
        self.total_qubits = 0

    # -- qubit / pool plumbing -------------------------------------------
    def _new_ids(self, count: int) -> Optional[list[int]]:
        if not self.detail:
            self.total_qubits += count
            return None
        ids = list(range(self._next_qubit, self._next_qubit + count))
        self._next_qubit += count
        self.total_qubits += count
        return ids

    def add_pool(self, cavity: str, size: int) -> None:
        self.pools[cavity] = QubitPool(
            cavity=cavity, free_count=size,
            reset_time=self.params.reset_time,
            free_ids=self._new_ids(size))

    def new_block(self, level: int, cavity: str) -> LogicalBlock:
        block = LogicalBlock(level=level, cavity=cavity, birth_time=self.clock,
                             members=self._new_ids(level),
                             history=[] if self.detail else None)
        self.join(level, block.members or ())
        block.note(self.clock)
        return block

    # -- GrowthHooks interface (also the timeline_charge operation) ------
    def charge(self, duration: float) -> None:
        """Advance the trial clock; every live qubit accrues the duration."""
        if duration <= 0.0:
            return
        if self.events is not None:
            self.events.append(("charge", self.clock, duration, self.live_count))
        self.clock += duration
        self.qubit_seconds += duration * self.live_count

    def join(self, count: int, ids=()) -> None:
        self.live_count += count
        if self._join_times is not None:
            for q in ids:
                if q is not None:
                    self._join_times[q] = self.clock
                    self.events.append(("join", self.clock, q))

    def leave(self, count: int, ids=()) -> None:
        self.live_count -= count
        if self._join_times is not None:
            for q in ids:
                if q is not None and q in self._join_times:
                    tau = self.clock - self._join_times.pop(q)
                    self._exposure[q] = self._exposure.get(q, 0.0) + tau
                    self.events.append(("leave", self.clock, q))

    # -- gate attempts ----------------------------------------------------
    def cz_local(self) -> bool:
        self.charge(self.params.t_cz)
        self.cz_attempts += 1
        ok = self.rng.random() < self.params.p_cz
        if ok:
            self.cz_successes += 1
        if self.events is not None:
            self.events.append(("cz", self.clock, "local", int(ok)))
        return ok

    def cz_teleported(self, link: str) -> bool:
        t_bell = bell_generation_time(link, self.params, self.rng)
        self.charge(t_bell + 2 * self.params.t_cz)
        self.bell_consumed += 1
        self.cz_attempts += 2
        ok_a = self.rng.random() < self.params.p_cz
        ok_b = self.rng.random() < self.params.p_cz
        ok = ok_a and ok_b
        if ok:
            self.cz_successes += 2
            self.bell_used += 1
        if self.events is not None:
            self.events.append(("cz", self.clock, f"teleported.{link}", int(ok)))
        return ok

    # -- recovery ---------------------------------------------------------
    def recover(self, block: LogicalBlock) -> None:
        """Qubit-basis readout of the dephased member; level drops by one.
        Raises LogicalLoss from level 1."""
        outcome = 1 if self.rng.random() < 0.5 else 0
        qid = block.members.pop() if block.members else None
        self.leave(1, (qid,))
        self.pools[block.cavity].give(qid)
        self.charge(self.params.measure_time)
        if self.events is not None:
            self.events.append(("recover", self.clock, block.block_id, outcome))
        recover_after_failure(block, outcome)  # raises at level 1
        block.note(self.clock)

    def shrink_resource(self, block: LogicalBlock) -> None:
        """Like recover, but a resource block carries no logical content:
        level 0 just means it must be regrown."""
        self.rng.random()  # readout of the dephased port
        qid = block.members.pop() if block.members else None
        self.leave(1, (qid,))
        self.pools[block.cavity].give(qid)
        self.charge(self.params.measure_time)
        block.level -= 1
        block.note(self.clock)
        if self.events is not None:
            self.events.append(("recover", self.clock, block.block_id, "resource"))

    def release_block(self, block: LogicalBlock) -> None:
        """Measure the whole block out (free readout); members rejoin pool."""
        pool = self.pools[block.cavity]
        if block.members is not None:
            ids = tuple(block.members)
            self.leave(block.level, ids)
            for q in ids:
                pool.give(q)
            block.members.clear()
        else:
            self.leave(block.level)
            for _ in range(block.level):
                pool.give(None)
        block.level = 0
        block.note(self.clock)

    # -- the aux-mediated coupling unit ------------------------------------
    def aux_unit(self, resource: LogicalBlock, target: LogicalBlock,
                 stage2: str) -> bool:
        """One aux-mediated effective CNOT with the resource port as control
        and a designated qubit of ``target`` as (replaced) target.

        Stage 1 entangles the designated qubit q2 with a fresh aux (local
        effective CNOT); stage 2 couples the port to the aux. Stage-1
        failure costs the target block one level and restarts stage 1;
        stage-2 failure additionally destroys the port: returns False so the
        caller can re-couple everything. On success q2 is measured in the
        rotated basis (consumed) and the aux takes its place.

        ``stage2`` is "direct", or a link kind for a teleported gate.
        """
        pool_t = self.pools[target.cavity]
        while True:
            aux = pool_t.take()
            self.join(1, (aux,))
            if not self.cz_local():  # stage 1
                self.leave(1, (aux,))
                pool_t.give(aux)
                self.recover(target)  # may raise LogicalLoss
                continue
            if stage2 == "direct":
                ok2 = self.cz_local()
            else:
                ok2 = self.cz_teleported(stage2)
            if not ok2:
                self.leave(1, (aux,))
                pool_t.give(aux)
                self.recover(target)          # q2 measured out
                self.shrink_resource(resource)  # port lost
                return False
            # success: q2 rotated-measured and consumed, aux joins the block
            self.charge(self.params.measure_time)
            q2 = target.members.pop() if target.members else None
            self.leave(1, (q2,))
            pool_t.give(q2)
            if target.members is not None:
                target.members.append(aux)
            if self.events is not None:
                self.events.append(("transfer", self.clock, target.block_id))
            return True

    # -- resource maintenance ----------------------------------------------
    def regrow_resource(self, resource: LogicalBlock, target_level: int) -> None:
        out = reencode(resource, target_level, self.pools[resource.cavity],
                       self.params, self.rng, hooks=self, is_logical=False)
        self.cz_attempts += out.cz_attempts
        self.cz_successes += out.cz_successes
        resource.note(self.clock)

    def reencode_logical(self, block: LogicalBlock, target_level: int) -> None:
        t0 = self.clock
        out = reencode(block, target_level, self.pools[block.cavity],
                       self.params, self.rng, hooks=self, is_logical=True)
        self.cz_attempts += out.cz_attempts
        self.cz_successes += out.cz_successes
        self.reencode_time += self.clock - t0
        block.note(self.clock)

    # -- records ------------------------------------------------------------
    def finalize(self, completed: bool, loss: bool) -> TrialRecord:
        if self._join_times:
            for q, t in list(self._join_times.items()):
                self._exposure[q] = self._exposure.get(q, 0.0) + self.clock - t
            self._join_times.clear()
        rec = TrialRecord(
            completed=completed, logical_loss=loss, elapsed=self.clock,
            qubit_seconds=self.qubit_seconds,
            per_qubit_exposure=dict(self._exposure) if self._exposure is not None else None,
            cz_attempts=self.cz_attempts, cz_successes=self.cz_successes,
            bell_pairs_consumed=self.bell_consumed, bell_pairs_used=self.bell_used,
            reencode_time=self.reencode_time, events=self.events)
        return rec

    def conservation_ok(self) -> bool:
        free = sum(p.free_count for p in self.pools.values())
        return free + self.live_count == self.total_qubits


def _run_encoded(trial: Trial, psi: LogicalBlock, phi: LogicalBlock,
                 resource: LogicalBlock, stage2_psi: str, stage2_phi: str) -> TrialRecord:
    cfg = trial.config
    n = cfg.n
    try:
        coupled_psi = coupled_phi = False
        while not (coupled_psi and coupled_phi):
            if resource.level < 2:
                trial.regrow_resource(resource, n + 1)
            if not coupled_psi:
                coupled_psi = trial.aux_unit(resource, psi, stage2_psi)
            else:
                if trial.aux_unit(resource, phi, stage2_phi):
                    coupled_phi = True
                else:
                    coupled_psi = False  # port lost: psi coupling evaporated
        # port: rotated-basis measurement (free); the resource remainder is
        # now psi's new home. psi itself is read out by the final qubit-basis
        # parity measurement (free). Pauli frames are classical.
        port = resource.members.pop() if resource.members else None
        trial.leave(1, (port,))
        trial.pools[resource.cavity].give(port)
        resource.level -= 1
        trial.charge(trial.params.measure_time)
        if trial.events is not None:
            trial.events.append(("port_measure", trial.clock, resource.block_id))
            trial.events.append(("parity_measure", trial.clock, psi.block_id))
        trial.release_block(psi)
        trial.charge(trial.params.measure_time)
        psi_home = resource
        # final re-encoding of both logical blocks back to level n
        trial.reencode_logical(psi_home, n)
        trial.reencode_logical(phi, n)
        return trial.finalize(completed=True, loss=False)
    except LogicalLoss:
        for blk in (psi, phi, resource):
            if blk.level > 0:
                trial.release_block(blk)
        return trial.finalize(completed=False, loss=True)


def run_local_trial(config: ProtocolConfig, rng: random.Random,
                    detail: bool = False) -> TrialRecord:
    trial = Trial(config, rng, detail)
    n = config.n
    cavity = "cav0"
    trial.add_pool(cavity, config.effective_pool_size())
    psi = trial.new_block(n, cavity)
    phi = trial.new_block(n, cavity)
    if n == 1:
        ok = trial.cz_local()
        if ok:
            return trial.finalize(completed=True, loss=False)
        trial.release_block(psi)
        trial.release_block(phi)
        return trial.finalize(completed=False, loss=True)
    if config.resource_prep == "pipelined":
        resource = trial.new_block(n + 1, cavity)
    else:
        resource = trial.new_block(0, cavity)
        trial.regrow_resource(resource, n + 1)
    return _run_encoded(trial, psi, phi, resource, "direct", "direct")


def run_network_trial(config: ProtocolConfig, rng: random.Random,
                      detail: bool = False) -> TrialRecord:
    trial = Trial(config, rng, detail)
    topo = trial.topology
    n = config.n
    d1, r1 = topo.data_cavity("n1"), topo.resource_cavity("n1")
    d2, r2 = topo.data_cavity("n2"), topo.resource_cavity("n2")
    for cav in (d1, r1, d2, r2):
        trial.add_pool(cav, config.effective_pool_size())
    psi = trial.new_block(n, d1)
    phi = trial.new_block(n, d2)
    if n == 1:
        ok = trial.cz_teleported(INTER_NODE)
        if ok:
            return trial.finalize(completed=True, loss=False)
        trial.release_block(psi)
        trial.release_block(phi)
        return trial.finalize(completed=False, loss=True)
    if config.resource_prep == "pipelined":
        resource = trial.new_block(n + 1, r1)
    else:
        resource = trial.new_block(0, r1)
        trial.regrow_resource(resource, n + 1)
    stage2_psi = INTRA_NODE if config.same_node_gate_mode == "teleported" else "direct"
    return _run_encoded(trial, psi, phi, resource, stage2_psi, INTER_NODE)


def run_protocol(config: ProtocolConfig, rng: random.Random,
                 detail: bool = False) -> TrialRecord:
    if config.mode == LOCAL:
        return run_local_trial(config, rng, detail)
    return run_network_trial(config, rng, detail)


def aux_mediated_cnot(trial: Trial, control_block: LogicalBlock,
                      target_block: LogicalBlock, stage2: str = "direct") -> bool:
    """Public surface of the two-stage coupling unit (see Trial.aux_unit)."""
    return trial.aux_unit(control_block, target_block, stage2)


def timeline_charge(trial: Trial, duration: float) -> None:
    """Advance the trial clock by one event; every physical qubit currently
    holding logical information accrues the duration."""
    trial.charge(duration)
