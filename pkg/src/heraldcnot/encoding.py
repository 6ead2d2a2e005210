"""Bookkeeping for parity-encoded logical blocks.

A block is a set of physical qubits carrying one logical qubit at encoding
level n (the number of member qubits). Levels change by the fixed rules the
state-vector oracle certifies:

  * a heralded failure on a member qubit costs one level (measure the
    dephased qubit in the qubit basis; a bit-flip correction is needed for
    outcome 1),
  * fusing an n-block with an m-block yields n+m-1 on success and shrinks
    both by one on failure,
  * a block at level 1 hit by a failure is destroyed (logical loss).

Growth of fresh GHZ resources uses an incremental chain strategy: one CZ
creates a 2-block from two pool singles, every further CZ attaches one more
single. At p_cz = 1 a level-L resource therefore costs exactly L-1 gate
attempts. The strategy lives behind ``GrowthStrategy`` so alternatives can
be added.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Optional

from .gates import GateParams

GROWTH_ATTEMPT_CAP = 10 ** 6


class LogicalLoss(Exception):
    """A heralded failure hit a level-1 block: the logical state is gone."""


class GrowthCapExceeded(RuntimeError):
    """Growth did not finish within the configured attempt cap."""


class CorrectionFlag(enum.Enum):
    IDENTITY = "identity"
    BIT_FLIP = "bit_flip"  # sigma_x on one remaining member


_block_counter = itertools.count()


@dataclass
class LogicalBlock:
    level: int
    cavity: str = "cav0"
    block_id: int = field(default_factory=lambda: next(_block_counter))
    birth_time: float = 0.0
    members: Optional[list[int]] = None  # physical qubit ids (detail mode)
    history: Optional[list[tuple[float, int]]] = None

    def note(self, time: float) -> None:
        if self.history is not None:
            self.history.append((time, self.level))


@dataclass
class QubitPool:
    cavity: str = "cav0"
    free_count: int = 0
    reset_time: float = 0.0
    free_ids: Optional[list[int]] = None  # detail mode

    def take(self) -> Optional[int]:
        if self.free_count <= 0:
            raise RuntimeError(f"qubit pool {self.cavity!r} exhausted")
        self.free_count -= 1
        if self.free_ids is not None:
            return self.free_ids.pop()
        return None

    def give(self, qubit_id: Optional[int] = None) -> None:
        self.free_count += 1
        if self.free_ids is not None and qubit_id is not None:
            self.free_ids.append(qubit_id)


@dataclass
class GrowthOutcome:
    elapsed: float
    cz_attempts: int
    cz_successes: int
    achieved_level: int


@dataclass
class FusionResult:
    success: bool
    merged_level: int = 0
    level_a: int = 0
    level_b: int = 0
    a_destroyed: bool = False
    b_destroyed: bool = False


class GrowthHooks:
    """Callbacks for time charging and qubit custody during growth.

    ``join``/``leave`` fire when qubits move between the free pool and live
    duty (so decoherence exposure can be tracked by the caller). The default
    implementation only accumulates elapsed time.
    """

    def __init__(self) -> None:
        self.elapsed = 0.0

    def charge(self, duration: float) -> None:
        self.elapsed += duration

    def join(self, count: int, ids=()) -> None:
        pass

    def leave(self, count: int, ids=()) -> None:
        pass


def recover_after_failure(block: LogicalBlock, outcome: int) -> tuple[LogicalBlock, CorrectionFlag]:
    """Measure out the dephased member after a heralded failure.

    Outcome 0 needs no correction, outcome 1 a bit flip on one remaining
    member. Level 1 means the failure hit the last qubit: logical loss.
    """
    if block.level <= 0:
        raise ValueError("block already destroyed")
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    if block.level == 1:
        block.level = 0
        raise LogicalLoss(f"block {block.block_id} lost at level 1")
    block.level -= 1
    return block, CorrectionFlag.IDENTITY if outcome == 0 else CorrectionFlag.BIT_FLIP


def fuse(level_a: int, level_b: int, success: bool) -> FusionResult:
    """Level arithmetic of one fusion attempt (outcome supplied by caller).

    Success merges the blocks into one of level a+b-1 (the measured qubit is
    consumed). Failure shrinks both by one; level-0 results are destroyed.
    """
    if level_a < 1 or level_b < 1:
        raise ValueError("fusion requires both blocks at level >= 1")
    if success:
        return FusionResult(True, merged_level=level_a + level_b - 1)
    la, lb = level_a - 1, level_b - 1
    return FusionResult(False, level_a=la, level_b=lb,
                        a_destroyed=la == 0, b_destroyed=lb == 0)


class GrowthStrategy:
    """Incremental chain growth: create a 2-block, then attach one single
    per CZ. Each attempt costs t_cz; failures shrink the chain by one."""

    def grow(self, target_level: int, pool: QubitPool, params: GateParams,
             rng, hooks: GrowthHooks,
             chain: Optional[list] = None,
             attempt_cap: int = GROWTH_ATTEMPT_CAP) -> tuple[GrowthOutcome, list]:
        if target_level < 1:
            raise ValueError("target_level must be >= 1")
        p, t_cz = params.p_cz, params.t_cz
        elapsed = 0.0
        attempts = successes = 0
        if chain is None:
            chain = []
        if target_level == 1 and not chain:
            q = pool.take()
            chain.append(q)
            hooks.join(1, (q,))
        while len(chain) < target_level:
            if attempts >= attempt_cap:
                raise GrowthCapExceeded(
                    f"growth to level {target_level} exceeded {attempt_cap} attempts")
            if len(chain) <= 1:
                while len(chain) < 2:
                    q = pool.take()
                    chain.append(q)
                    hooks.join(1, (q,))
                hooks.charge(t_cz)
                elapsed += t_cz
                attempts += 1
                if rng.random() < p:
                    successes += 1
                else:
                    hooks.leave(len(chain), tuple(chain))
                    for q in chain:
                        pool.give(q)
                    chain.clear()
            else:
                q = pool.take()
                chain.append(q)
                hooks.join(1, (q,))
                hooks.charge(t_cz)
                elapsed += t_cz
                attempts += 1
                if rng.random() < p:
                    successes += 1
                else:
                    q1 = chain.pop()
                    q2 = chain.pop()
                    hooks.leave(2, (q1, q2))
                    pool.give(q1)
                    pool.give(q2)
        return GrowthOutcome(elapsed, attempts, successes, len(chain)), chain


DEFAULT_STRATEGY = GrowthStrategy()


def grow_ghz(target_level: int, pool: QubitPool, params: GateParams, rng,
             hooks: Optional[GrowthHooks] = None,
             strategy: GrowthStrategy = DEFAULT_STRATEGY,
             attempt_cap: int = GROWTH_ATTEMPT_CAP) -> GrowthOutcome:
    """Grow a fresh GHZ resource to ``target_level``; the grown qubits return
    to the pool before returning (standalone statistics use)."""
    hooks = hooks or GrowthHooks()
    outcome, chain = strategy.grow(target_level, pool, params, rng, hooks,
                                   attempt_cap=attempt_cap)
    hooks.leave(len(chain), tuple(chain))
    for q in chain:
        pool.give(q)
    return outcome


def grow_chain(target_level: int, pool: QubitPool, params: GateParams, rng,
               hooks: GrowthHooks, chain: Optional[list] = None,
               strategy: GrowthStrategy = DEFAULT_STRATEGY,
               attempt_cap: int = GROWTH_ATTEMPT_CAP) -> tuple[GrowthOutcome, list]:
    """Like grow_ghz but hands the grown chain (qubit ids) to the caller."""
    return strategy.grow(target_level, pool, params, rng, hooks, chain=chain,
                         attempt_cap=attempt_cap)


def reencode(block: LogicalBlock, target_level: int, pool: QubitPool,
             params: GateParams, rng,
             hooks: Optional[GrowthHooks] = None,
             strategy: GrowthStrategy = DEFAULT_STRATEGY,
             is_logical: bool = True,
             attempt_cap: int = GROWTH_ATTEMPT_CAP) -> GrowthOutcome:
    """Restore ``block`` to ``target_level``: grow a GHZ resource of size
    (target - level + 1), fuse it onto the block with one more CZ, and on
    fusion failure extend the shrunken resource and retry.

    Raises LogicalLoss when a fusion failure hits a logical block at level
    1. A destroyed non-logical (resource) block is regrown from scratch:
    the grown chain simply becomes the block.
    """
    hooks = hooks or GrowthHooks()
    if block.level >= target_level:
        return GrowthOutcome(0.0, 0, 0, block.level)
    p, t_cz = params.p_cz, params.t_cz
    elapsed = 0.0
    attempts = successes = 0
    chain: list = []
    try:
        while block.level < target_level:
            if attempts >= attempt_cap:
                raise GrowthCapExceeded(
                    f"re-encode to level {target_level} exceeded {attempt_cap} attempts")
            if block.level == 0:
                out, chain = strategy.grow(target_level, pool, params, rng, hooks,
                                           chain=chain, attempt_cap=attempt_cap - attempts)
                elapsed += out.elapsed
                attempts += out.cz_attempts
                successes += out.cz_successes
                block.level = len(chain)
                if block.members is not None:
                    block.members.extend(q for q in chain if q is not None)
                chain = []
                break
            need = target_level - block.level + 1
            out, chain = strategy.grow(need, pool, params, rng, hooks,
                                       chain=chain, attempt_cap=attempt_cap - attempts)
            elapsed += out.elapsed
            attempts += out.cz_attempts
            successes += out.cz_successes
            # fusion: CZ between the chain's coupling qubit and a block member
            hooks.charge(t_cz)
            elapsed += t_cz
            attempts += 1
            if rng.random() < p:
                successes += 1
                q = chain.pop()  # measured in the rotated basis, recycled
                hooks.leave(1, (q,))
                pool.give(q)
                block.level += len(chain)  # survivors join the block, stay live
                if block.members is not None:
                    block.members.extend(x for x in chain if x is not None)
                chain = []
            else:
                q = chain.pop()
                hooks.leave(1, (q,))
                pool.give(q)
                block.level -= 1
                qid = block.members.pop() if block.members else None
                hooks.leave(1, (qid,))
                pool.give(qid)
                if block.level == 0 and is_logical:
                    raise LogicalLoss(
                        f"block {block.block_id} lost during re-encode")
    finally:
        if chain:
            hooks.leave(len(chain), tuple(chain))
            for q in chain:
                pool.give(q)
    return GrowthOutcome(elapsed, attempts, successes, block.level)
