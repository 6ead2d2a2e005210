"""Trial ensemble execution, the total-error model, and deterministic
aggregation.

Per-trial error: p_phys = 1 - (heralded factor) * (exposure factor), where
the heralded factor multiplies (1 - eps) over successful CZs and consumed
Bell pairs of successful teleported gates, and the exposure factor is
prod_q exp(-tau_q / T_coh) over per-qubit live times (a linearized model is
available behind ``decoherence_model=linear``).

Total error over an ensemble: p_e = P(loss) + (1 - P(loss)) * E[p_phys |
completed], which equals the mean of the per-trial indicator-valued error
(1 for lost trials, p_phys otherwise).

Seeding is counter based: trial i of an ensemble uses a SplitMix-style
64-bit mix of (master_seed, i), so results are independent of worker count
and execution order. Partial sums are merged in fixed chunk order, making
aggregates bit-identical for any worker count.
"""
from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .protocol import ProtocolConfig, TrialRecord, run_protocol

_MASK = (1 << 64) - 1
_CHUNK = 2048  # fixed chunking keeps float merge order worker-independent


def mix_seed(master_seed: int, index: int) -> int:
    """SplitMix64 finalizer over (master_seed XOR index * odd constant)."""
    z = (master_seed ^ (index * 0x9E3779B97F4A7C15)) & _MASK
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return (z ^ (z >> 31)) & _MASK


@dataclass
class ErrorLedger:
    heralded_factor: float
    exposure_factor: float

    @property
    def p_phys(self) -> float:
        p = 1.0 - self.heralded_factor * self.exposure_factor
        return min(max(p, 0.0), 1.0 - 1e-300)


@dataclass
class Aggregate:
    trials: int
    loss_fraction: float
    mean_p_phys: float  # over completed trials
    p_e: float
    ci95: float
    mean_elapsed: float


def ledger_from_record(record: TrialRecord, config: ProtocolConfig) -> ErrorLedger:
    gp = config.gate_params
    heralded = ((1.0 - gp.eps_cz) ** record.cz_successes
                * (1.0 - gp.eps_bell) ** record.bell_pairs_used)
    if config.decoherence_model == "linear":
        exposure = 1.0
        for tau in (record.per_qubit_exposure or {}).values():
            exposure *= max(0.0, 1.0 - tau / gp.t_coh) if gp.t_coh != math.inf else 1.0
    else:
        exposure = 1.0 if gp.t_coh == math.inf else math.exp(-record.qubit_seconds / gp.t_coh)
    return ErrorLedger(heralded, exposure)


def run_trial(config: ProtocolConfig, seed: int,
              detail: bool = False) -> tuple[TrialRecord, ErrorLedger]:
    """One trial: a deterministic function of (config, seed)."""
    rng = random.Random(seed & _MASK)
    record = run_protocol(config, rng, detail=detail)
    return record, ledger_from_record(record, config)


def _run_chunk(config: ProtocolConfig, master_seed: int, start: int,
               count: int) -> tuple[float, float, int, float, int, float]:
    sum_e = sum_e2 = 0.0
    n_loss = 0
    sum_pphys = 0.0
    n_completed = 0
    sum_elapsed = 0.0
    for i in range(start, start + count):
        record, ledger = run_trial(config, mix_seed(master_seed, i))
        if record.logical_loss:
            e = 1.0
            n_loss += 1
        else:
            e = ledger.p_phys
            sum_pphys += e
            n_completed += 1
        sum_e += e
        sum_e2 += e * e
        sum_elapsed += record.elapsed
    return sum_e, sum_e2, n_loss, sum_pphys, n_completed, sum_elapsed


def run_ensemble(config: ProtocolConfig, n_trials: int, master_seed: int,
                 workers: int = 1) -> Aggregate:
    """Aggregate ``n_trials`` independent trials; bit-identical for any
    worker count."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    chunks = [(start, min(_CHUNK, n_trials - start))
              for start in range(0, n_trials, _CHUNK)]
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(
                _chunk_worker,
                [(config, master_seed, s, c) for (s, c) in chunks],
                chunksize=max(1, len(chunks) // (4 * workers) or 1)))
    else:
        partials = [_run_chunk(config, master_seed, s, c) for (s, c) in chunks]
    sum_e = sum_e2 = sum_pphys = sum_elapsed = 0.0
    n_loss = n_completed = 0
    for (e, e2, nl, pp, nc, el) in partials:
        sum_e += e
        sum_e2 += e2
        n_loss += nl
        sum_pphys += pp
        n_completed += nc
        sum_elapsed += el
    n = n_trials
    p_e = sum_e / n
    var = max(0.0, (sum_e2 - n * p_e * p_e) / (n - 1)) if n > 1 else 0.0
    ci95 = 1.96 * math.sqrt(var / n)
    return Aggregate(
        trials=n,
        loss_fraction=n_loss / n,
        mean_p_phys=(sum_pphys / n_completed) if n_completed else 0.0,
        p_e=p_e,
        ci95=ci95,
        mean_elapsed=sum_elapsed / n)


def _chunk_worker(args) -> tuple[float, float, int, float, int, float]:
    return _run_chunk(*args)


def total_error(agg: Aggregate) -> float:
    """loss_fraction + (1 - loss_fraction) * mean physical error of the
    completed trials."""
    return agg.loss_fraction + (1.0 - agg.loss_fraction) * agg.mean_p_phys
