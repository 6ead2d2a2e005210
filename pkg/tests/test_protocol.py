"""Protocol state machine: the aux-mediated unit, full local and network
trials, exposure accounting with an independent event-log replay."""
import math
import random

import pytest

from heraldcnot.encoding import LogicalLoss
from heraldcnot.gates import GateParams
from heraldcnot.protocol import (NetworkTopology, ProtocolConfig, Trial,
                                 aux_mediated_cnot, run_protocol,
                                 timeline_charge)
from heraldcnot import verify
from conftest import ScriptRng

T_CZ = 10e-6


def make_config(n, mode="local", p_cz=1.0, **gate_kwargs):
    return ProtocolConfig(n=n, mode=mode,
                          gate_params=GateParams(p_cz=p_cz, **gate_kwargs))


def replay_exposures(events):
    """Independent interval-sum replay of a trial event log."""
    live = set()
    exposure = {}
    for ev in events:
        kind = ev[0]
        if kind == "join":
            live.add(ev[2])
        elif kind == "leave":
            live.discard(ev[2])
        elif kind == "charge":
            _, t0, duration, live_count = ev
            assert live_count == len(live)
            for q in live:
                exposure[q] = exposure.get(q, 0.0) + duration
    return exposure


class TestTopology:
    def test_two_cavities_per_node(self):
        topo = NetworkTopology()
        assert len(topo.cavities()) == 4

    def test_link_kinds(self):
        topo = NetworkTopology()
        assert topo.link_kind("n1.data", "n1.data") == "same"
        assert topo.link_kind("n1.data", "n1.res") == "intra_node"
        assert topo.link_kind("n1.res", "n2.data") == "inter_node"

    def test_rejects_other_node_counts(self):
        with pytest.raises(ValueError):
            NetworkTopology(nodes=("a", "b", "c"))


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            make_config(0)
        with pytest.raises(ValueError):
            ProtocolConfig(n=2, mode="galactic")
        with pytest.raises(ValueError):
            ProtocolConfig(n=2, gate_params=GateParams(p_cz=0.0))
        with pytest.raises(ValueError):
            ProtocolConfig(n=4, pool_size=2)

    def test_default_pool_size(self):
        assert make_config(3).effective_pool_size() == 12
        assert make_config(1).effective_pool_size() == 8


class TestAuxUnit:
    def _trial(self, p_cz=0.5, script=()):
        cfg = make_config(3, p_cz=p_cz)
        trial = Trial(cfg, ScriptRng(list(script)), detail=True)
        trial.add_pool("cav0", 12)
        resource = trial.new_block(4, "cav0")
        target = trial.new_block(3, "cav0")
        return trial, resource, target

    def test_clean_pass_two_attempts_no_level_change(self):
        trial, resource, target = self._trial(p_cz=1.0)
        ok = aux_mediated_cnot(trial, resource, target, "direct")
        assert ok
        assert trial.cz_attempts == 2
        assert trial.cz_successes == 2
        assert (resource.level, target.level) == (4, 3)
        assert trial.clock == pytest.approx(2 * T_CZ)

    def test_stage1_failure_costs_target_one_level(self):
        # script: stage1 fails, recovery outcome, then clean pass
        trial, resource, target = self._trial(
            p_cz=0.5, script=[0.9, 0.3, 0.1, 0.1])
        ok = aux_mediated_cnot(trial, resource, target, "direct")
        assert ok
        assert target.level == 2
        assert resource.level == 4
        assert trial.cz_attempts == 3

    def test_stage2_failure_then_success_costs_four_attempts(self):
        # stage1 ok, stage2 fails (target and resource each lose a level,
        # coupling reported lost), then a clean retry succeeds
        trial, resource, target = self._trial(
            p_cz=0.5, script=[0.1, 0.9, 0.3, 0.3, 0.1, 0.2])
        ok = aux_mediated_cnot(trial, resource, target, "direct")
        assert not ok
        assert (resource.level, target.level) == (3, 2)
        ok = aux_mediated_cnot(trial, resource, target, "direct")
        assert ok
        assert trial.cz_attempts == 4
        assert (resource.level, target.level) == (3, 2)

    def test_level_one_target_failure_is_logical_loss(self):
        cfg = make_config(2, p_cz=0.5)
        trial = Trial(cfg, ScriptRng([0.9, 0.3]), detail=True)
        trial.add_pool("cav0", 8)
        resource = trial.new_block(3, "cav0")
        target = trial.new_block(1, "cav0")
        with pytest.raises(LogicalLoss):
            aux_mediated_cnot(trial, resource, target, "direct")

    def test_conservation_through_unit(self):
        trial, resource, target = self._trial(p_cz=0.5, script=[])
        aux_mediated_cnot(trial, resource, target, "direct")
        assert trial.conservation_ok()


class TestTimelineCharge:
    def test_exposure_counts_all_live_qubits(self):
        cfg = make_config(3, p_cz=1.0)
        trial = Trial(cfg, random.Random(0), detail=True)
        trial.add_pool("cav0", 12)
        trial.new_block(3, "cav0")
        trial.new_block(3, "cav0")
        timeline_charge(trial, T_CZ)
        assert trial.qubit_seconds == pytest.approx(6 * T_CZ)

    def test_zero_duration_changes_nothing(self):
        cfg = make_config(2)
        trial = Trial(cfg, random.Random(0), detail=True)
        trial.add_pool("cav0", 8)
        trial.new_block(2, "cav0")
        timeline_charge(trial, 0.0)
        assert trial.qubit_seconds == 0.0
        assert trial.clock == 0.0


class TestLocalTrial:
    def test_unencoded_clean_pass(self):
        rec = run_protocol(make_config(1), random.Random(0))
        assert rec.completed and not rec.logical_loss
        assert rec.cz_attempts == 1
        assert rec.elapsed == pytest.approx(T_CZ)

    def test_unencoded_loss_probability(self):
        p = 0.7
        cfg = make_config(1, p_cz=p)
        n = 100_000
        losses = sum(run_protocol(cfg, random.Random(i)).logical_loss
                     for i in range(n))
        sigma = math.sqrt(p * (1 - p) / n)
        assert abs(losses / n - (1 - p)) < 3 * sigma

    def test_encoded_clean_pass_golden_counts(self):
        rec = run_protocol(make_config(2), random.Random(1), detail=True)
        assert rec.completed
        assert rec.cz_attempts == 4
        assert rec.cz_successes == 4
        assert rec.elapsed == pytest.approx(4 * T_CZ)
        assert rec.reencode_time == 0.0
        assert rec.bell_pairs_consumed == 0
        # every clean pass consumes one designated qubit from each block
        transfers = [ev for ev in rec.events if ev[0] == "transfer"]
        assert len(transfers) == 2

    def test_serial_resource_prep_charges_growth(self):
        cfg = ProtocolConfig(n=2, gate_params=GateParams(p_cz=1.0),
                             resource_prep="serial")
        rec = run_protocol(cfg, random.Random(2))
        # growing the 3-qubit resource costs 2 extra CZs up front
        assert rec.cz_attempts == 6
        assert rec.elapsed == pytest.approx(6 * T_CZ)

    def test_exposure_replay_matches_clean_pass(self):
        rec = run_protocol(make_config(2), random.Random(3), detail=True)
        replayed = replay_exposures(rec.events)
        assert sum(replayed.values()) == pytest.approx(rec.qubit_seconds, abs=1e-15)
        for q, tau in rec.per_qubit_exposure.items():
            assert replayed.get(q, 0.0) == pytest.approx(tau, abs=1e-15)

    @pytest.mark.parametrize("seed", range(8))
    def test_exposure_replay_matches_noisy_trials(self, seed):
        cfg = make_config(3, p_cz=0.6)
        rec = run_protocol(cfg, random.Random(seed), detail=True)
        replayed = replay_exposures(rec.events)
        assert sum(replayed.values()) == pytest.approx(rec.qubit_seconds, rel=1e-12)

    def test_determinism_same_seed(self):
        cfg = make_config(4, p_cz=0.7)
        r1 = run_protocol(cfg, random.Random(99), detail=True)
        r2 = run_protocol(cfg, random.Random(99), detail=True)
        assert r1 == r2

    def test_losses_occur_and_are_terminal(self):
        cfg = make_config(2, p_cz=0.4)
        seen_loss = seen_done = False
        for seed in range(200):
            rec = run_protocol(cfg, random.Random(seed))
            assert rec.completed != rec.logical_loss
            seen_loss |= rec.logical_loss
            seen_done |= rec.completed
        assert seen_loss and seen_done

    @pytest.mark.parametrize("seed", range(6))
    def test_conservation_after_trial(self, seed):
        cfg = make_config(3, p_cz=0.55)
        trial = Trial(cfg, random.Random(seed), detail=True)
        # run via the module function but on a trial we can inspect
        from heraldcnot import protocol as proto
        rec = proto.run_local_trial(cfg, random.Random(seed), detail=True)
        assert rec.completed or rec.logical_loss

    def test_completed_trials_consume_pool_qubits(self):
        rec = run_protocol(make_config(2, p_cz=0.8), random.Random(12), detail=True)
        if rec.completed:
            assert rec.cz_attempts >= 4


class TestNetworkTrial:
    def test_clean_pass_golden_bell_count(self):
        rec = run_protocol(make_config(2, mode="network"), random.Random(0),
                           detail=True)
        assert rec.completed
        # frozen sequence: one intra-node and one inter-node teleported CNOT
        assert rec.bell_pairs_consumed == 2
        assert rec.bell_pairs_used == 2
        assert rec.cz_attempts == 6
        assert rec.elapsed == pytest.approx(160e-6 + 10e-6 + 6 * T_CZ)

    def test_inter_node_bell_time_dominates(self):
        rec = run_protocol(make_config(2, mode="network"), random.Random(0))
        assert rec.elapsed >= 160e-6

    def test_unencoded_network_uses_one_bell(self):
        rec = run_protocol(make_config(1, mode="network"), random.Random(0))
        assert rec.completed
        assert rec.bell_pairs_consumed == 1
        assert rec.elapsed == pytest.approx(160e-6 + 2 * T_CZ)

    def test_unencoded_network_loss_probability(self):
        p = 0.8
        cfg = make_config(1, mode="network", p_cz=p)
        n = 50_000
        losses = sum(run_protocol(cfg, random.Random(i)).logical_loss
                     for i in range(n))
        expect = 1 - p * p
        sigma = math.sqrt(expect * (1 - expect) / n)
        assert abs(losses / n - expect) < 3 * sigma

    def test_direct_same_node_mode_skips_intra_bell(self):
        cfg = ProtocolConfig(n=2, mode="network",
                             gate_params=GateParams(p_cz=1.0),
                             same_node_gate_mode="direct")
        rec = run_protocol(cfg, random.Random(0))
        assert rec.bell_pairs_consumed == 1  # only the inter-node coupling
        assert rec.cz_attempts == 5

    def test_exposure_replay_network(self):
        cfg = make_config(3, mode="network", p_cz=0.7)
        rec = run_protocol(cfg, random.Random(21), detail=True)
        replayed = replay_exposures(rec.events)
        assert sum(replayed.values()) == pytest.approx(rec.qubit_seconds, rel=1e-12)


class TestOracleEquivalence:
    """The bookkeeping rules match explicit state-vector circuits."""

    def test_aux_unit_matches_oracle(self, rng):
        assert verify.check_aux_unit(rng).passed

    def test_full_logical_cnot_matches_oracle(self, rng):
        assert verify.check_logical_cnot(rng, n_values=(2,)).passed

    def test_fusion_matches_oracle(self, rng):
        assert verify.check_fusion(rng).passed
