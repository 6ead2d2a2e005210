"""Stochastic gate primitives: distributions, durations, error ledger."""
import math
import random

import pytest

from heraldcnot.gates import (INTER_NODE, INTRA_NODE, GateParams, QubitRef,
                              effective_cnot, exposure_factor, generate_bell,
                              heralded_factor, sample_cz, teleported_cnot)


def test_params_validation():
    with pytest.raises(ValueError):
        GateParams(p_cz=1.5)
    with pytest.raises(ValueError):
        GateParams(t_cz=-1.0)
    with pytest.raises(ValueError):
        GateParams(bell_time_model="sometimes")


def test_sample_cz_deterministic_limits():
    rng = random.Random(0)
    assert all(sample_cz(GateParams(p_cz=1.0), rng).success for _ in range(200))
    assert not any(sample_cz(GateParams(p_cz=0.0), rng).success for _ in range(200))


def test_sample_cz_duration_outcome_independent():
    params = GateParams(p_cz=0.5)
    rng = random.Random(1)
    durations = {sample_cz(params, rng).duration for _ in range(100)}
    assert durations == {params.t_cz}


def test_sample_cz_success_fraction():
    p = 0.7
    params = GateParams(p_cz=p)
    rng = random.Random(2)
    n = 100_000
    wins = sum(sample_cz(params, rng).success for _ in range(n))
    sigma = math.sqrt(p * (1 - p) / n)
    assert abs(wins / n - p) < 3 * sigma


def test_sample_cz_error_factor_only_on_success():
    params = GateParams(p_cz=0.5, eps_cz=1e-3)
    rng = random.Random(3)
    for _ in range(100):
        out = sample_cz(params, rng)
        expected = 1.0 - params.eps_cz if out.success else 1.0
        assert out.heralded_error_factor == expected


def test_effective_cnot_is_local_only():
    params = GateParams(p_cz=1.0)
    rng = random.Random(0)
    out = effective_cnot(QubitRef("cav0", 0), QubitRef("cav0", 1), params, rng)
    assert out.success
    assert out.duration == params.t_cz
    with pytest.raises(ValueError):
        effective_cnot(QubitRef("cav0", 0), QubitRef("cav1", 1), params, rng)


def test_generate_bell_fixed_times():
    params = GateParams()
    rng = random.Random(0)
    assert generate_bell(INTER_NODE, params, rng).generation_time == pytest.approx(160e-6)
    assert generate_bell(INTRA_NODE, params, rng).generation_time == pytest.approx(10e-6)
    with pytest.raises(ValueError):
        generate_bell("carrier_pigeon", params, rng)


def test_generate_bell_geometric_mode_preserves_mean():
    params = GateParams(bell_time_model="geometric", bell_gen_success=0.5)
    rng = random.Random(7)
    n = 200_000
    mean = sum(generate_bell(INTRA_NODE, params, rng).generation_time
               for _ in range(n)) / n
    # geometric attempts with mean 1/q at q*t_bell per attempt: mean t_bell
    assert mean == pytest.approx(10e-6, rel=0.02)


def test_teleported_cnot_success_is_product_of_two_cz():
    p = 0.8
    params = GateParams(p_cz=p)
    rng = random.Random(5)
    n = 100_000
    wins = 0
    for _ in range(n):
        out = teleported_cnot(QubitRef("n1.data", 0), QubitRef("n2.data", 0),
                              params, rng)
        assert out.success == (out.cz_control_ok and out.cz_target_ok)
        wins += out.success
    sigma = math.sqrt(p * p * (1 - p * p) / n)
    assert abs(wins / n - p * p) < 3 * sigma


def test_teleported_cnot_duration_and_failure_side():
    params = GateParams(p_cz=0.3)
    rng = random.Random(6)
    for _ in range(200):
        out = teleported_cnot(QubitRef("a", 0), QubitRef("b", 0), params, rng,
                              link=INTER_NODE)
        assert out.duration == pytest.approx(160e-6 + 2 * params.t_cz)
        if out.success:
            assert out.failed_side is None
        else:
            assert out.failed_side in ("control", "target")
            if out.failed_side == "control":
                assert not out.cz_control_ok


def test_teleported_cnot_deterministic_at_unit_probability():
    params = GateParams(p_cz=1.0)
    out = teleported_cnot(QubitRef("a", 0), QubitRef("b", 0), params,
                          random.Random(0), link=INTRA_NODE)
    assert out.success
    assert out.duration == pytest.approx(10e-6 + 2 * params.t_cz)


def test_heralded_ledger_bounds_and_composition():
    params = GateParams(eps_cz=1e-4, eps_bell=2e-4)
    f = heralded_factor(10, 3, params)
    assert 0.0 < f <= 1.0
    assert f == pytest.approx((1 - 1e-4) ** 10 * (1 - 2e-4) ** 3)
    # eps_bell = 0: ledger reduces to the CZ factor alone
    params0 = GateParams(eps_cz=1e-4, eps_bell=0.0)
    assert heralded_factor(7, 5, params0) == pytest.approx((1 - 1e-4) ** 7)


def test_exposure_factor_limits():
    assert exposure_factor(0.123, math.inf) == 1.0
    assert exposure_factor(0.0, 1.0) == 1.0
    assert exposure_factor(2.0, 1.0) == pytest.approx(math.exp(-2.0))
