"""State-vector oracle: gate identities, encoded-state construction,
measurement semantics."""
import math
import random

import numpy as np
import pytest

from heraldcnot import oracle as oc
from heraldcnot.oracle import (ATOL, BasisKind, PureState, apply_gate,
                               dephase, fidelity, logical_direct, make_ghz,
                               make_logical, measure, product_state, project)
from conftest import rand_ab

SQ2 = 1 / math.sqrt(2)


def test_h_involution_on_random_state(rng):
    amps = np.array([rng.gauss(0, 1) + 1j * rng.gauss(0, 1) for _ in range(8)])
    amps /= np.linalg.norm(amps)
    st = PureState(3, amps)
    for q in range(3):
        twice = apply_gate(apply_gate(st, "H", (q,)), "H", (q,))
        assert fidelity(st, twice) == pytest.approx(1.0, abs=ATOL)


def test_hczh_is_cnot_on_all_basis_states():
    for kets in ("00", "01", "10", "11"):
        st = product_state(kets)
        via = apply_gate(st, "H", (1,))
        via = apply_gate(via, "CZ", (0, 1))
        via = apply_gate(via, "H", (1,))
        assert fidelity(via, apply_gate(st, "CNOT", (0, 1))) == pytest.approx(1.0, abs=ATOL)


def test_u_psi_flips_zero():
    st = apply_gate(product_state("0"), "U_PSI", (0,), a=0, b=1)
    assert fidelity(st, product_state("1")) == pytest.approx(1.0, abs=ATOL)


def test_u_psi_requires_normalized_amplitudes():
    with pytest.raises(ValueError):
        apply_gate(product_state("0"), "U_PSI", (0,), a=1.0, b=1.0)


def test_gate_target_validation():
    st = product_state("00")
    with pytest.raises(ValueError):
        apply_gate(st, "CZ", (0, 0))
    with pytest.raises(ValueError):
        apply_gate(st, "X", (2,))
    with pytest.raises(ValueError):
        apply_gate(st, "CNOT", (0,))


def test_make_ghz_small_cases():
    assert fidelity(make_ghz(1), product_state("0")) == pytest.approx(1.0, abs=ATOL)
    bell = PureState(2, np.array([SQ2, 0, 0, SQ2], dtype=complex))
    assert fidelity(make_ghz(2), bell) == pytest.approx(1.0, abs=ATOL)


def test_make_ghz_3_rotated_amplitudes():
    g = make_ghz(3)
    ppp = product_state("+++")
    mmm = product_state("---")
    assert abs(np.vdot(ppp.amplitudes, g.amplitudes)) == pytest.approx(SQ2, abs=ATOL)
    assert abs(np.vdot(mmm.amplitudes, g.amplitudes)) == pytest.approx(SQ2, abs=ATOL)
    # every other rotated-basis amplitude vanishes
    for other in ("++-", "+-+", "-++", "+--", "-+-", "--+"):
        ov = np.vdot(product_state(other).amplitudes, g.amplitudes)
        assert abs(ov) < ATOL


def test_make_ghz_matches_brute_force_kron():
    for n in range(1, 9):
        plus = product_state("+" * n)
        minus = product_state("-" * n)
        ref = PureState(n, (plus.amplitudes + minus.amplitudes) / math.sqrt(2))
        assert fidelity(make_ghz(n), ref) == pytest.approx(1.0, abs=ATOL)


def test_make_ghz_range_checks():
    with pytest.raises(ValueError):
        make_ghz(0)
    with pytest.raises(ValueError):
        make_ghz(15)


def test_make_logical_reductions(rng):
    a, b = rand_ab(rng)
    st = make_logical(1, a, b)
    ref = PureState(1, np.array([a, b], dtype=complex))
    assert fidelity(st, ref) == pytest.approx(1.0, abs=ATOL)
    assert fidelity(make_logical(3, 1, 0), make_ghz(3)) == pytest.approx(1.0, abs=ATOL)


def test_make_logical_equal_superposition_overlap():
    st = make_logical(2, SQ2, SQ2)
    direct = logical_direct(2, SQ2, SQ2)
    assert fidelity(st, direct) == pytest.approx(1.0, abs=ATOL)


def test_make_logical_matches_direct_construction(rng):
    for n in range(1, 7):
        a, b = rand_ab(rng)
        assert fidelity(make_logical(n, a, b),
                        logical_direct(n, a, b)) == pytest.approx(1.0, abs=ATOL)


def test_normalization_preserved_by_operations(rng):
    st = make_logical(4, *rand_ab(rng))
    for gate, targets in (("H", (2,)), ("X", (0,)), ("Z", (3,)),
                          ("CZ", (1, 2)), ("CNOT", (3, 0))):
        st = apply_gate(st, gate, targets)
        assert abs(st.norm() - 1.0) < ATOL
    st = dephase(st, 1, random.Random(4))
    assert abs(st.norm() - 1.0) < ATOL


def test_measure_removes_qubit_and_renormalizes(rng):
    a, b = rand_ab(rng)
    psi = make_logical(3, a, b)
    rec, post = measure(psi, 0, BasisKind.QUBIT, random.Random(0))
    assert post.num_qubits == 2
    assert abs(post.norm() - 1.0) < ATOL
    expected = make_logical(2, a, b)
    if rec.outcome == 1:
        post = apply_gate(post, "X", (0,))
    assert fidelity(post, expected) == pytest.approx(1.0, abs=ATOL)


def test_measure_outcome_one_gives_flipped_logical(rng):
    a, b = rand_ab(rng)
    psi = make_logical(3, a, b)
    p, post = project(psi, 1, BasisKind.QUBIT, 1, remove=True)
    assert p == pytest.approx(0.5, abs=ATOL)
    flipped = logical_direct(2, b, a)
    assert fidelity(post, flipped) == pytest.approx(1.0, abs=ATOL)


def test_measure_last_qubit_returns_sentinel():
    rec, post = measure(product_state("1"), 0, BasisKind.QUBIT, random.Random(0))
    assert rec.outcome == 1
    assert post.num_qubits == 0
    assert len(post.amplitudes) == 1


def test_rotated_measurement_of_plus_is_deterministic():
    for _ in range(5):
        rec, _ = measure(product_state("+"), 0, BasisKind.ROTATED, random.Random(_))
        assert rec.outcome == 0


def test_dephase_preserves_basis_eigenstate():
    st = dephase(product_state("0"), 0, random.Random(1))
    assert fidelity(st, product_state("0")) == pytest.approx(1.0, abs=ATOL)


def test_dephase_collapses_bell_pair():
    bell = make_ghz(2)
    seen = set()
    for seed in range(40):
        post = dephase(bell, 0, random.Random(seed))
        f00 = fidelity(post, product_state("00"))
        f11 = fidelity(post, product_state("11"))
        assert max(f00, f11) == pytest.approx(1.0, abs=ATOL)
        seen.add(f00 > 0.5)
    assert seen == {True, False}  # both collapse branches occur


def test_dephase_then_recover_keeps_logical_content(rng):
    for n in range(2, 7):
        for _ in range(20):
            a, b = rand_ab(rng)
            psi = make_logical(n, a, b)
            q = rng.randrange(n)
            collapsed = dephase(psi, q, rng)
            for outcome in (0, 1):
                p, post = project(collapsed, q, BasisKind.QUBIT, outcome, remove=True)
                if p <= 1e-12:
                    continue
                assert p == pytest.approx(1.0, abs=ATOL)  # already projected
                if outcome == 1:
                    post = apply_gate(post, "X", (0,))
                assert fidelity(post, make_logical(n - 1, a, b)) == pytest.approx(1.0, abs=ATOL)


def test_ghz_symmetry_all_n():
    for n in range(1, 8):
        g = make_ghz(n)
        z_all = g
        x_all = g
        for q in range(n):
            z_all = apply_gate(z_all, "Z", (q,))
            x_all = apply_gate(x_all, "X", (q,))
        assert fidelity(z_all, g) == pytest.approx(1.0, abs=ATOL)
        ref = g if n % 2 == 0 else logical_direct(n, 0, 1)
        assert fidelity(x_all, ref) == pytest.approx(1.0, abs=ATOL)


def test_ghz_single_qubit_readout_shrinks_encoding():
    for n in range(2, 7):
        g = make_ghz(n)
        for outcome in (0, 1):
            p, post = project(g, n - 1, BasisKind.QUBIT, outcome, remove=True)
            assert p == pytest.approx(0.5, abs=ATOL)
            if outcome == 1:
                post = apply_gate(post, "X", (0,))
            assert fidelity(post, make_ghz(n - 1)) == pytest.approx(1.0, abs=ATOL)


def test_fidelity_basics():
    psi = make_logical(2, 0.6, 0.8)
    assert fidelity(psi, psi) == pytest.approx(1.0, abs=ATOL)
    assert fidelity(product_state("0"), product_state("1")) == pytest.approx(0.0, abs=ATOL)
    assert fidelity(product_state("0"), product_state("+")) == pytest.approx(0.5, abs=ATOL)
    with pytest.raises(ValueError):
        fidelity(product_state("0"), product_state("00"))


def test_fidelity_ignores_global_phase():
    psi = make_logical(3, 0.6, 0.8j)
    rotated = PureState(3, psi.amplitudes * np.exp(0.7j))
    assert fidelity(psi, rotated) == pytest.approx(1.0, abs=ATOL)
