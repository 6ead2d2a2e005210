"""Oracle identity suite: certifies every bookkeeping rule of the simulator
against explicit state vectors, enumerating all measurement branches.

Each check returns the maximum fidelity deviation over its branches; the
suite passes when every deviation is at most 1e-10. ``sabotage`` injects a
wrong recovery correction so the negative control demonstrably fails.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from . import oracle as oc
from .oracle import (BasisKind, PureState, apply_gate, fidelity, make_ghz,
                     make_logical, logical_direct, product_state, project)

TOL = 1e-10


@dataclass
class IdentityResult:
    name: str
    max_deviation: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= TOL


def _rand_ab(rng: random.Random) -> tuple[complex, complex]:
    th = rng.uniform(0.0, math.pi)
    ph = rng.uniform(0.0, 2.0 * math.pi)
    return complex(math.cos(th / 2)), math.sin(th / 2) * complex(math.cos(ph), math.sin(ph))


def _kron(*states: PureState) -> PureState:
    """Join registers; the first argument occupies the lowest qubit indices."""
    amps = np.array([1.0 + 0j])
    n = 0
    for st in states:
        amps = np.kron(st.amplitudes, amps)
        n += st.num_qubits
    return PureState(n, amps)


def _branches(state: PureState, qubit: int, basis: BasisKind, remove: bool = True):
    for outcome in (0, 1):
        p, post = project(state, qubit, basis, outcome, remove=remove)
        if p > 1e-12:
            yield outcome, p, post


# ---------------------------------------------------------------------------
def check_h_involution(rng: random.Random) -> IdentityResult:
    dev = 0.0
    for n in (1, 3):
        amps = np.array([rng.gauss(0, 1) + 1j * rng.gauss(0, 1) for _ in range(1 << n)])
        amps /= np.linalg.norm(amps)
        st = PureState(n, amps)
        for q in range(n):
            twice = apply_gate(apply_gate(st, "H", (q,)), "H", (q,))
            dev = max(dev, abs(1 - fidelity(st, twice)))
    return IdentityResult("hadamard_involution", dev)


def check_hczh_equals_cnot(rng: random.Random) -> IdentityResult:
    dev = 0.0
    for kets in ("00", "01", "10", "11"):
        st = product_state(kets)
        via_cz = apply_gate(st, "H", (1,))
        via_cz = apply_gate(via_cz, "CZ", (0, 1))
        via_cz = apply_gate(via_cz, "H", (1,))
        direct = apply_gate(st, "CNOT", (0, 1))
        dev = max(dev, abs(1 - fidelity(via_cz, direct)))
    return IdentityResult("h_cz_h_equals_cnot", dev)


def check_ghz_definition(rng: random.Random) -> IdentityResult:
    dev = 0.0
    for n in range(1, 9):
        plus = product_state("+" * n)
        minus = product_state("-" * n)
        ref = PureState(n, (plus.amplitudes + minus.amplitudes) / math.sqrt(2.0))
        dev = max(dev, abs(1 - fidelity(make_ghz(n), ref)))
    return IdentityResult("ghz_definition", dev)


def check_ghz_symmetry(rng: random.Random) -> IdentityResult:
    """Z on every qubit fixes the encoded zero for all n; X on every qubit
    fixes it for even n and maps it to the encoded one for odd n."""
    dev = 0.0
    for n in range(1, 8):
        g = make_ghz(n)
        z_all = g
        x_all = g
        for q in range(n):
            z_all = apply_gate(z_all, "Z", (q,))
            x_all = apply_gate(x_all, "X", (q,))
        dev = max(dev, abs(1 - fidelity(z_all, g)))
        ref = g if n % 2 == 0 else logical_direct(n, 0, 1)
        dev = max(dev, abs(1 - fidelity(x_all, ref)))
    return IdentityResult("ghz_symmetry", dev)


def check_ghz_qubit_measurement(rng: random.Random) -> IdentityResult:
    """Qubit-basis readout of one GHZ qubit: outcomes are equiprobable, the
    remainder is the one-level-smaller encoded zero up to the heralded bit
    flip."""
    dev = 0.0
    for n in range(2, 7):
        g = make_ghz(n)
        for q in (0, n - 1):
            for outcome, p, post in _branches(g, q, BasisKind.QUBIT):
                dev = max(dev, abs(p - 0.5))
                if outcome == 1:
                    post = apply_gate(post, "X", (0,))
                dev = max(dev, abs(1 - fidelity(post, make_ghz(n - 1))))
    return IdentityResult("ghz_qubit_measurement", dev)


def check_logical_construction(rng: random.Random) -> IdentityResult:
    dev = 0.0
    for n in range(1, 7):
        for _ in range(4):
            a, b = _rand_ab(rng)
            dev = max(dev, abs(1 - fidelity(make_logical(n, a, b),
                                            logical_direct(n, a, b))))
    # plain amplitude checks
    st = make_logical(2, 1 / math.sqrt(2), 1 / math.sqrt(2))
    bell_mix = PureState(2, (make_ghz(2).amplitudes
                             + logical_direct(2, 0, 1).amplitudes) / math.sqrt(2))
    dev = max(dev, abs(1 - fidelity(st, bell_mix)))
    return IdentityResult("logical_construction", dev)


def check_recovery(rng: random.Random, sabotage: bool = False,
                   samples: int = 20) -> IdentityResult:
    """Dephase one qubit of an encoded block, measure it in the qubit basis
    and apply the outcome correction: the block drops exactly one level."""
    dev = 0.0
    for n in range(2, 7):
        for k in range(samples):
            a, b = _rand_ab(rng)
            psi = make_logical(n, a, b)
            q = k % n
            for outcome, p, post in _branches(psi, q, BasisKind.QUBIT):
                dev = max(dev, abs(p - 0.5))
                if outcome == 1:
                    post = apply_gate(post, "Z" if sabotage else "X", (0,))
                dev = max(dev, abs(1 - fidelity(post, make_logical(n - 1, a, b))))
    return IdentityResult("encoding_recovery", dev)


def check_fusion(rng: random.Random) -> IdentityResult:
    """Fusion of a logical n-block with a resource m-block, success and
    failure branches, for all n+m <= 10.

    Layout: block A = qubits 0..n-1 (kept coupling qubit u = 0), block B =
    qubits n..n+m-1 (measured coupling qubit v = n). Success: CNOT(v, u),
    rotated-basis measurement of v, Z on B's remainder for outcome -.
    Failure: both coupling qubits dephase in the qubit basis and are
    measured out; a bit flip repairs outcome 1 on each side.
    """
    dev = 0.0
    for n in range(1, 10):
        for m in range(1, 10):
            if n + m > 10:
                continue
            a, b = _rand_ab(rng)
            joint = _kron(make_logical(n, a, b), make_ghz(m))
            fused = apply_gate(joint, "CNOT", (n, 0))
            for outcome, p, post in _branches(fused, n, BasisKind.ROTATED):
                dev = max(dev, abs(p - 0.5))
                if outcome == 1:
                    for q in range(n, n + m - 1):
                        post = apply_gate(post, "Z", (q,))
                dev = max(dev, abs(1 - fidelity(post, make_logical(n + m - 1, a, b))))
            if n < 2 or m < 2:
                continue
            for out_u, p_u, st in _branches(joint, 0, BasisKind.QUBIT):
                for out_v, p_v, st2 in _branches(st, n - 1, BasisKind.QUBIT):
                    if out_u == 1:
                        st2 = apply_gate(st2, "X", (0,))
                    if out_v == 1:
                        st2 = apply_gate(st2, "X", (n - 1,))
                    ref = _kron(make_logical(n - 1, a, b), make_ghz(m - 1))
                    dev = max(dev, abs(1 - fidelity(st2, ref)))
    return IdentityResult("fusion", dev)


def check_extension(rng: random.Random) -> IdentityResult:
    """Chain growth step: a fresh |+> single controls a CNOT into any block
    qubit and raises the encoding level by one."""
    dev = 0.0
    for s in range(1, 9):
        a, b = _rand_ab(rng)
        joint = _kron(make_logical(s, a, b), product_state("+"))
        joint = apply_gate(joint, "CNOT", (s, 0))
        dev = max(dev, abs(1 - fidelity(joint, make_logical(s + 1, a, b))))
    return IdentityResult("ghz_extension", dev)


def check_gate_teleportation(rng: random.Random) -> IdentityResult:
    """CNOT teleported through one Bell pair: control c=0, target t=1, Bell
    halves at 2 (control side) and 3 (target side); all branches."""
    dev = 0.0
    for ic in (0, 1):
        for it in (0, 1):
            init = product_state("01"[ic] + "01"[it] + "00")
            st = apply_gate(init, "H", (2,))
            st = apply_gate(st, "CNOT", (2, 3))
            st = apply_gate(st, "CNOT", (0, 2))
            for m1, p1, s1 in _branches(st, 2, BasisKind.QUBIT):
                if m1 == 1:
                    s1 = apply_gate(s1, "X", (2,))  # bell half slid to index 2
                s1 = apply_gate(s1, "CNOT", (2, 1))
                for m2, p2, s2 in _branches(s1, 2, BasisKind.ROTATED):
                    if m2 == 1:
                        s2 = apply_gate(s2, "Z", (0,))
                    ref = product_state("01"[ic] + "01"[it ^ ic])
                    dev = max(dev, abs(1 - fidelity(s2, ref)))
    return IdentityResult("gate_teleportation", dev)


# ---------------------------------------------------------------------------
class _Register:
    """Mutable register wrapper: tracks logical qubit labels as measurement
    removes physical indices."""

    def __init__(self, state: PureState, labels: list[str]):
        self.state = state
        self.labels = list(labels)

    def idx(self, label: str) -> int:
        return self.labels.index(label)

    def gate(self, gate: str, *labels: str) -> None:
        self.state = apply_gate(self.state, gate, tuple(self.idx(l) for l in labels))

    def branches(self, label: str, basis: BasisKind):
        q = self.idx(label)
        for outcome in (0, 1):
            p, post = project(self.state, q, basis, outcome, remove=True)
            if p > 1e-12:
                labels = self.labels[:q] + self.labels[q + 1:]
                reg = _Register(post, labels)
                yield outcome, p, reg


def _aux_unit_branches(reg: _Register, q1: str, q2: str, aux: str):
    """Aux-mediated CNOT(q1 -> q2-role-moved-to-aux): stage CNOTs, rotated
    readout of q2, Z corrections on the minus outcome. Yields (prob, reg)."""
    reg = _Register(reg.state, reg.labels)
    reg.gate("CNOT", q2, aux)
    reg.gate("CNOT", q1, aux)
    for outcome, p, post in reg.branches(q2, BasisKind.ROTATED):
        if outcome == 1:
            post.gate("Z", q1)
            post.gate("Z", aux)
        yield p, post


def logical_cnot_expected(n_home: int, n_phi: int, a_psi, b_psi, a_phi, b_phi) -> PureState:
    """CNOT truth-table state: psi's content (control) living in the
    resource remainder, phi (target) flipped accordingly."""
    dim = 1 << (n_home + n_phi)
    amps = np.zeros(dim, dtype=complex)
    for i in (0, 1):
        for j in (0, 1):
            ci = (a_psi, b_psi)[i]
            cj = (a_phi, b_phi)[j]
            home = logical_direct(n_home, 1 - i, i)
            phi = logical_direct(n_phi, 1 - (j ^ i), j ^ i)
            amps += ci * cj * np.kron(phi.amplitudes, home.amplitudes)
    nrm = np.linalg.norm(amps)
    return PureState(n_home + n_phi, amps / nrm)


def check_logical_cnot(rng: random.Random, n_values=(2, 3),
                       sabotage: bool = False) -> IdentityResult:
    """Full frozen local sequence at p_cz = 1, all measurement branches:
    unit B couples the resource port to phi, unit A couples it to psi, the
    port is read out in the rotated basis and psi in the qubit-basis parity
    measurement; Pauli frames applied; output must be the logical CNOT with
    psi swapped into the resource remainder."""
    inputs = [(1, 0, 1, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 1, 0, 1)]
    for _ in range(2):
        a, b = _rand_ab(rng)
        c, d = _rand_ab(rng)
        inputs.append((a, b, c, d))
    dev = 0.0
    for n in n_values:
        for (ap, bp, af, bf) in inputs:
            dev = max(dev, _logical_cnot_dev(n, ap, bp, af, bf, sabotage))
    return IdentityResult("logical_cnot", dev)


def _logical_cnot_dev(n: int, ap, bp, af, bf, sabotage: bool = False) -> float:
    psi = make_logical(n, ap, bp)
    res = make_ghz(n + 1)
    phi = make_logical(n, af, bf)
    psi_labels = [f"p{i}" for i in range(n)]
    res_labels = ["port"] + [f"r{i}" for i in range(n)]
    phi_labels = [f"f{i}" for i in range(n)]
    base = _Register(_kron(psi, res, phi), psi_labels + res_labels + phi_labels)
    expected = logical_cnot_expected(n, n, ap, bp, af, bf)

    dev = 0.0
    # unit B: couple port to phi (aux joins phi in place of f0)
    base.state = _kron(base.state, oc.zero_state(1))
    base.labels.append("auxB")
    for pB, regB in _aux_unit_branches(base, "port", "f0", "auxB"):
        # unit A: couple port to psi (aux joins psi in place of p0)
        regB.state = _kron(regB.state, oc.zero_state(1))
        regB.labels.append("auxA")
        for pA, regA in _aux_unit_branches(regB, "port", "p0", "auxA"):
            # rotated readout of the port; minus outcome: Z on home qubits
            for eps, pe, regP in regA.branches("port", BasisKind.ROTATED):
                if eps == 1:
                    for i in range(n):
                        regP.gate("Z", f"r{i}")
                # parity measurement: qubit-basis readout of all of psi
                stack = [(regP, 0, 1.0)]
                for lbl in ["auxA"] + [f"p{i}" for i in range(1, n)]:
                    nxt = []
                    for (r, par, pr) in stack:
                        for out, po, r2 in r.branches(lbl, BasisKind.QUBIT):
                            nxt.append((r2, par ^ out, pr * po))
                    stack = nxt
                for (r, par, pr) in stack:
                    if par == 1:
                        r.gate("X", "r0")
                        if not sabotage:
                            r.gate("X", "auxB")
                    # register order: r0..r{n-1}, f1.., auxB; expected state
                    # was built as home qubits then phi qubits
                    order = [f"r{i}" for i in range(n)] + [f"f{i}" for i in range(1, n)] + ["auxB"]
                    perm = _permute(r, order)
                    dev = max(dev, abs(1 - fidelity(perm, expected)))
    return dev


def _permute(reg: _Register, order: list[str]) -> PureState:
    """Reorder register qubits into the given label order."""
    n = reg.state.num_qubits
    t = reg.state.amplitudes.reshape([2] * n)
    src = [n - 1 - reg.idx(lbl) for lbl in order]
    dst = [n - 1 - k for k in range(len(order))]
    t = np.moveaxis(t, src, dst)
    return PureState(n, np.ascontiguousarray(t.reshape(-1)))


def check_aux_unit(rng: random.Random) -> IdentityResult:
    """The coupling unit equals a plain CNOT(q1 -> q2) with q2's role moved
    to the aux, on arbitrary entangled 4-qubit inputs."""
    dev = 0.0
    for seed in range(8):
        r = random.Random(1000 + seed)
        amps = np.array([r.gauss(0, 1) + 1j * r.gauss(0, 1) for _ in range(16)])
        amps /= np.linalg.norm(amps)
        st = PureState(4, amps)
        labels = ["q1", "q2", "s0", "s1"]
        ref = apply_gate(st, "CNOT", (0, 1))
        ref_reg = _Register(ref, labels)
        ref_perm = _permute(ref_reg, ["q1", "s0", "s1", "q2"])
        reg = _Register(_kron(st, oc.zero_state(1)), labels + ["aux"])
        for p, post in _aux_unit_branches(reg, "q1", "q2", "aux"):
            perm = _permute(post, ["q1", "s0", "s1", "aux"])
            dev = max(dev, abs(1 - fidelity(perm, ref_perm)))
    return IdentityResult("aux_mediated_unit", dev)


ALL_CHECKS = (
    check_h_involution,
    check_hczh_equals_cnot,
    check_ghz_definition,
    check_ghz_symmetry,
    check_ghz_qubit_measurement,
    check_logical_construction,
    check_recovery,
    check_fusion,
    check_extension,
    check_gate_teleportation,
    check_aux_unit,
    check_logical_cnot,
)


def run_suite(seed: int = 20240901, sabotage: bool = False) -> list[IdentityResult]:
    """Run every identity check. ``sabotage`` replaces the recovery
    correction with a wrong gate (negative control)."""
    results = []
    for fn in ALL_CHECKS:
        rng = random.Random(seed)
        if fn is check_recovery:
            results.append(check_recovery(rng, sabotage=sabotage))
        elif fn is check_logical_cnot and sabotage:
            results.append(check_logical_cnot(rng, sabotage=True))
        else:
            results.append(fn(rng))
    return results
