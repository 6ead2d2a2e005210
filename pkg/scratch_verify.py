"""Scratch: numerically confirm the derived circuits before freezing them."""
import itertools
import math
import random
import sys

import numpy as np

sys.path.insert(0, "src")
from heraldcnot import oracle as oc
from heraldcnot.oracle import BasisKind, PureState, apply_gate, fidelity, make_ghz, make_logical, project

rng = random.Random(1234)


def rand_ab(r):
    th = r.uniform(0, math.pi)
    ph = r.uniform(0, 2 * math.pi)
    return math.cos(th / 2), math.sin(th / 2) * complex(math.cos(ph), math.sin(ph))


def check(name, dev, tol=1e-10):
    ok = dev <= tol
    print(f"{'PASS' if ok else 'FAIL'} {name}: max dev {dev:.3e}")
    return ok


all_ok = True

# 1. make_ghz equals kron-built (|+>^n + |->^n)/sqrt2
dev = 0.0
for n in range(1, 8):
    plus = oc.product_state("+" * n)
    minus = oc.product_state("-" * n)
    ref = PureState(n, (plus.amplitudes + minus.amplitudes) / math.sqrt(2))
    dev = max(dev, abs(1 - fidelity(make_ghz(n), ref)))
all_ok &= check("make_ghz = (|+>^n+|->^n)/sqrt2", dev)

# 2. Recovery: dephase any qubit, measure qubit basis, X on one remaining if outcome 1
dev = 0.0
for n in range(2, 7):
    for _ in range(5):
        a, b = rand_ab(rng)
        psi = make_logical(n, a, b)
        for q in range(n):
            for out in (0, 1):
                p, post = project(psi, q, BasisKind.QUBIT, out, remove=True)
                assert abs(p - 0.5) < 1e-10
                if out == 1:
                    post = apply_gate(post, "X", (0,))
                dev = max(dev, abs(1 - fidelity(post, make_logical(n - 1, a, b))))
all_ok &= check("recovery after qubit-basis projection", dev)

# 3. Fusion success: CNOT(control=v in B, target=u in A), rotated-measure v,
#    Z on all remaining B qubits when outcome is -.
#    Register layout: A = qubits 0..n-1 (u=0), B = qubits n..n+m-1 (v=n).
dev = 0.0
for n in range(1, 6):
    for m in range(1, 6):
        if n + m > 10:
            continue
        a, b = rand_ab(rng)
        A = make_logical(n, a, b)
        B = make_ghz(m)
        joint = PureState(n + m, np.kron(B.amplitudes, A.amplitudes))
        joint = apply_gate(joint, "CNOT", (n, 0))  # control v (qubit n), target u (qubit 0)
        for out in (0, 1):
            p, post = project(joint, n, BasisKind.ROTATED, out, remove=True)
            assert abs(p - 0.5) < 1e-9
            if out == 1:
                for q in range(n, n + m - 1):  # B's remaining qubits after removal
                    post = apply_gate(post, "Z", (q,))
            dev = max(dev, abs(1 - fidelity(post, make_logical(n + m - 1, a, b))))
all_ok &= check("fusion success (both outcomes)", dev)

# 4. Fusion failure: both participants dephased in qubit basis (abstract CNOT
#    primitive not applied), measured out; X-correction on outcome 1.
dev = 0.0
for n in range(2, 5):
    for m in range(2, 5):
        a, b = rand_ab(rng)
        A = make_logical(n, a, b)
        B = make_ghz(m)
        joint = PureState(n + m, np.kron(B.amplitudes, A.amplitudes))
        for out_u, out_v in itertools.product((0, 1), repeat=2):
            p1, st = project(joint, 0, BasisKind.QUBIT, out_u, remove=True)
            p2, st = project(st, n - 1, BasisKind.QUBIT, out_v, remove=True)  # v shifted down by 1
            if out_u == 1:
                st = apply_gate(st, "X", (0,))
            if out_v == 1:
                st = apply_gate(st, "X", (n - 1,))
            refA = make_logical(n - 1, a, b)
            refB = make_ghz(m - 1)
            ref = PureState(n + m - 2, np.kron(refB.amplitudes, refA.amplitudes))
            dev = max(dev, abs(1 - fidelity(st, ref)))
all_ok &= check("fusion failure branch (both blocks recoverable)", dev)

# 5. Extension: fresh |+> single as control, CNOT into a block qubit -> level+1
dev = 0.0
for s in range(1, 8):
    a, b = rand_ab(rng)
    blk = make_logical(s, a, b)
    plus = oc.product_state("+")
    joint = PureState(s + 1, np.kron(plus.amplitudes, blk.amplitudes))  # new qubit = index s
    joint = apply_gate(joint, "CNOT", (s, 0))
    dev = max(dev, abs(1 - fidelity(joint, make_logical(s + 1, a, b))))
all_ok &= check("extension by one qubit", dev)

# 6. Aux-mediated unit: on arbitrary two-qubit-entangled inputs q1, q2 (each
#    possibly entangled with other registers), net effect = CNOT(q1 -> q2)
#    with q2's role moved to aux. Circuit: CNOT(q2->aux), CNOT(q1->aux),
#    rotated-measure q2; on -, Z(q1) and Z(aux).
dev = 0.0
r2 = random.Random(99)
for trial in range(20):
    nreg = 4  # q1=0, q2=1, spectators=2,3; aux appended as 4
    amps = np.array([r2.gauss(0, 1) + 1j * r2.gauss(0, 1) for _ in range(1 << nreg)])
    amps /= np.linalg.norm(amps)
    st = PureState(nreg, amps)
    # reference: CNOT(q1 -> q2) on the original register
    ref = apply_gate(st, "CNOT", (0, 1))
    # unit: append aux |0> as qubit 4
    joint = PureState(nreg + 1, np.kron(np.array([1, 0], dtype=complex), st.amplitudes))
    joint = apply_gate(joint, "CNOT", (1, 4))
    joint = apply_gate(joint, "CNOT", (0, 4))
    for out in (0, 1):
        p, post = project(joint, 1, BasisKind.ROTATED, out, remove=True)
        if p <= 1e-12:
            continue
        if out == 1:
            post = apply_gate(post, "Z", (0,))
            post = apply_gate(post, "Z", (3,))  # aux slid from 4 to 3 after removal
        # post register: q1=0, spect=1,2, aux(new q2)=3.
        # reference register: q1=0, q2=1, spect=2,3 -> permute ref to match.
        t = ref.amplitudes.reshape([2] * 4)
        # ref axes: [q3, q2spect, q2, q1] -> want [auxval(q2), q3spect, q2spect, q1]
        t2 = np.moveaxis(t, 2, 0)  # move q2's axis (axis index 4-1-1=2) to front
        ref_perm = PureState(4, np.ascontiguousarray(t2.reshape(-1)))
        dev = max(dev, abs(1 - fidelity(post, ref_perm)))
all_ok &= check("aux-mediated unit = CNOT(q1->q2@aux)", dev)

# 7. Full local logical CNOT (frozen sequence), n = 1..3, enumerated branches.
#    Registers: psi = n, R = n+1 (port + rest), phi = n.
#    Sequence: unitB: CNOT(port -> q_f), unitA: CNOT(port -> q_p),
#    rotated(port), parity(all psi); corrections:
#      eps=-: Z on all R-rest; parity=1: X on one R-rest qubit and one phi qubit.
def full_local_cnot_dev(n: int, apsi, bpsi, aphi, bphi) -> float:
    npsi, nR, nphi = n, n + 1, n
    # layout: psi 0..n-1 (q_p = 0), R n..2n (port = n, rest n+1..2n), phi 2n+1..3n (q_f = 2n+1)
    psi = make_logical(npsi, apsi, bpsi)
    R = make_ghz(nR)
    phi = make_logical(nphi, aphi, bphi)
    joint = np.kron(phi.amplitudes, np.kron(R.amplitudes, psi.amplitudes))
    st = PureState(3 * n + 1, joint)
    port, qp, qf = n, 0, 2 * n + 1
    st = apply_gate(st, "CNOT", (port, qf))
    st = apply_gate(st, "CNOT", (port, qp))
    worst = 0.0
    # branch on rotated port outcome
    for eps in (0, 1):
        p, s1 = project(st, port, BasisKind.ROTATED, eps, remove=True)
        if p <= 1e-12:
            continue
        # after removal: psi 0..n-1, R-rest n..2n-1, phi 2n..3n-1
        if eps == 1:
            for q in range(n, 2 * n):
                s1 = apply_gate(s1, "Z", (q,))
        # parity-measure all psi qubits (qubit basis), enumerate strings
        stack = [(s1, 0, 1.0)]
        for k in range(n):
            new = []
            for (sv, par, pr) in stack:
                for out in (0, 1):
                    pk, sk = project(sv, 0, BasisKind.QUBIT, out, remove=True)
                    if pk > 1e-12:
                        new.append((sk, par ^ out, pr * pk))
            stack = new
        for (sv, par, pr) in stack:
            # register now: R-rest 0..n-1, phi n..2n-1
            if par == 1:
                sv = apply_gate(sv, "X", (0,))
                sv = apply_gate(sv, "X", (n,))
            # expected: CNOT_L(psi -> phi), psi living in R-rest
            ref = np.zeros(1 << (2 * n), dtype=complex)
            # build sum over logical basis: coeff(i,j) from CNOT on (apsi,bpsi)x(aphi,bphi)
            # CNOT: |i,j> -> |i, j^i>; input amplitude a_i * c_j
            for i in (0, 1):
                for j in (0, 1):
                    ci = (apsi, bpsi)[i]
                    cj = (aphi, bphi)[j]
                    ketR = make_ghz(n).amplitudes if i == 0 else apply_gate(make_ghz(n), "X", (0,)).amplitudes
                    kphi0 = make_ghz(n)
                    ketP = kphi0.amplitudes if (j ^ i) == 0 else apply_gate(kphi0, "X", (0,)).amplitudes
                    ref = ref + ci * cj * np.kron(ketP, ketR)
            nref = np.linalg.norm(ref)
            refst = PureState(2 * n, ref / nref)
            worst = max(worst, abs(1 - fidelity(sv, refst)))
    return worst


dev = 0.0
cases = [(1, 0, 1, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 1, 0, 1)]
for n in (1, 2, 3):
    if n == 1:
        continue  # n=1 is a direct CNOT, no resource; skip in this scratch
    for (ap, bp, af, bf) in cases:
        dev = max(dev, full_local_cnot_dev(n, ap, bp, af, bf))
    for _ in range(3):
        ap, bp = rand_ab(rng)
        af, bf = rand_ab(rng)
        dev = max(dev, full_local_cnot_dev(n, ap, bp, af, bf))
all_ok &= check("full local logical CNOT (n=2,3, all branches)", dev)

# 8. Teleported CNOT through a Bell pair (Eisert): control c=0, target t=1,
#    bell halves bA=2 (at control side), bB=3.
#    Circuit: CNOT(c->bA), qubit-measure bA -> m1, X^m1 on bB;
#             CNOT(bB->t), rotated-measure bB -> m2, Z^m2 on c.
dev = 0.0
for (ic, it) in itertools.product((0, 1), repeat=2):
    init = oc.product_state(("01"[ic]) + ("01"[it]) + "00")
    st = apply_gate(init, "H", (2,))
    st = apply_gate(st, "CNOT", (2, 3))
    st = apply_gate(st, "CNOT", (0, 2))
    for m1 in (0, 1):
        p1, s1 = project(st, 2, BasisKind.QUBIT, m1, remove=True)
        if p1 <= 1e-12:
            continue
        # registers: c=0, t=1, bB=2
        if m1 == 1:
            s1 = apply_gate(s1, "X", (2,))
        s1 = apply_gate(s1, "CNOT", (2, 1))
        for m2 in (0, 1):
            p2, s2 = project(s1, 2, BasisKind.ROTATED, m2, remove=True)
            if p2 <= 1e-12:
                continue
            if m2 == 1:
                s2 = apply_gate(s2, "Z", (0,))
            ref = oc.product_state(("01"[ic]) + ("01"[it ^ ic]))
            dev = max(dev, abs(1 - fidelity(s2, ref)))
all_ok &= check("teleported CNOT circuit", dev)

print("ALL OK" if all_ok else "FAILURES PRESENT")
