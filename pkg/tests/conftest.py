import math
import random

import numpy as np
import pytest


def rand_ab(rng: random.Random):
    """Random normalized logical amplitudes on the Bloch sphere."""
    th = rng.uniform(0.0, math.pi)
    ph = rng.uniform(0.0, 2.0 * math.pi)
    return complex(math.cos(th / 2)), math.sin(th / 2) * complex(math.cos(ph), math.sin(ph))


class ScriptRng:
    """random.Random stand-in returning scripted values, then a real stream."""

    def __init__(self, values, seed=0):
        self.values = list(values)
        self.tail = random.Random(seed)

    def random(self):
        if self.values:
            return self.values.pop(0)
        return self.tail.random()


def markov_grow_attempts(p: float, target: int) -> float:
    """Expected CZ attempts of incremental chain growth, solved from the
    birth-death transition matrix (independent of the simulator)."""
    if target <= 1:
        return 0.0
    states = [0] + list(range(2, target))  # 0 = no chain (or a bare single)
    idx = {s: i for i, s in enumerate(states)}
    A = np.zeros((len(states), len(states)))
    b = np.ones(len(states))
    for s in states:
        i = idx[s]
        A[i, i] = 1.0
        succ = 2 if s == 0 else s + 1
        fail = 0 if s == 0 else (s - 1 if s - 1 >= 2 else 0)
        if succ < target:
            A[i, idx[succ]] -= p
        A[i, idx[fail]] -= 1.0 - p
    return float(np.linalg.solve(A, b)[idx[0]])


def markov_reencode_attempts(p: float, start_level: int, target: int) -> float:
    """Expected CZ attempts (to success or loss) of re-encoding a block from
    start_level to target, from the joint (block, chain) transition matrix."""
    if start_level >= target:
        return 0.0
    states = []
    for blevel in range(1, target):
        need = target - blevel + 1
        for r in [0] + list(range(2, need + 1)):
            states.append((blevel, r))
    idx = {s: i for i, s in enumerate(states)}
    A = np.zeros((len(states), len(states)))
    b = np.ones(len(states))
    for (blevel, r) in states:
        i = idx[(blevel, r)]
        A[i, i] = 1.0
        need = target - blevel + 1
        if r < need:  # growth step
            succ = (blevel, 2 if r == 0 else r + 1)
            fail = (blevel, 0 if r == 0 or r - 1 <= 1 else r - 1)
            if succ in idx:
                A[i, idx[succ]] -= p
            A[i, idx[fail]] -= 1.0 - p
        else:  # fusion step: success absorbs, failure shrinks both
            new_b = blevel - 1
            if new_b >= 1:
                new_r = r - 1 if r - 1 >= 2 else 0
                A[i, idx[(new_b, new_r)]] -= 1.0 - p
            # new_b == 0 is absorbing loss
    return float(np.linalg.solve(A, b)[idx[(start_level, 0)]])


@pytest.fixture
def rng():
    return random.Random(987654321)
