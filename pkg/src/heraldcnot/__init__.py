"""Monte Carlo simulator for deterministic logical CNOT gates synthesized from
heralded (probabilistic) CZ gates on parity-encoded qubits, in a single cavity
and across a small quantum network, together with an exact state-vector oracle
that certifies every encoding and gate identity the simulator relies on."""

__version__ = "0.1.0"
