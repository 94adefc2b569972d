"""Statevector simulation of exactly the operators a QAOA circuit needs.

Basis index z encodes qubit j in bit j (qubit 0 is the least significant bit).
All operators act on the state in place and return it for chaining.
"""

from __future__ import annotations

import math

import numpy as np

MAX_QUBITS = 16

#: Name of the bit generator behind :func:`sample`, recorded in tree headers.
PRNG_NAME = "numpy-PCG64"


class QubitCapError(ValueError):
    pass


class StateVector:
    __slots__ = ("n", "amps")

    def __init__(self, n: int, amps: np.ndarray):
        if len(amps) != 1 << n:
            raise ValueError(f"{len(amps)} amplitudes for {n} qubits")
        self.n = n
        self.amps = amps

    @classmethod
    def basis(cls, n: int, z: int) -> "StateVector":
        _check_qubits(n)
        amps = np.zeros(1 << n, dtype=np.complex128)
        amps[z] = 1.0
        return cls(n, amps)

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())

    def probabilities(self) -> np.ndarray:
        return self.amps.real ** 2 + self.amps.imag ** 2

    def norm(self) -> float:
        return math.sqrt(float(self.probabilities().sum()))


def _check_qubits(n: int):
    if not 1 <= n <= MAX_QUBITS:
        raise QubitCapError(f"qubit count {n} outside [1, {MAX_QUBITS}]")


def _check_length(state: StateVector, f: np.ndarray):
    if len(f) != len(state.amps):
        raise ValueError(f"objective has {len(f)} entries, state has {len(state.amps)}")


def uniform_state(n: int) -> StateVector:
    _check_qubits(n)
    dim = 1 << n
    return StateVector(n, np.full(dim, 1.0 / math.sqrt(dim), dtype=np.complex128))


def apply_phase(state: StateVector, f, gamma: float) -> StateVector:
    """exp(-i gamma H_P) with H_P = diag(f)."""
    f = np.asarray(f, dtype=np.float64)
    _check_length(state, f)
    state.amps *= np.exp(-1j * (gamma * f))
    return state


def apply_mixer(state: StateVector, beta: float) -> StateVector:
    """exp(-i beta sum_j X_j), applied as one X rotation per qubit."""
    c, s = math.cos(beta), math.sin(beta)
    rotation = np.array([[c, -1j * s], [-1j * s, c]])
    amps = state.amps
    for j in range(state.n):
        # axis 1 of the view indexes bit j of the basis label
        amps = np.matmul(rotation, amps.reshape(-1, 2, 1 << j))
    state.amps[:] = amps.reshape(-1)
    return state


def expectation(state: StateVector, f) -> float:
    f = np.asarray(f, dtype=np.float64)
    _check_length(state, f)
    return float(state.probabilities() @ f)


def sample(state: StateVector, shots: int, seed) -> np.ndarray:
    """Draw ``shots`` computational-basis outcomes from ``state``.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts, including a
    ``SeedSequence``.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    probs = state.probabilities()
    cdf = np.cumsum(probs)
    draws = rng.random(shots) * cdf[-1]
    return np.minimum(np.searchsorted(cdf, draws, side="right"), len(probs) - 1)
