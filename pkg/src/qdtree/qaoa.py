"""p-level QAOA over a partition objective, with ramp-grid angle calibration.

A circuit run simulates the full statevector, so every call evaluates the
objective at all 2^T bitstrings. Nothing here measures or implies a speedup
over exhaustive search.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .criterion import (
    ContingencyTable,
    Partition,
    SplitScore,
    canonical_mask,
    objective_table,
)
from .qsim import StateVector, apply_mixer, apply_phase, expectation, sample, uniform_state

#: Minimum expectation gain for a grid point to displace an earlier one.
CALIBRATION_TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class QaoaAngles:
    gammas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self):
        if len(self.gammas) != len(self.betas):
            raise ValueError("gammas and betas must have equal length")
        if not self.gammas:
            raise ValueError("at least one QAOA layer is required")

    @property
    def p(self) -> int:
        return len(self.gammas)


@dataclass(frozen=True)
class QaoaConfig:
    """QAOA settings.

    ``angles`` set means fixed calibration; otherwise angles are found by a
    ``grid`` x ``grid`` search over linear ramp schedules.
    """

    p: int = 5
    shots: int = 1024
    seed: int = 42
    grid: int = 16
    angles: Optional[QaoaAngles] = None

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.grid < 2:
            raise ValueError("grid resolution must be >= 2")
        if self.angles is not None and self.angles.p != self.p:
            raise ValueError("fixed angles do not match p")


def run_circuit(f, angles: QaoaAngles) -> StateVector:
    f = np.asarray(f, dtype=np.float64)
    n = len(f).bit_length() - 1
    if len(f) != 1 << n:
        raise ValueError("objective length must be a power of two")
    state = uniform_state(n)
    for gamma, beta in zip(angles.gammas, angles.betas):
        apply_phase(state, f, gamma)
        apply_mixer(state, beta)
    return state


def ramp_angles(gamma_max: float, beta_max: float, p: int) -> QaoaAngles:
    if p < 1:
        raise ValueError("p must be >= 1")
    steps = [k / p for k in range(1, p + 1)]
    return QaoaAngles(
        tuple(s * gamma_max for s in steps),
        tuple((1 - s) * beta_max for s in steps),
    )


def calibration_grid(resolution: int) -> tuple[list[float], list[float]]:
    """Grid axes: gamma in (0, pi], beta in (0, pi/2], both ascending."""
    gammas = [math.pi * i / resolution for i in range(1, resolution + 1)]
    betas = [0.5 * math.pi * i / resolution for i in range(1, resolution + 1)]
    return gammas, betas


def calibrate_angles(f, config: QaoaConfig) -> QaoaAngles:
    """Ramp angles maximising <H_P>; the first (smallest) grid point wins ties."""
    f = np.asarray(f, dtype=np.float64)
    best, best_value = None, -math.inf
    gammas, betas = calibration_grid(config.grid)
    for g in gammas:
        for b in betas:
            angles = ramp_angles(g, b, config.p)
            value = expectation(run_circuit(f, angles), f)
            if value > best_value + CALIBRATION_TIE_TOLERANCE:
                best, best_value = angles, value
    return best


def best_sampled(f: np.ndarray, outcomes: np.ndarray) -> Optional[int]:
    """Sampled bitstring with the largest objective, smallest index on ties.

    Trivial bitstrings (all zeros, all ones) only win if nothing else was drawn,
    in which case None is returned.
    """
    full = len(f) - 1
    seen = np.unique(outcomes)
    seen = seen[(seen != 0) & (seen != full)]
    if len(seen) == 0:
        return None
    return int(seen[np.argmax(f[seen])])


@functools.lru_cache(maxsize=1 << 14)
def _prepared_circuit(counts: bytes, shape: tuple[int, int], angles: QaoaAngles):
    # deep nodes see the same small tables over and over; the state depends
    # only on the table and the angles, sampling stays per call
    f = objective_table(ContingencyTable(np.frombuffer(counts, dtype=np.int64).reshape(shape)))
    state = run_circuit(f, angles)
    state.amps.flags.writeable = False
    return f, state


def qaoa_best_partition(
    table: ContingencyTable,
    angles: QaoaAngles,
    config: QaoaConfig,
    seed=None,
) -> SplitScore:
    """Best partition among ``config.shots`` measurements of the QAOA state.

    ``seed`` overrides ``config.seed`` (tree growth passes per-call sub-seeds).
    """
    t = table.n_values
    if t < 2:
        raise ValueError("an attribute with fewer than two values has no partition")
    f, state = _prepared_circuit(table.counts.tobytes(), table.counts.shape, angles)
    outcomes = sample(state, config.shots, config.seed if seed is None else seed)
    z = best_sampled(f, outcomes)
    if z is None:
        return SplitScore(0.0)
    mask = canonical_mask(z, t)
    return SplitScore(float(f[mask]), Partition(table.attr, mask, t))
