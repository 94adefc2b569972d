"""Twoing binary split criterion over contingency tables.

A partition of a categorical domain {0..T-1} is a T-bit mask; bit v set means
value v belongs to the first subdomain. Canonical masks have bit 0 set.

The scalar path (``twoing_from_histograms``) and the vectorised path
(``twoing_rows``) evaluate the same expression in the same floating-point
order, so both return bit-identical values for the same histograms. Tree
comparisons between the exhaustive and QAOA backends depend on this.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .qsim import MAX_QUBITS, QubitCapError


@dataclass(frozen=True)
class Partition:
    attr: Optional[int]
    mask: int
    size: int

    @property
    def d1(self) -> list[int]:
        return [v for v in range(self.size) if self.mask >> v & 1]

    @property
    def d2(self) -> list[int]:
        return [v for v in range(self.size) if not self.mask >> v & 1]

    @property
    def is_canonical(self) -> bool:
        return bool(self.mask & 1) and 0 < self.mask < (1 << self.size) - 1


@dataclass(frozen=True)
class SplitScore:
    value: float
    partition: Optional[Partition] = None
    threshold: Optional[float] = None


class ContingencyTable:
    """T x M value-by-class counts for one categorical attribute."""

    def __init__(self, counts, attr: Optional[int] = None):
        counts = np.array(counts, dtype=np.int64, ndmin=2)
        if counts.ndim != 2 or (counts < 0).any():
            raise ValueError("counts must be a non-negative T x M matrix")
        counts.flags.writeable = False
        self.counts = counts
        self.rows = counts.tolist()
        self.attr = attr
        self.value_totals = counts.sum(axis=1)
        self.class_totals = counts.sum(axis=0)
        self.total = int(counts.sum())

    @property
    def n_values(self) -> int:
        return self.counts.shape[0]

    @property
    def n_classes(self) -> int:
        return self.counts.shape[1]

    def __repr__(self):
        return f"ContingencyTable({self.counts.tolist()}, attr={self.attr})"


def twoing_from_histograms(h1: Sequence[int], h2: Sequence[int]) -> float:
    n1, n2 = sum(h1), sum(h2)
    if n1 == 0 or n2 == 0:
        return 0.0
    total = n1 + n2
    spread = 0.0
    n1f, n2f = float(n1), float(n2)
    for a, b in zip(h1, h2):
        spread = spread + abs(float(a) / n1f - float(b) / n2f)
    weight = float(int(n1) * int(n2)) / float(int(total) * int(total))
    return 0.25 * weight * spread * spread


def twoing_rows(h1: np.ndarray, h2: np.ndarray) -> np.ndarray:
    """Vectorised twoing over K histogram pairs given as K x M integer arrays."""
    h1 = np.asarray(h1, dtype=np.int64)
    h2 = np.asarray(h2, dtype=np.int64)
    n1 = h1.sum(axis=1)
    n2 = h2.sum(axis=1)
    ok = (n1 > 0) & (n2 > 0)
    d1 = np.where(ok, n1, 1)
    d2 = np.where(ok, n2, 1)
    spread = np.zeros(len(h1))
    # sequential accumulation keeps the summation order of the scalar path
    for c in range(h1.shape[1]):
        spread = spread + np.abs(h1[:, c] / d1 - h2[:, c] / d2)
    total = n1 + n2
    value = 0.25 * ((n1 * n2) / np.where(ok, total * total, 1)) * spread * spread
    return np.where(ok, value, 0.0)


def partition_histograms(table: ContingencyTable, mask: int) -> tuple[list[int], list[int]]:
    h1 = [0] * table.n_classes
    h2 = [0] * table.n_classes
    for v, row in enumerate(table.rows):
        side = h1 if mask >> v & 1 else h2
        for c, k in enumerate(row):
            side[c] += k
    return h1, h2


def twoing_of_partition(table: ContingencyTable, mask: int) -> float:
    return twoing_from_histograms(*partition_histograms(table, mask))


def canonical_mask(mask: int, size: int) -> int:
    """Representative of {mask, complement} with value 0 in the first subdomain."""
    return mask if mask & 1 else mask ^ ((1 << size) - 1)


def exhaustive_best_partition(table: ContingencyTable) -> SplitScore:
    t = table.n_values
    if t < 2:
        return SplitScore(0.0)
    full = (1 << t) - 1
    best_mask, best_value = -1, -1.0
    for mask in range(1, full, 2):
        value = twoing_of_partition(table, mask)
        if value > best_value:
            best_mask, best_value = mask, value
    return SplitScore(best_value, Partition(table.attr, best_mask, t))


@functools.lru_cache(maxsize=None)
def mask_bits(n: int) -> np.ndarray:
    """2^n x n 0/1 matrix; row z holds the bits of z, least significant first."""
    bits = ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(np.int64)
    bits.flags.writeable = False
    return bits


def objective_table(table: ContingencyTable) -> np.ndarray:
    """Twoing value of every mask z in [0, 2^T); trivial masks score 0."""
    t = table.n_values
    if t > MAX_QUBITS:
        raise QubitCapError(f"attribute has {t} values; the simulator supports at most {MAX_QUBITS}")
    h1 = mask_bits(t) @ table.counts
    h2 = table.class_totals[None, :] - h1
    return twoing_rows(h1, h2)
