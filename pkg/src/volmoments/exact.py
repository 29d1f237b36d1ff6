"""Exact integer reductions that outgrow int64.

All moment arithmetic in this package is exact.  The hot accumulation paths
stay in fixed-width numpy integers with a-priori worst-case bounds; when a
requested reduction could exceed int64, the weight vector is split into
base-2**s limbs so that each partial dot product provably fits, and the
partials are recombined with Python's arbitrary-precision integers.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

INT64_MAX = 2**63 - 1


def exact_dot(values: np.ndarray, weights: np.ndarray, values_total: int, weight_max: int) -> int:
    """Exact sum(values[i] * weights[i]) for non-negative int64 operands.

    ``values_total`` must bound sum(values) and ``weight_max`` must bound
    max(weights); both are usually known analytically by the caller (total
    mass and the largest index power).
    """
    if values_total * weight_max <= INT64_MAX:
        return int(np.dot(values, weights))
    shift = 62 - max(values_total, 1).bit_length()
    if shift < 1:
        # Unreachable for supported volume sizes; keep a correct fallback.
        return sum(int(v) * int(w) for v, w in zip(values.tolist(), weights.tolist()))
    mask = (1 << shift) - 1
    total = 0
    limb = 0
    w = weights
    while weight_max >> (limb * shift):
        part = int(np.dot(values, (w >> (limb * shift)) & mask))
        total += part << (limb * shift)
        limb += 1
    return total


@lru_cache(maxsize=64)
def _index_powers_cached(length: int, max_order: int) -> np.ndarray:
    pw = np.empty((length, max_order + 1), dtype=np.int64)
    pw[:, 0] = 1
    idx = np.arange(length, dtype=np.int64)
    for k in range(1, max_order + 1):
        pw[:, k] = pw[:, k - 1] * idx
    pw.setflags(write=False)
    return pw


def index_powers(length: int, max_order: int) -> np.ndarray:
    """(length, max_order+1) read-only int64 matrix of i**k columns.

    Cached per (length, max_order): integral lengths recur across the five
    projection images and across engine runs.
    """
    return _index_powers_cached(length, max_order)


def weighted_power_sums(values: np.ndarray, max_order: int, values_total: int | None = None) -> list[int]:
    """Exact [sum(values * i**k) for k in 0..max_order] of a 1D int64 array."""
    n = len(values)
    if n == 0:
        return [0] * (max_order + 1)
    if values_total is None:
        values_total = int(values.sum())
    top = n - 1
    out = [values_total]
    if max_order == 0:
        return out
    if values_total * (top**max_order) <= INT64_MAX:
        pw = index_powers(n, max_order)
        sums = values @ pw[:, 1:]
        out.extend(int(s) for s in sums)
        return out
    pw = index_powers(n, max_order)
    for k in range(1, max_order + 1):
        out.append(exact_dot(values, pw[:, k], values_total, top**k))
    return out
