"""All 2D raw moments of an image, order <= 4, from five 1D integrals.

An image I(i, j) of size W x H is collapsed onto five 1D integrals by pure
addition:

    vert  V[i]       = sum_j I(i, j)
    horiz H[j]       = sum_i I(i, j)
    diag  D[i + j]                       length W + H - 1
    anti  A[i - j]   stored at i - j + (H - 1), same length
    x2y   T[i + 2j]                      length W + 2H - 2

The 1D moments of these integrals recombine into every 2D moment M[p][q]
with p + q <= 4.  Writing Dk, Ak, Tk for the k-th moments of diag, anti
(about its logical origin) and x2y, expanding sum I*(i+j)^k etc. binomially
and cancelling gives:

    M11 = (D2 - M20 - M02) / 2
    M21 = (D3 - A3 - 2*M03) / 6          M12 = (D3 + A3 - 2*M30) / 6
    M22 = (D4 + A4 - 2*M40 - 2*M04) / 12
    M31 + M13 = (D4 - A4) / 8
    T4  = M40 + 8*M31 + 24*M22 + 32*M13 + 16*M04   (separates M31 from M13)

Every division is exact on integer images; a remainder signals a bug and
raises InconsistencyError.  brute_force_2d is the independent oracle the
formulas are validated against.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from . import scratch
from .counters import OpCounters
from .errors import InconsistencyError
from .exact import INT64_MAX, index_powers, weighted_power_sums
from .projection import ProjectionImage


@dataclass(frozen=True, eq=False)
class IntegralSet:
    """The 1D integrals of one image, plus the index bookkeeping.

    ``anti`` is stored with its logical origin at index ``anti_offset``
    (= H - 1).  ``x2y`` is None when the set was built for max_order 3,
    where it is never consumed.  ``origin_offset`` carries over the source
    image's own first-axis offset.
    """

    vert: np.ndarray
    horiz: np.ndarray
    diag: np.ndarray
    anti: np.ndarray
    x2y: np.ndarray | None
    anti_offset: int
    origin_offset: int = 0

    @property
    def mass(self) -> int:
        return int(self.vert.sum())


@dataclass(frozen=True)
class Moments2D:
    """Raw image moments M[p][q] for p + q <= order, exact integers."""

    order: int
    values: dict[tuple[int, int], int]
    origin_offset: int = 0

    def __getitem__(self, pq: tuple[int, int]) -> int:
        return self.values[pq]

    @property
    def mass(self) -> int:
        return self.values[(0, 0)]


def _skewed(buf: np.ndarray, rows: int, length: int) -> np.ndarray:
    """Reinterpret a zero-padded row buffer at a narrower width.

    Reading an (H, Wp) buffer back at width ``length`` < Wp shears row j
    right by j*(Wp - length) columns, which turns diagonal sums into plain
    column sums.  Callers pick Wp so the shear step is 1 (diag/anti) or 2
    (x2y) and no shifted element ever wraps past ``length``.
    """
    return buf.ravel()[:rows * length].reshape(rows, length)


def integrals(image: ProjectionImage, max_order: int = 4,
              counters: OpCounters | None = None) -> IntegralSet:
    """The five 1D integrals of an image (four when max_order is 3)."""
    px = image.pixels
    h, w = px.shape
    vert = px.sum(axis=0, dtype=np.int64)
    horiz = px.sum(axis=1, dtype=np.int64)
    # one buffer padded for the shear-by-2 x2y view also serves the diag
    # view; the zero padding is never written, so scratch reuse is safe
    buf = scratch.buffer("drt2d.skew", (h, w + 2 * h), px.dtype, zeroed=True, key=(h, w))
    buf[:, :w] = px
    diag = _skewed(buf, h, w + 2 * h - 1)[:, :w + h - 1].sum(axis=0, dtype=np.int64)
    x2y = _skewed(buf, h, w + 2 * h - 2).sum(axis=0, dtype=np.int64) if max_order >= 4 else None
    abuf = scratch.buffer("drt2d.skew_anti", (h, w + h), px.dtype, zeroed=True, key=(h, w))
    abuf[:, :w] = px[::-1]
    anti = _skewed(abuf, h, w + h - 1).sum(axis=0, dtype=np.int64)
    if counters is not None:
        counters.additions += (4 if x2y is None else 5) * px.size
    return IntegralSet(vert, horiz, diag, anti, x2y,
                       anti_offset=h - 1, origin_offset=image.origin_offset)


def moments_1d(integral: np.ndarray, max_order: int = 4,
               counters: OpCounters | None = None) -> list[int]:
    """Exact [sum(integral[i] * i**k) for k in 0..max_order]."""
    out = weighted_power_sums(np.asarray(integral, dtype=np.int64), max_order)
    if counters is not None:
        n = len(integral)
        counters.multiplications += (2 * max_order - 1) * n
        counters.additions += (max_order + 1) * n
    return out


def _shift_1d(moments: list[int], offset: int) -> list[int]:
    """Re-express 1D moments about an origin ``offset`` to the right."""
    return [
        sum(comb(k, s) * (-offset) ** (k - s) * moments[s] for s in range(k + 1))
        for k in range(len(moments))
    ]


def _exact_div(numerator: int, divisor: int, what: str) -> int:
    q, r = divmod(numerator, divisor)
    if r:
        raise InconsistencyError(f"{what}: {numerator} is not divisible by {divisor}")
    return q


def assemble_2d(iset: IntegralSet, max_order: int = 4,
                counters: OpCounters | None = None) -> Moments2D:
    """Recombine the 1D integral moments into all 2D moments.

    The result is expressed in the image's stored coordinates; callers that
    need logical coordinates apply shift_origin with the recorded offset.
    """
    if max_order not in (3, 4):
        raise ValueError(f"max_order must be 3 or 4, got {max_order}")
    if max_order >= 4 and iset.x2y is None:
        raise ValueError("4th-order assembly needs the x2y integral")
    vm = moments_1d(iset.vert, max_order, counters)
    hm = moments_1d(iset.horiz, max_order, counters)
    dm = moments_1d(iset.diag, max_order, counters)
    am = _shift_1d(moments_1d(iset.anti, max_order, counters), iset.anti_offset)

    m: dict[tuple[int, int], int] = {}
    for k in range(max_order + 1):
        m[(k, 0)] = vm[k]
        m[(0, k)] = hm[k]
    if hm[0] != vm[0]:
        raise InconsistencyError(f"integral masses disagree: vert {vm[0]} vs horiz {hm[0]}")

    m[(1, 1)] = _exact_div(dm[2] - m[(2, 0)] - m[(0, 2)], 2, "M11")
    if max_order >= 3:
        m[(2, 1)] = _exact_div(dm[3] - am[3] - 2 * m[(0, 3)], 6, "M21")
        m[(1, 2)] = _exact_div(dm[3] + am[3] - 2 * m[(3, 0)], 6, "M12")
    if max_order >= 4:
        tm = moments_1d(iset.x2y, max_order, counters)
        m[(2, 2)] = _exact_div(dm[4] + am[4] - 2 * m[(4, 0)] - 2 * m[(0, 4)], 12, "M22")
        s31 = _exact_div(dm[4] - am[4], 8, "M31+M13")
        m[(1, 3)] = _exact_div(
            tm[4] - m[(4, 0)] - 24 * m[(2, 2)] - 16 * m[(0, 4)] - 8 * s31, 24, "M13")
        m[(3, 1)] = s31 - m[(1, 3)]
    return Moments2D(max_order, m, iset.origin_offset)


def brute_force_2d(image: ProjectionImage, max_order: int = 4) -> Moments2D:
    """Direct double-loop oracle: M[p][q] = sum I(i, j) * i**p * j**q."""
    px = image.pixels
    h, w = px.shape
    mass = int(px.astype(object).sum())  # arbitrary precision; the guard must not wrap
    if mass * max(w - 1, h - 1, 1) ** max_order > INT64_MAX:
        raise OverflowError(
            f"brute-force accumulator would overflow for a {w}x{h} image of mass {mass}")
    xp = index_powers(w, max_order)
    yq = index_powers(h, max_order)
    rows = px @ xp  # rows[j, p] = sum_i I(i, j) * i**p
    values = {
        (p, q): int(yq[:, q] @ rows[:, p])
        for p in range(max_order + 1)
        for q in range(max_order + 1 - p)
    }
    return Moments2D(max_order, values, image.origin_offset)


def shift_origin(m: Moments2D, offset: int) -> Moments2D:
    """Binomial origin shift along the first image axis.

    Maps moments taken about stored index 0 to moments about logical index
    0, where stored i = logical i + offset:

        M'[p][q] = sum_{s<=p} C(p, s) * (-offset)**(p-s) * M[s][q]
    """
    shifted = {
        (p, q): sum(comb(p, s) * (-offset) ** (p - s) * m.values[(s, q)] for s in range(p + 1))
        for (p, q) in m.values
    }
    return Moments2D(m.order, shifted, 0)
