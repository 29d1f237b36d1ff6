"""Three engines for raw 3D moments, all exact and bit-identical.

    naive_moments    per-voxel monomial evaluation (the ground-truth oracle)
    factored_moments row -> slice -> volume factored accumulation
    dpm_moments      discrete projections + 1D-integral recombination

The projection engine gets its complexity win from doing only additions per
voxel; the per-voxel multiplications of the other two engines are what the
operation counters expose.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import drt2d
from .counters import OpCounters
from .errors import InconsistencyError
from .exact import INT64_MAX, exact_dot, index_powers
from .projection import Orientation, project_subset
from .volume import Volume


@dataclass(frozen=True)
class MomentTensor3:
    """Raw moments M[p][q][r] for p + q + r <= order, exact integers."""

    order: int
    values: dict[tuple[int, int, int], int]

    def __getitem__(self, pqr: tuple[int, int, int]) -> int:
        return self.values[pqr]

    def items(self):
        """(index, value) pairs in lexicographic (p, q, r) order."""
        return sorted(self.values.items())

    @property
    def mass(self) -> int:
        return self.values[(0, 0, 0)]


@lru_cache(maxsize=8)
def moment_indices(order: int) -> tuple[tuple[int, int, int], ...]:
    """All (p, q, r) with p + q + r <= order, lexicographically sorted."""
    return tuple(
        (p, q, r)
        for p in range(order + 1)
        for q in range(order + 1 - p)
        for r in range(order + 1 - p - q)
    )


def _check_order(order: int) -> None:
    if order not in (3, 4):
        raise ValueError(f"order must be 3 or 4, got {order}")


def _power_sum(count: int, k: int) -> int:
    """Exact sum(i**k for i in range(count)) via the closed forms, k <= 4."""
    m = count - 1
    if k == 0:
        return count
    if k == 1:
        return m * (m + 1) // 2
    if k == 2:
        return m * (m + 1) * (2 * m + 1) // 6
    if k == 3:
        return (m * (m + 1) // 2) ** 2
    if k == 4:
        return m * (m + 1) * (2 * m + 1) * (3 * m * m + 3 * m - 1) // 30
    raise ValueError(f"power sums implemented for k <= 4, got {k}")


def naive_moments(volume: Volume, order: int, counters: OpCounters | None = None) -> MomentTensor3:
    """Direct evaluation: M[p][q][r] = sum V(x,y,z) * x**p * y**q * z**r.

    Each voxel is multiplied by its precomputed in-plane monomial and the
    plane totals are weighted by z**r, so the work is Theta(#moments * LMN)
    multiplications.  Plane totals are bounded a priori; row chunks keep
    them inside int64 and the z combination is arbitrary precision.
    """
    _check_order(order)
    v = volume.voxels
    n, m, l = v.shape
    vmax = int(np.iinfo(v.dtype).max)
    xp = index_powers(l, order)
    yq = index_powers(m, order)
    zpow = index_powers(n, order)
    sx = [_power_sum(l, k) for k in range(order + 1)]
    sy = [_power_sum(m, k) for k in range(order + 1)]

    # Per-voxel products are materialized chunk by chunk and then reduced.
    # The product buffer rows carry 8 columns of padding: power-of-two row
    # strides alias badly in cache at e.g. 256^3, and the pad sidesteps that.
    # The buffer is kept around 4 MiB so it stays cache-hot at every size.
    zchunk = min(n, max(1, (1 << 22) // (8 * m * l)))
    prod = np.zeros((zchunk, m, l + 8), dtype=np.int64)
    prod_view = prod[:, :, :l]
    prod_flat = prod.reshape(zchunk, -1)
    values: dict[tuple[int, int, int], int] = {}
    plane = None
    plane_pq = None
    for (p, q, r) in moment_indices(order):
        if (p, q) != plane_pq:
            plane = np.outer(yq[:, q], xp[:, p])
            plane_pq = (p, q)
        plane_bound = vmax * sx[p] * sy[q]
        if plane_bound <= INT64_MAX:
            plane_sums = np.empty(n, dtype=np.int64)
            for z0 in range(0, n, zchunk):
                z1 = min(z0 + zchunk, n)
                c = z1 - z0
                np.multiply(v[z0:z1], plane, out=prod_view[:c])
                plane_sums[z0:z1] = prod_flat[:c].sum(axis=1)
            values[(p, q, r)] = exact_dot(plane_sums, zpow[:, r], plane_bound * n,
                                          max(1, (n - 1) ** r))
        else:
            row_max = max(1, (m - 1) ** q)
            chunk = int(INT64_MAX // (vmax * sx[p] * row_max))
            if chunk < 1:
                raise OverflowError(
                    f"naive accumulator would overflow at dims {volume.dims}, "
                    f"{volume.bit_depth}-bit, order {order}")
            total = 0
            for z in range(n):
                slab = v[z]
                plane_sum = sum(
                    int(np.sum(slab[y0:y0 + chunk] * plane[y0:y0 + chunk], dtype=np.int64))
                    for y0 in range(0, m, chunk))
                total += plane_sum * z**r
            values[(p, q, r)] = total
        if counters is not None:
            counters.multiplications += v.size + n
            counters.additions += v.size + n
    return MomentTensor3(order, values)


def factored_moments(volume: Volume, order: int, counters: OpCounters | None = None) -> MomentTensor3:
    """Row/slice/volume factored accumulation, OpenCV-style.

    Per x-row the K weighted sums sum(v * x**p) are formed (K multiplies per
    voxel); rows combine with y powers per slice, slices with z powers per
    volume.  Exactly equal to naive_moments.
    """
    _check_order(order)
    v = volume.voxels
    n, m, l = v.shape
    vmax = int(np.iinfo(v.dtype).max)
    xp = index_powers(l, order)
    yq = index_powers(m, order)
    zpow = index_powers(n, order)
    sx = [_power_sum(l, k) for k in range(order + 1)]
    sy = [_power_sum(m, k) for k in range(order + 1)]
    if vmax * sx[order] > INT64_MAX:
        raise OverflowError(
            f"factored row accumulator would overflow at dims {volume.dims}, "
            f"{volume.bit_depth}-bit, order {order}")

    pq_pairs = [(p, q) for p in range(order + 1) for q in range(order + 1 - p)]
    slice_bounds = {(p, q): vmax * sx[p] * sy[q] for (p, q) in pq_pairs}
    chunked = any(b > INT64_MAX for b in slice_bounds.values())
    slice_sums = {pq: np.zeros(n, dtype=object if chunked else np.int64) for pq in pq_pairs}

    for z in range(n):
        slab64 = v[z].astype(np.int64)
        rows = np.empty((m, order + 1), dtype=np.int64)
        rows[:, 0] = slab64.sum(axis=1)
        rows[:, 1:] = slab64 @ xp[:, 1:]
        for p in range(order + 1):
            cols = order + 1 - p
            if not chunked:
                combined = rows[:, p] @ yq[:, :cols]
                for q in range(cols):
                    slice_sums[(p, q)][z] = combined[q]
            else:
                for q in range(cols):
                    slice_sums[(p, q)][z] = exact_dot(
                        rows[:, p], yq[:, q], vmax * sx[p] * m, max(1, (m - 1) ** q))
    if counters is not None:
        counters.multiplications += order * v.size + len(pq_pairs) * m * n
        counters.additions += (order + 1) * v.size + len(pq_pairs) * m * n

    values: dict[tuple[int, int, int], int] = {}
    for (p, q, r) in moment_indices(order):
        ss = slice_sums[(p, q)]
        if ss.dtype == object:
            values[(p, q, r)] = sum(int(s) * z**r for z, s in enumerate(ss))
        else:
            values[(p, q, r)] = exact_dot(ss, zpow[:, r], slice_bounds[(p, q)] * n,
                                          max(1, (n - 1) ** r))
    if counters is not None:
        counters.multiplications += len(values) * n
        counters.additions += len(values) * n
    return MomentTensor3(order, values)


def _cross_axis_moments(diag_m: drt2d.Moments2D, anti_m: drt2d.Moments2D | None,
                        axis: dict[tuple[int, int, int], int], order: int) -> dict:
    """The moments that need all three axes, from the +-45 degree images.

    Expanding sum V * (x+z)**p * y**q of the diagonal image (and the
    anti-diagonal one, about its logical origin) and cancelling the
    axis-plane terms isolates them; see docs/mixed_moment_derivation.md for
    the algebra and the oracle-pinned association of the sum/difference
    forms.  All divisions are exact by construction.
    """
    div = drt2d._exact_div
    out = {
        (1, 1, 1): div(diag_m[(2, 1)] - axis[(2, 1, 0)] - axis[(0, 1, 2)], 2, "M111"),
    }
    if order >= 4:
        assert anti_m is not None
        out[(1, 2, 1)] = div(diag_m[(2, 2)] - axis[(2, 2, 0)] - axis[(0, 2, 2)], 2, "M121")
        out[(2, 1, 1)] = div(diag_m[(3, 1)] - anti_m[(3, 1)] - 2 * axis[(0, 1, 3)], 6, "M211")
        out[(1, 1, 2)] = div(diag_m[(3, 1)] + anti_m[(3, 1)] - 2 * axis[(3, 1, 0)], 6, "M112")
    return out


def _place(values: dict, key: tuple[int, int, int], value: int, source: str,
           check: bool) -> None:
    if key not in values:
        values[key] = value
    elif check and values[key] != value:
        raise InconsistencyError(
            f"projection routes disagree at {key}: stored {values[key]}, {source} got {value}")


def dpm_moments(volume: Volume, order: int, counters: OpCounters | None = None,
                check_consistency: bool = True) -> MomentTensor3:
    """Projection-based engine: all moments from five (four at order 3) 2D images.

    Pipeline: project -> 1D integrals -> 1D moments -> 2D moments -> 3D
    assembly.  Only the 1D moment stage multiplies, and it touches Theta(n)
    values, which is the whole point.  When ``check_consistency`` is set,
    every moment reachable through two projections is asserted equal.
    """
    _check_order(order)
    wanted = [Orientation.XY, Orientation.YZ, Orientation.ZX, Orientation.DIAG]
    if order >= 4:
        wanted.append(Orientation.ANTI)
    images = project_subset(volume, tuple(wanted), counters)

    m2d = {
        o: drt2d.assemble_2d(drt2d.integrals(images[o], order, counters), order, counters)
        for o in wanted
    }
    anti_logical = None
    if order >= 4:
        anti_logical = drt2d.shift_origin(m2d[Orientation.ANTI], m2d[Orientation.ANTI].origin_offset)

    values: dict[tuple[int, int, int], int] = {}
    for (p, q), val in m2d[Orientation.XY].values.items():
        _place(values, (p, q, 0), val, "xy", check_consistency)
    for (p, q), val in m2d[Orientation.YZ].values.items():
        _place(values, (0, p, q), val, "yz", check_consistency)
    for (p, q), val in m2d[Orientation.ZX].values.items():
        _place(values, (q, 0, p), val, "zx", check_consistency)

    values.update(_cross_axis_moments(m2d[Orientation.DIAG], anti_logical, values, order))
    return MomentTensor3(order, {k: values[k] for k in moment_indices(order)})


ENGINES = {
    "naive": naive_moments,
    "factored": factored_moments,
    "dpm": dpm_moments,
}


def count_ops(engine: str, volume: Volume, order: int) -> OpCounters:
    """Run an engine with instrumentation and return its operation tallies."""
    counters = OpCounters()
    ENGINES[engine](volume, order, counters)
    return counters
