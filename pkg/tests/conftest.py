"""Shared brute-force oracles, deliberately independent of the library's fast paths."""

from __future__ import annotations

import numpy as np
import pytest

from volmoments import Orientation, Volume


def oracle_project(volume: Volume, orientation: Orientation) -> np.ndarray:
    """Triple-loop projection oracle; returns stored pixels[j, i] as int64."""
    v = volume.voxels
    n, m, l = v.shape
    if orientation is Orientation.XY:
        out = np.zeros((m, l), np.int64)
    elif orientation is Orientation.YZ:
        out = np.zeros((n, m), np.int64)
    elif orientation is Orientation.ZX:
        out = np.zeros((l, n), np.int64)
    else:
        out = np.zeros((m, l + n - 1), np.int64)
    for z in range(n):
        for y in range(m):
            for x in range(l):
                val = int(v[z, y, x])
                if orientation is Orientation.XY:
                    out[y, x] += val
                elif orientation is Orientation.YZ:
                    out[z, y] += val
                elif orientation is Orientation.ZX:
                    out[x, z] += val
                elif orientation is Orientation.DIAG:
                    out[y, x + z] += val
                else:
                    out[y, x - z + n - 1] += val
    return out


def oracle_moments_3d(volume: Volume, order: int) -> dict[tuple[int, int, int], int]:
    """Pure-Python triple loop over voxels, arbitrary precision."""
    v = volume.voxels
    n, m, l = v.shape
    out: dict[tuple[int, int, int], int] = {}
    for p in range(order + 1):
        for q in range(order + 1 - p):
            for r in range(order + 1 - p - q):
                acc = 0
                for z in range(n):
                    for y in range(m):
                        for x in range(l):
                            acc += int(v[z, y, x]) * x**p * y**q * z**r
                out[(p, q, r)] = acc
    return out


def oracle_moments_2d(pixels: np.ndarray, order: int = 4) -> dict[tuple[int, int], int]:
    """Pure-Python double loop over pixels[j, i]."""
    h, w = pixels.shape
    out: dict[tuple[int, int], int] = {}
    for p in range(order + 1):
        for q in range(order + 1 - p):
            out[(p, q)] = sum(
                int(pixels[j, i]) * i**p * j**q for j in range(h) for i in range(w))
    return out


def rotated_ellipsoid(dims, center, semi_axes, angle_deg, value=1):
    """Solid ellipsoid rotated about the z axis, rasterized on voxel centers."""
    l, m, n = dims
    cx, cy, cz = center
    a, b, c = semi_axes
    th = np.radians(angle_deg)
    x = (np.arange(l) - cx)[None, None, :]
    y = (np.arange(m) - cy)[None, :, None]
    z = (np.arange(n) - cz)[:, None, None]
    u = np.cos(th) * x + np.sin(th) * y
    w = -np.sin(th) * x + np.cos(th) * y
    inside = (u / a) ** 2 + (w / b) ** 2 + (z / c) ** 2 <= 1.0
    return Volume(np.where(inside, value, 0).astype(np.uint8))


def relabel_cyclic(volume: Volume) -> Volume:
    """Relabel axes (x, y, z) -> (y, z, x): V'(a, b, c) = V(c, a, b).

    In [z, y, x] array terms: voxels'[c, b, a] = voxels[b, a, c].
    """
    return Volume(np.ascontiguousarray(volume.voxels.transpose(2, 0, 1)), volume.spacing)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
