"""Discrete 2D projections of a volume along voxel-aligned directions.

Five orientations are supported; each collapses the volume onto a 2D
accumulator image by pure integer addition (no interpolation, no
multiplication):

    XY    (theta=0,     phi=0)    (i, j) = (x, y)        size L x M
    YZ    (theta=0,     phi=pi/2) (i, j) = (y, z)        size M x N
    ZX    (theta=pi/2,  phi=0)    (i, j) = (z, x)        size N x L
    DIAG  (theta=pi/4,  phi=0)    (i, j) = (x + z, y)    size (L+N-1) x M
    ANTI  (theta=-pi/4, phi=0)    (i, j) = (x - z, y)    size (L+N-1) x M

ANTI's logical first index x - z can be negative, so the image stores it at
i + origin_offset with origin_offset = N - 1.  Pixels are stored image-style
as ``pixels[j, i]`` (height, width).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import scratch
from .counters import OpCounters
from .volume import Volume


class Orientation(enum.Enum):
    XY = "xy"
    YZ = "yz"
    ZX = "zx"
    DIAG = "diag"
    ANTI = "anti"


#: (theta, phi) rotation angles, in radians, for each orientation tag.
ANGLES = {
    Orientation.XY: (0.0, 0.0),
    Orientation.YZ: (0.0, np.pi / 2),
    Orientation.ZX: (np.pi / 2, 0.0),
    Orientation.DIAG: (np.pi / 4, 0.0),
    Orientation.ANTI: (-np.pi / 4, 0.0),
}


@dataclass(frozen=True, eq=False)
class ProjectionImage:
    """2D integer accumulator image tagged with its orientation.

    ``pixels[j, i]`` holds the ray sum at image coordinates (i, j); the
    first *logical* index along i starts at ``origin_offset`` (nonzero only
    for ANTI).  Accumulators are int64: the worst ray sum is bounded by
    max_intensity * max(L, M, N) <= 2**26, and total mass by 2**47.
    """

    orientation: Orientation
    pixels: np.ndarray
    origin_offset: int = 0

    def __post_init__(self):
        self.pixels.setflags(write=False)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def mass(self) -> int:
        return int(self.pixels.sum())


@dataclass(frozen=True)
class ProjectionSet:
    """The five projections of one volume; all share the volume's mass."""

    xy: ProjectionImage
    yz: ProjectionImage
    zx: ProjectionImage
    diag: ProjectionImage
    anti: ProjectionImage

    def __getitem__(self, orientation: Orientation) -> ProjectionImage:
        return getattr(self, orientation.value)


_SHEAR_CHUNK = 64


class _ShearBuffer:
    """Zero-padded buffer that turns diagonal sums into column sums.

    A chunk of C slabs is copied, unshifted, into rows of width L + C - 1
    padded with zeros (plus C - 1 leading zeros before the buffer body).
    Reading the buffer back with a z-stride one element short of a full
    plane shifts slab k right by k columns; one element long shifts it
    left.  Column sums of those views are then the diagonal/anti-diagonal
    projections of the chunk:

        dview[k, y, c] = chunk(x = c - k, y, k)
        aview[k, y, c] = chunk(x = c + k - (C - 1), y, k)

    Out-of-range x always lands in zero padding inside the buffer (the
    views' largest offsets stay short of the rows they would overrun), so
    the sums are exact.  The padding is zeroed on allocation and chunk
    copies only ever overwrite the slab region, so the thread-local backing
    buffer is safely reused across chunks and calls.
    """

    def __init__(self, chunk: int, m: int, l: int, dtype):
        self.chunk = chunk
        wb = l + chunk - 1
        flat = scratch.buffer("projection.shear", (chunk * m * wb + (chunk - 1),),
                              dtype, zeroed=True, key=(chunk, m, l))
        self.body = flat[chunk - 1:].reshape(chunk, m, wb)
        it = flat.itemsize
        self.dview = np.lib.stride_tricks.as_strided(
            flat[chunk - 1:], shape=(chunk, m, wb), strides=((m * wb - 1) * it, wb * it, it))
        self.aview = np.lib.stride_tricks.as_strided(
            flat, shape=(chunk, m, wb), strides=((m * wb + 1) * it, wb * it, it))

    def load(self, slabs: np.ndarray) -> int:
        cc = slabs.shape[0]
        self.body[:cc, :, :slabs.shape[2]] = slabs
        return cc

    def diag_sum(self, cc: int) -> np.ndarray:
        return self.dview[:cc].sum(axis=0, dtype=np.int32)

    def anti_sum(self, cc: int) -> np.ndarray:
        return self.aview[:cc].sum(axis=0, dtype=np.int32)


def _accumulate(volume: Volume, wanted: tuple[Orientation, ...],
                counters: OpCounters | None) -> dict[Orientation, np.ndarray]:
    """Accumulate every requested projection image by pure addition.

    Ray sums fit int32 for every supported volume (<= 2**26), so the hot
    reductions run in int32 and the caller widens to int64.  The diagonal
    pair is accumulated chunk-of-slabs at a time through a shear buffer;
    integer addition is associative, so the result is bit-identical to
    voxel-at-a-time accumulation.
    """
    v = volume.voxels
    n, m, l = v.shape
    out: dict[Orientation, np.ndarray] = {}
    if Orientation.XY in wanted:
        out[Orientation.XY] = v.sum(axis=0, dtype=np.int32)
    if Orientation.YZ in wanted:
        out[Orientation.YZ] = np.einsum("zyx->zy", v, dtype=np.int32)
    if Orientation.ZX in wanted:
        # stored [j=x, i=z]; einsum emits the transposed layout directly
        out[Orientation.ZX] = np.einsum("zyx->xz", v, dtype=np.int32)
    if Orientation.DIAG in wanted or Orientation.ANTI in wanted:
        w = l + n - 1
        chunk = min(_SHEAR_CHUNK, n)
        buf = _ShearBuffer(chunk, m, l, v.dtype)
        di = an = None
        if Orientation.DIAG in wanted:
            di = scratch.buffer("projection.diag", (m, w), np.int32)
            di.fill(0)
        if Orientation.ANTI in wanted:
            an = scratch.buffer("projection.anti", (m, w), np.int32)
            an.fill(0)
        for z0 in range(0, n, chunk):
            cc = buf.load(v[z0:z0 + chunk])
            span = l + cc - 1
            if di is not None:
                # chunk-local column c holds diagonal index z0 + c
                di[:, z0:z0 + span] += buf.diag_sum(cc)[:, :span]
            if an is not None:
                # chunk-local column c holds stored index c - (chunk-1) + (n-1) - z0 - (cc-1)
                lo = chunk - cc
                an[:, n - cc - z0:n - cc - z0 + span] += buf.anti_sum(cc)[:, lo:lo + span]
        if di is not None:
            out[Orientation.DIAG] = di
        if an is not None:
            out[Orientation.ANTI] = an
    if counters is not None:
        counters.additions += len(wanted) * v.size
    return out


def _wrap(volume: Volume, orientation: Orientation, grid: np.ndarray) -> ProjectionImage:
    offset = volume.dims[2] - 1 if orientation is Orientation.ANTI else 0
    return ProjectionImage(orientation, grid.astype(np.int64), offset)


def project(volume: Volume, orientation: Orientation) -> ProjectionImage:
    """Project a volume along one orientation."""
    grids = _accumulate(volume, (orientation,), None)
    return _wrap(volume, orientation, grids[orientation])


def project_all(volume: Volume, counters: OpCounters | None = None) -> ProjectionSet:
    """All five projections in a single pass over the voxels."""
    grids = _accumulate(volume, tuple(Orientation), counters)
    return ProjectionSet(*(_wrap(volume, o, grids[o]) for o in Orientation))


def project_subset(volume: Volume, wanted: tuple[Orientation, ...],
                   counters: OpCounters | None = None) -> dict[Orientation, ProjectionImage]:
    """Single-pass projection of just the requested orientations."""
    grids = _accumulate(volume, wanted, counters)
    return {o: _wrap(volume, o, grids[o]) for o in wanted}


def write_pgm(image: ProjectionImage, path) -> None:
    """Dump an image as 16-bit binary PGM, rescaled to full range.

    The applied scale factor is recorded in a comment line so intensities
    remain recoverable.
    """
    peak = int(image.pixels.max()) if image.pixels.size else 0
    scale = 65535.0 / peak if peak > 0 else 1.0
    scaled = np.round(image.pixels * scale).astype(">u2")
    header = (
        f"P5\n# volmoments {image.orientation.value} projection, scale={scale!r}\n"
        f"{image.width} {image.height}\n65535\n"
    )
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(scaled.tobytes())
