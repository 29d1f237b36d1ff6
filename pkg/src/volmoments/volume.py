"""Volume data model, raw/NRRD ingestion, and synthetic volume generators.

A volume is a dense grid of unsigned integer intensities (8 or 16 bit) laid
out x-fastest: voxel (x, y, z) lives at flat offset x + L*(y + M*z).  The
backing numpy array is therefore indexed ``voxels[z, y, x]`` in C order.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError

_DTYPES = {8: np.dtype("<u1"), 16: np.dtype("<u2")}


@dataclass(frozen=True, eq=False)
class Volume:
    """Immutable 3D voxel grid with physical spacing.

    voxels  -- uint8 or uint16 array of shape (N, M, L), i.e. [z, y, x]
    spacing -- physical units per voxel along (x, y, z); all > 0
    """

    voxels: np.ndarray
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        if self.voxels.ndim != 3:
            raise ValueError(f"voxel grid must be 3D, got {self.voxels.ndim}D")
        if self.voxels.dtype not in (np.uint8, np.uint16):
            raise ValueError(f"unsupported voxel dtype {self.voxels.dtype}; use uint8 or uint16")
        if len(self.spacing) != 3 or any(s <= 0 for s in self.spacing):
            raise ValueError(f"spacing components must be > 0, got {self.spacing}")
        self.voxels.setflags(write=False)

    @property
    def dims(self) -> tuple[int, int, int]:
        """(L, M, N) voxel counts along x, y, z."""
        n, m, l = self.voxels.shape
        return (l, m, n)

    @property
    def bit_depth(self) -> int:
        return 8 if self.voxels.dtype == np.uint8 else 16

    @property
    def mass(self) -> int:
        """Total intensity, exact."""
        return int(self.voxels.sum(dtype=np.int64))


@dataclass
class VolumeMeta:
    """Sidecar description of a raw volume file."""

    dims: tuple[int, int, int]
    bit_depth: int
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)
    byte_order: str = "little"
    source: str = ""

    def __post_init__(self):
        if self.bit_depth not in _DTYPES:
            raise FormatError(f"unsupported bit depth {self.bit_depth}; expected 8 or 16")
        if self.byte_order != "little":
            raise FormatError(f"unsupported byte order {self.byte_order!r}; raw files are little-endian")
        if len(self.dims) != 3 or any(d < 1 for d in self.dims):
            raise FormatError(f"dims must be three positive integers, got {self.dims}")


def meta_from_header_file(path: str | Path) -> VolumeMeta:
    """Parse a small ``key = value`` sidecar file into a VolumeMeta.

    Recognised keys: dims (L,M,N), depth, spacing (x,y,z), byte_order, data.
    """
    fields: dict[str, str] = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise FormatError(f"malformed header line {line!r} in {path}")
        key, value = line.split("=", 1)
        fields[key.strip().lower()] = value.strip()
    try:
        dims = tuple(int(d) for d in fields["dims"].replace(",", " ").split())
        depth = int(fields["depth"])
    except KeyError as exc:
        raise FormatError(f"header file {path} is missing required key {exc}") from exc
    spacing = (1.0, 1.0, 1.0)
    if "spacing" in fields:
        spacing = tuple(float(s) for s in fields["spacing"].replace(",", " ").split())
    return VolumeMeta(
        dims=dims,  # type: ignore[arg-type]
        bit_depth=depth,
        spacing=spacing,  # type: ignore[arg-type]
        byte_order=fields.get("byte_order", "little"),
        source=fields.get("data", str(path)),
    )


def load_raw(path: str | Path, meta: VolumeMeta) -> Volume:
    """Load a headerless little-endian raw volume described by ``meta``."""
    l, m, n = meta.dims
    dtype = _DTYPES[meta.bit_depth]
    expected = l * m * n * dtype.itemsize
    data = Path(path).read_bytes()
    if len(data) != expected:
        raise FormatError(
            f"{path}: file holds {len(data)} bytes but dims {meta.dims} at "
            f"{meta.bit_depth}-bit require {expected}"
        )
    voxels = np.frombuffer(data, dtype=dtype).reshape(n, m, l)
    return Volume(voxels=voxels, spacing=meta.spacing)


def write_raw(volume: Volume, path: str | Path) -> None:
    """Write the voxel buffer in flat x-fastest little-endian order."""
    Path(path).write_bytes(volume.voxels.astype(_DTYPES[volume.bit_depth]).tobytes())


_NRRD_TYPES = {
    "uchar": 8, "unsigned char": 8, "uint8": 8, "uint8_t": 8,
    "ushort": 16, "unsigned short": 16, "uint16": 16, "uint16_t": 16,
}


def load_nrrd(path: str | Path) -> Volume:
    """Load the supported NRRD subset: 3D, uchar/ushort, raw encoding.

    Both attached and detached (``data file:``) layouts are handled.  NRRD
    ``spacings`` map onto the volume's (x, y, z) physical spacing; sizes are
    fastest-axis-first, matching this package's (L, M, N).
    """
    path = Path(path)
    raw = path.read_bytes()
    magic_end = raw.find(b"\n")
    if magic_end < 0 or not raw[:magic_end].startswith(b"NRRD"):
        raise FormatError(f"{path}: missing NRRD magic")
    header_end = raw.find(b"\n\n")
    if header_end < 0:
        raise FormatError(f"{path}: header is not terminated by a blank line")
    fields: dict[str, str] = {}
    for line in raw[magic_end + 1:header_end].decode("ascii", "replace").splitlines():
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise FormatError(f"{path}: malformed header line {line!r}")
        key, value = line.split(":", 1)
        fields[key.strip().lower()] = value.lstrip("=").strip()

    if fields.get("dimension") != "3":
        raise FormatError(f"{path}: unsupported header field dimension: {fields.get('dimension')!r} (need 3)")
    type_name = fields.get("type", "")
    if type_name not in _NRRD_TYPES:
        raise FormatError(f"{path}: unsupported header field type: {type_name!r}")
    if fields.get("encoding") != "raw":
        raise FormatError(f"{path}: unsupported header field encoding: {fields.get('encoding')!r}")
    if fields.get("endian", "little") == "big":
        raise FormatError(f"{path}: unsupported header field endian: 'big'")
    try:
        sizes = tuple(int(s) for s in fields["sizes"].split())
    except KeyError:
        raise FormatError(f"{path}: missing header field sizes") from None
    if len(sizes) != 3:
        raise FormatError(f"{path}: header field sizes must have 3 entries, got {fields['sizes']!r}")

    spacing = (1.0, 1.0, 1.0)
    if "spacings" in fields:
        parts = [float(s) for s in fields["spacings"].split()]
        if len(parts) != 3:
            raise FormatError(f"{path}: header field spacings must have 3 entries")
        spacing = tuple(parts)  # type: ignore[assignment]

    depth = _NRRD_TYPES[type_name]
    if "data file" in fields or "datafile" in fields:
        data_name = fields.get("data file", fields.get("datafile", ""))
        data = (path.parent / data_name).read_bytes()
    else:
        data = raw[header_end + 2:]

    l, m, n = sizes
    dtype = _DTYPES[depth]
    expected = l * m * n * dtype.itemsize
    if len(data) != expected:
        raise FormatError(
            f"{path}: data holds {len(data)} bytes but sizes {sizes} at {depth}-bit require {expected}"
        )
    voxels = np.frombuffer(data, dtype=dtype).reshape(n, m, l)
    return Volume(voxels=voxels, spacing=spacing)


# --- synthetic volumes -----------------------------------------------------

def uniform(dims: tuple[int, int, int], value: int = 1, *,
            spacing=(1.0, 1.0, 1.0), bit_depth: int = 8) -> Volume:
    l, m, n = dims
    dtype = _DTYPES[bit_depth]
    if not 0 <= value <= np.iinfo(dtype).max:
        raise ValueError(f"value {value} does not fit {bit_depth}-bit intensities")
    return Volume(np.full((n, m, l), value, dtype=dtype), spacing)


def delta(dims: tuple[int, int, int], position: tuple[int, int, int], value: int = 1, *,
          spacing=(1.0, 1.0, 1.0), bit_depth: int = 8) -> Volume:
    """Single voxel of ``value`` at (x0, y0, z0), zeros elsewhere."""
    l, m, n = dims
    x0, y0, z0 = position
    if not (0 <= x0 < l and 0 <= y0 < m and 0 <= z0 < n):
        raise ValueError(f"delta position {position} outside dims {dims}")
    grid = np.zeros((n, m, l), dtype=_DTYPES[bit_depth])
    grid[z0, y0, x0] = value
    return Volume(grid, spacing)


def random(dims: tuple[int, int, int], bit_depth: int = 8, seed: int = 0, *,
           spacing=(1.0, 1.0, 1.0)) -> Volume:
    """Seed-deterministic uniform random intensities over the full bit range."""
    l, m, n = dims
    dtype = _DTYPES[bit_depth]
    rng = np.random.default_rng(seed)
    grid = rng.integers(0, np.iinfo(dtype).max + 1, size=(n, m, l), dtype=dtype)
    return Volume(grid, spacing)


def ellipsoid(dims: tuple[int, int, int], center: tuple[float, float, float],
              semi_axes: tuple[float, float, float], value: int = 1, *,
              spacing=(1.0, 1.0, 1.0), bit_depth: int = 8) -> Volume:
    """Solid ellipsoid: voxels whose centers satisfy the implicit inequality."""
    l, m, n = dims
    cx, cy, cz = center
    a, b, c = semi_axes
    x = (np.arange(l) - cx) / a
    y = (np.arange(m) - cy) / b
    z = (np.arange(n) - cz) / c
    inside = (z[:, None, None] ** 2 + y[None, :, None] ** 2 + x[None, None, :] ** 2) <= 1.0
    grid = np.where(inside, value, 0).astype(_DTYPES[bit_depth])
    return Volume(grid, spacing)


def synth(kind: str, dims: tuple[int, int, int], seed: int = 0, *,
          spacing=(1.0, 1.0, 1.0)) -> Volume:
    """Build a synthetic volume from a descriptor string.

    Descriptors: ``uniform:V``, ``delta:X,Y,Z,V``, ``random:BITDEPTH``,
    ``ellipsoid:CX,CY,CZ,A,B,C,V``.  ``seed`` only affects ``random``.
    """
    name, _, arg = kind.partition(":")
    try:
        if name == "uniform":
            return uniform(dims, int(arg or 1), spacing=spacing)
        if name == "delta":
            x0, y0, z0, v = (int(p) for p in arg.split(","))
            return delta(dims, (x0, y0, z0), v, spacing=spacing)
        if name == "random":
            return random(dims, int(arg or 8), seed, spacing=spacing)
        if name == "ellipsoid":
            parts = [float(p) for p in arg.split(",")]
            cx, cy, cz, a, b, c = parts[:6]
            v = int(parts[6]) if len(parts) > 6 else 1
            return ellipsoid(dims, (cx, cy, cz), (a, b, c), v, spacing=spacing)
    except ValueError as exc:
        if "outside dims" in str(exc) or "does not fit" in str(exc):
            raise
        raise ValueError(f"malformed synth descriptor {kind!r}") from exc
    raise ValueError(f"unknown synth kind {name!r}")
