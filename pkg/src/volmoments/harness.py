"""Cross-engine verification, the benchmark sweep, and report shaping."""

from __future__ import annotations

import io
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import features, moments3d, volume as vol
from .moments3d import MomentTensor3


# --- feature report ---------------------------------------------------------

def _moment_key(pqr: tuple[int, int, int]) -> str:
    return "".join(str(i) for i in pqr)


def feature_report(v: vol.Volume, order: int, engine: str,
                   spacing: tuple[float, float, float] | None = None) -> dict:
    """Moments plus derived features as a deterministic JSON-ready dict.

    Keys iterate in lexicographic (p, q, r) order and no timestamps are
    included, so equal inputs produce byte-identical serialized reports.
    """
    tensor = moments3d.ENGINES[engine](v, order)
    cm = features.central_moments(tensor)
    eta = features.normalize_scale(cm)
    report = {
        "input": {
            "dims": list(v.dims),
            "bit_depth": v.bit_depth,
            "spacing": list(spacing if spacing is not None else v.spacing),
        },
        "engine": engine,
        "order": order,
        "raw_moments": {_moment_key(k): val for k, val in tensor.items()},
        "centroid": list(cm.centroid),
        "central_moments": {_moment_key(k): cm.mu[k] for k in moments3d.moment_indices(order)},
        "normalized_moments": {_moment_key(k): eta[k] for k in moments3d.moment_indices(order)},
    }
    use_spacing = spacing if spacing is not None else v.spacing
    if tuple(use_spacing) != (1.0, 1.0, 1.0):
        physical = features.apply_spacing(cm, *use_spacing)
        report["physical_central_moments"] = {
            _moment_key(k): physical.mu[k] for k in moments3d.moment_indices(order)
        }
    shape = features.shape_features(cm)
    report["shape"] = {
        "covariance": [[float(x) for x in row] for row in shape.covariance],
        "eigenvalues": list(shape.eigenvalues),
        "principal_axes": [[float(x) for x in row] for row in shape.axes],
        "elongation": list(shape.elongation),
        "radius_of_gyration": shape.radius_of_gyration,
    }
    return report


# --- cross-engine verification ----------------------------------------------

@dataclass
class Divergence:
    seed: int
    order: int
    index: tuple[int, int, int]
    values: dict[str, int]

    def describe(self) -> str:
        vals = ", ".join(f"{e}={v}" for e, v in sorted(self.values.items()))
        return (f"seed {self.seed} order {self.order}: engines disagree at "
                f"(p,q,r)=({self.index[0]},{self.index[1]},{self.index[2]}): {vals}")


@dataclass
class VerifyResult:
    dims: tuple[int, int, int]
    orders: tuple[int, ...]
    seeds: int
    checked: int = 0
    divergences: list[Divergence] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.divergences


def first_divergence(tensors: dict[str, MomentTensor3]) -> tuple[tuple[int, int, int], dict] | None:
    """Lowest (p,q,r) where any engine disagrees with the rest, or None."""
    engines = sorted(tensors)
    reference = tensors[engines[0]]
    for key, ref_val in reference.items():
        got = {e: tensors[e][key] for e in engines}
        if any(v != ref_val for v in got.values()):
            return key, got
    return None


def verify_engines(dims: tuple[int, int, int], seeds: int, orders: tuple[int, ...] = (3, 4),
                   bit_depth: int = 8, max_voxels: int = 128**3) -> VerifyResult:
    """Run all three engines over seeded random volumes and compare exactly.

    ``max_voxels`` bounds the requested size (default 128**3), keeping the
    run inside the regime where the exhaustive comparison is quick.
    """
    l, m, n = dims
    if l * m * n > max_voxels:
        raise ValueError(f"dims {dims} exceed the verification bound of {max_voxels} voxels")
    result = VerifyResult(dims, tuple(orders), seeds)
    for seed in range(seeds):
        v = vol.random(dims, bit_depth, seed)
        for order in orders:
            tensors = {name: moments3d.ENGINES[name](v, order) for name in moments3d.ENGINES}
            result.checked += 1
            div = first_divergence(tensors)
            if div is not None:
                result.divergences.append(Divergence(seed, order, div[0], div[1]))
    return result


# --- benchmark sweep ---------------------------------------------------------

BENCH_COLUMNS = ("size_mb", "size_bytes", "dims", "engine", "order",
                 "best_ms", "median_ms", "multiplications", "additions")


@dataclass
class BenchRow:
    size_mb: int
    size_bytes: int
    dims: str
    engine: str
    order: int
    best_ms: float
    median_ms: float
    multiplications: int
    additions: int


@dataclass
class BenchReport:
    rows: list[BenchRow]
    environment: dict
    notes: list[str] = field(default_factory=list)


def _cpu_description() -> str:
    try:
        with open("/proc/cpuinfo") as fh:
            for line in fh:
                if line.lower().startswith("model name"):
                    name = line.split(":", 1)[1].strip()
                    if name and name != "unknown":
                        return name
    except OSError:
        pass
    import platform
    return platform.processor() or platform.machine() or "unknown"


def _available_memory_bytes() -> int | None:
    try:
        with open("/proc/meminfo") as fh:
            for line in fh:
                if line.startswith("MemAvailable:"):
                    return int(line.split()[1]) * 1024
    except (OSError, ValueError, IndexError):
        pass
    return None


def cube_side(size_mb: int) -> int:
    return round((size_mb * 2**20) ** (1 / 3))


def sweep_sizes(max_size_mb: int, min_size_mb: int = 1) -> list[int]:
    sizes = []
    mb = min_size_mb
    while mb <= max_size_mb:
        sizes.append(mb)
        mb *= 2
    return sizes


def _time_best_of(fn, repetitions: int, min_sample_s: float = 0.05) -> tuple[float, float]:
    """(best, median) seconds per call, best of ``repetitions`` samples.

    A warm-up call is discarded, then each timed sample loops the call
    enough times to span ``min_sample_s`` so that millisecond-scale cells
    are not at the mercy of scheduler noise; the fastest sample is kept.
    """
    t0 = time.perf_counter()
    fn()
    once = time.perf_counter() - t0
    number = max(1, int(min_sample_s / once) if once > 0 else 1)
    times = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        for _ in range(number):
            fn()
        times.append((time.perf_counter() - t0) / number)
    return min(times), float(np.median(times))


def run_bench(max_size_mb: int = 128, orders: tuple[int, ...] = (3, 4),
              repetitions: int = 9, seed: int = 0, min_size_mb: int = 1,
              engines: tuple[str, ...] = ("naive", "factored", "dpm"),
              count_ops: bool = True, progress=None) -> BenchReport:
    """Best-of-R timing sweep over doubling sizes, one row per cell.

    Each engine gets one untimed warm-up before the R timed samples (small
    cells loop several calls per sample); counters come from a separate
    instrumented pass so timing carries no counting overhead.  Volumes are
    seeded 8-bit random cubes.  Rows whose volume plus working set would
    not fit in available memory are skipped with a note and the sweep
    continues.
    """
    report = BenchReport(rows=[], environment={
        "cpu": _cpu_description(),
        "repetitions": repetitions,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "seed": seed,
    })
    warm = vol.random((48, 48, 48), 8, seed)
    for engine in engines:
        for order in orders:
            moments3d.ENGINES[engine](warm, order)
    for idx, size_mb in enumerate(sweep_sizes(max_size_mb, min_size_mb)):
        side = cube_side(size_mb)
        needed = side**3 * 10  # volume + int64 working copies, generous
        available = _available_memory_bytes()
        if available is not None and needed > available:
            report.notes.append(
                f"skipped {size_mb} MB: needs ~{needed >> 20} MiB, {available >> 20} MiB available")
            continue
        v = vol.random((side, side, side), 8, seed + idx)
        for engine in engines:
            fn = moments3d.ENGINES[engine]
            for order in orders:
                if progress:
                    progress(f"{size_mb} MB {engine} order {order}")
                best_s, median_s = _time_best_of(lambda: fn(v, order), repetitions)
                if count_ops:
                    counters = moments3d.count_ops(engine, v, order)
                    muls, adds = counters.multiplications, counters.additions
                else:
                    muls = adds = 0
                report.rows.append(BenchRow(
                    size_mb=size_mb,
                    size_bytes=side**3,
                    dims=f"{side}x{side}x{side}",
                    engine=engine,
                    order=order,
                    best_ms=best_s * 1e3,
                    median_ms=median_s * 1e3,
                    multiplications=muls,
                    additions=adds,
                ))
    return report


def bench_csv(report: BenchReport) -> str:
    """Fixed-schema CSV of the sweep rows (the machine artifact)."""
    out = io.StringIO()
    out.write(",".join(BENCH_COLUMNS) + "\n")
    for r in report.rows:
        out.write(f"{r.size_mb},{r.size_bytes},{r.dims},{r.engine},{r.order},"
                  f"{r.best_ms:.4f},{r.median_ms:.4f},{r.multiplications},{r.additions}\n")
    return out.getvalue()


def bench_markdown(report: BenchReport) -> str:
    """Human-facing table: rows are sizes, columns engine x order best times."""
    engines = []
    for r in report.rows:
        if r.engine not in engines:
            engines.append(r.engine)
    orders = sorted({r.order for r in report.rows})
    cells = {(r.size_mb, r.engine, r.order): r for r in report.rows}
    sizes = sorted({r.size_mb for r in report.rows})

    lines = [
        f"CPU: {report.environment['cpu']}  |  best of {report.environment['repetitions']} "
        f"runs  |  {report.environment['timestamp']}",
        "",
        "| Size (MB) | " + " | ".join(f"{e} {o}th (ms)" for e in engines for o in orders) + " |",
        "|---:|" + "---:|" * (len(engines) * len(orders)),
    ]
    for size in sizes:
        row = [f"| {size} "]
        for e in engines:
            for o in orders:
                cell = cells.get((size, e, o))
                row.append(f"| {cell.best_ms:.2f} " if cell else "| - ")
        lines.append("".join(row) + "|")
    for note in report.notes:
        lines.append(f"\n_{note}_")
    return "\n".join(lines) + "\n"


def bench_json(report: BenchReport) -> dict:
    return {
        "environment": report.environment,
        "columns": list(BENCH_COLUMNS),
        "rows": [
            {c: getattr(r, c) for c in BENCH_COLUMNS}
            for r in report.rows
        ],
        "notes": report.notes,
    }
