"""Bit-exact binary container for scenario and prediction files.

Fixed little-endian layout with no padding or compression so files parse
identically from any language.

Scenario file::

    magic "SPCM" | u8 version=1 | u32 record_count | u32 N | u32 K_plus_1
    | K_plus_1 x f32 frequencies_mhz | u8 target_index
    then per record:
    u64 scene_id | f32 density | u64 seed
    | f32 truth cube   (layer-major, then row-major)
    | f32 observed cube (same order)
    | u8 building map (N*N) | u8 receiver map (N*N)

Prediction file::

    magic "SPCP" | u8 version=1 | u32 record_count | u32 N | u32 K_plus_1
    then per record: u64 scene_id | f32 estimate cube (same order)
"""

import os
import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

SCENARIO_MAGIC = b"SPCM"
PREDICTION_MAGIC = b"SPCP"
FORMAT_VERSION = 1


class DatasetError(Exception):
    """Base class for container format errors."""


class DatasetFormatError(DatasetError):
    """Bad magic, version, or structurally inconsistent header."""


class DatasetTruncatedError(DatasetError):
    """File ends before the advertised content; names the failing record."""


class DatasetValidationError(DatasetError):
    """Decoded content violates a record invariant."""


def _cube_to_bytes(cube: np.ndarray) -> bytes:
    # (N, N, K+1) in memory -> layer-major, row-major on disk
    return np.ascontiguousarray(np.moveaxis(cube, 2, 0), dtype="<f4").tobytes()


def _cube_from_bytes(buf: bytes, n: int, k1: int) -> np.ndarray:
    flat = np.frombuffer(buf, dtype="<f4", count=n * n * k1)
    return np.moveaxis(flat.reshape(k1, n, n), 0, 2).astype(np.float32)


@dataclass(frozen=True)
class ScenarioRecord:
    """One complete experiment sample as stored on disk."""

    scene_id: int
    density: float
    seed: int
    frequencies_mhz: tuple[float, ...]
    target_index: int
    truth_cube: np.ndarray     # (N, N, K+1) float32 dBm
    observed_cube: np.ndarray  # (N, N, K+1) float32, zero where unsampled
    building_map: np.ndarray   # (N, N) uint8
    receiver_map: np.ndarray   # (N, N) uint8

    def __post_init__(self):
        truth = np.asarray(self.truth_cube, dtype=np.float32)
        observed = np.asarray(self.observed_cube, dtype=np.float32)
        city = np.asarray(self.building_map, dtype=np.uint8)
        rec = np.asarray(self.receiver_map, dtype=np.uint8)
        k1 = len(self.frequencies_mhz)
        if truth.ndim != 3 or truth.shape[0] != truth.shape[1] or truth.shape[2] != k1:
            raise ValueError("truth cube shape inconsistent with metadata")
        n = truth.shape[0]
        if observed.shape != truth.shape:
            raise ValueError("observed cube shape mismatch")
        if city.shape != (n, n) or rec.shape != (n, n):
            raise ValueError("binary maps must be (N, N)")
        for name, arr in (("building", city), ("receiver", rec)):
            if not np.isin(arr, (0, 1)).all():
                raise ValueError(f"{name} map contains values outside {{0, 1}}")
        if not (np.isfinite(truth).all() and np.isfinite(observed).all()):
            raise ValueError("cubes contain non-finite values")
        if not (0 <= self.target_index < k1):
            raise ValueError("target_index out of range")
        # density and frequencies live as f32 on disk; coerce now so a
        # write -> read round trip compares equal bit for bit
        object.__setattr__(self, "density", float(np.float32(self.density)))
        object.__setattr__(
            self, "frequencies_mhz",
            tuple(float(np.float32(f)) for f in self.frequencies_mhz),
        )
        object.__setattr__(self, "truth_cube", truth)
        object.__setattr__(self, "observed_cube", observed)
        object.__setattr__(self, "building_map", city)
        object.__setattr__(self, "receiver_map", rec)

    @property
    def n(self) -> int:
        return self.truth_cube.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScenarioRecord):
            return NotImplemented
        return (
            self.scene_id == other.scene_id
            and self.density == other.density
            and self.seed == other.seed
            and self.frequencies_mhz == other.frequencies_mhz
            and self.target_index == other.target_index
            and np.array_equal(self.truth_cube, other.truth_cube)
            and np.array_equal(self.observed_cube, other.observed_cube)
            and np.array_equal(self.building_map, other.building_map)
            and np.array_equal(self.receiver_map, other.receiver_map)
        )


@dataclass(frozen=True)
class PredictionRecord:
    """One estimated cube keyed to the scenario it reconstructs."""

    scene_id: int
    estimate_cube: np.ndarray  # (N, N, K+1) float32 dBm

    def __post_init__(self):
        cube = np.asarray(self.estimate_cube, dtype=np.float32)
        if cube.ndim != 3 or cube.shape[0] != cube.shape[1]:
            raise ValueError("estimate cube must be (N, N, layers)")
        if not np.isfinite(cube).all():
            raise ValueError("estimate cube contains non-finite values")
        object.__setattr__(self, "estimate_cube", cube)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PredictionRecord):
            return NotImplemented
        return self.scene_id == other.scene_id and np.array_equal(
            self.estimate_cube, other.estimate_cube
        )


def dataset_file_size(n_records: int, n: int, k_plus_1: int) -> int:
    """Exact byte size of a scenario file from the layout (no padding)."""
    header = 4 + 1 + 4 + 4 + 4 + 4 * k_plus_1 + 1
    record = 8 + 4 + 8 + 2 * (4 * n * n * k_plus_1) + 2 * (n * n)
    return header + n_records * record


def prediction_file_size(n_records: int, n: int, k_plus_1: int) -> int:
    """Exact byte size of a prediction file from the layout."""
    return 4 + 1 + 4 + 4 + 4 + n_records * (8 + 4 * n * n * k_plus_1)


def _atomic_write(path: str, payload: bytes) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(payload)
    os.replace(tmp, path)


def write_dataset(records: Sequence[ScenarioRecord], path: str) -> int:
    """Write scenario records; returns the count written.

    All records must share N, layer count, frequencies and target index;
    any inconsistency raises before a byte reaches disk. The file is
    written atomically (temp file + rename).
    """
    if len(records) == 0:
        raise ValueError("refusing to write an empty dataset")
    first = records[0]
    n, k1 = first.n, len(first.frequencies_mhz)
    for idx, rec in enumerate(records):
        if rec.n != n or len(rec.frequencies_mhz) != k1:
            raise ValueError(f"record {idx} has inconsistent shape")
        if rec.frequencies_mhz != first.frequencies_mhz:
            raise ValueError(f"record {idx} has inconsistent frequencies")
        if rec.target_index != first.target_index:
            raise ValueError(f"record {idx} has inconsistent target index")

    parts = [
        SCENARIO_MAGIC,
        struct.pack("<BIII", FORMAT_VERSION, len(records), n, k1),
        np.asarray(first.frequencies_mhz, dtype="<f4").tobytes(),
        struct.pack("<B", first.target_index),
    ]
    for rec in records:
        parts.append(struct.pack("<QfQ", rec.scene_id & (2**64 - 1),
                                 rec.density, rec.seed & (2**64 - 1)))
        parts.append(_cube_to_bytes(rec.truth_cube))
        parts.append(_cube_to_bytes(rec.observed_cube))
        parts.append(rec.building_map.astype(np.uint8).tobytes(order="C"))
        parts.append(rec.receiver_map.astype(np.uint8).tobytes(order="C"))
    _atomic_write(path, b"".join(parts))
    return len(records)


class _Reader:
    """Cursor over the file bytes with truncation-aware reads."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, size: int, context: str) -> bytes:
        if self.pos + size > len(self.data):
            raise DatasetTruncatedError(
                f"file truncated while reading {context} "
                f"(needed {size} bytes at offset {self.pos})"
            )
        chunk = self.data[self.pos:self.pos + size]
        self.pos += size
        return chunk


def _read_header(reader: _Reader, magic: bytes):
    got = reader.take(4, "magic")
    if got != magic:
        raise DatasetFormatError(f"bad magic {got!r}, expected {magic!r}")
    version, count, n, k1 = struct.unpack("<BIII", reader.take(13, "header"))
    if version != FORMAT_VERSION:
        raise DatasetFormatError(f"unsupported version {version}")
    if n == 0 or k1 == 0:
        raise DatasetFormatError("header declares an empty grid")
    return count, n, k1


def read_dataset(path: str) -> list[ScenarioRecord]:
    """Read and validate a scenario file; inverse of write_dataset."""
    with open(path, "rb") as fh:
        reader = _Reader(fh.read())
    count, n, k1 = _read_header(reader, SCENARIO_MAGIC)
    freqs = tuple(
        float(f) for f in np.frombuffer(reader.take(4 * k1, "frequencies"), dtype="<f4")
    )
    (target_index,) = struct.unpack("<B", reader.take(1, "target index"))
    if target_index >= k1:
        raise DatasetFormatError("target index outside the layer count")

    cube_bytes = 4 * n * n * k1
    map_bytes = n * n
    records = []
    for idx in range(count):
        ctx = f"record {idx}"
        scene_id, density, seed = struct.unpack("<QfQ", reader.take(20, ctx))
        truth = _cube_from_bytes(reader.take(cube_bytes, ctx), n, k1)
        observed = _cube_from_bytes(reader.take(cube_bytes, ctx), n, k1)
        city = np.frombuffer(reader.take(map_bytes, ctx), dtype=np.uint8).reshape(n, n)
        rec_map = np.frombuffer(reader.take(map_bytes, ctx), dtype=np.uint8).reshape(n, n)
        try:
            records.append(ScenarioRecord(
                scene_id=scene_id,
                density=float(density),
                seed=seed,
                frequencies_mhz=freqs,
                target_index=target_index,
                truth_cube=truth,
                observed_cube=observed,
                building_map=city,
                receiver_map=rec_map,
            ))
        except ValueError as exc:
            raise DatasetValidationError(f"record {idx}: {exc}") from exc
    return records


def write_predictions(records: Sequence[PredictionRecord], path: str, n: int, k_plus_1: int) -> int:
    """Write prediction records; returns the count written."""
    for idx, rec in enumerate(records):
        if rec.estimate_cube.shape != (n, n, k_plus_1):
            raise ValueError(f"prediction {idx} shape mismatch")
    parts = [
        PREDICTION_MAGIC,
        struct.pack("<BIII", FORMAT_VERSION, len(records), n, k_plus_1),
    ]
    for rec in records:
        parts.append(struct.pack("<Q", rec.scene_id & (2**64 - 1)))
        parts.append(_cube_to_bytes(rec.estimate_cube))
    _atomic_write(path, b"".join(parts))
    return len(records)


def read_predictions(path: str) -> list[PredictionRecord]:
    """Read and validate a prediction file; inverse of write_predictions."""
    with open(path, "rb") as fh:
        reader = _Reader(fh.read())
    count, n, k1 = _read_header(reader, PREDICTION_MAGIC)
    cube_bytes = 4 * n * n * k1
    records = []
    for idx in range(count):
        ctx = f"record {idx}"
        (scene_id,) = struct.unpack("<Q", reader.take(8, ctx))
        cube = _cube_from_bytes(reader.take(cube_bytes, ctx), n, k1)
        try:
            records.append(PredictionRecord(scene_id=scene_id, estimate_cube=cube))
        except ValueError as exc:
            raise DatasetValidationError(f"record {idx}: {exc}") from exc
    return records
