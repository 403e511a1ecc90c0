"""Stand-alone reader/writer of the experiment's binary container formats.

Deliberately independent of the map-construction package: the two sides of
the pipeline only share the bytes. Scenario files carry the magic "SPCM",
prediction files "SPCP"; everything is little-endian with no padding.
"""

import os
import struct
from dataclasses import dataclass

import numpy as np

SCENARIO_MAGIC = b"SPCM"
PREDICTION_MAGIC = b"SPCP"
VERSION = 1


class ContainerError(Exception):
    """Unreadable or inconsistent container file."""


@dataclass(frozen=True)
class Sample:
    """One training example as stored on disk."""

    scene_id: int
    density: float
    seed: int
    truth: np.ndarray     # (N, N, K+1) float32 dBm
    observed: np.ndarray  # (N, N, K+1) float32, 0 where unsampled
    city: np.ndarray      # (N, N) uint8
    receivers: np.ndarray  # (N, N) uint8


@dataclass(frozen=True)
class ScenarioSet:
    frequencies_mhz: tuple[float, ...]
    target_index: int
    samples: list[Sample]

    @property
    def n(self) -> int:
        return self.samples[0].truth.shape[0]

    @property
    def n_layers(self) -> int:
        return len(self.frequencies_mhz)


def _need(buf: bytes, pos: int, size: int, what: str) -> int:
    if pos + size > len(buf):
        raise ContainerError(f"file truncated while reading {what}")
    return pos + size


def _read_cube(buf: bytes, pos: int, n: int, k1: int) -> tuple[np.ndarray, int]:
    size = 4 * n * n * k1
    end = _need(buf, pos, size, "cube")
    flat = np.frombuffer(buf[pos:end], dtype="<f4")
    # disk order is layer-major; in memory we keep (N, N, K+1)
    cube = np.moveaxis(flat.reshape(k1, n, n), 0, 2).astype(np.float32)
    return cube, end


def read_scenarios(path: str) -> ScenarioSet:
    with open(path, "rb") as fh:
        buf = fh.read()
    if buf[:4] != SCENARIO_MAGIC:
        raise ContainerError(f"bad magic {buf[:4]!r}, expected {SCENARIO_MAGIC!r}")
    pos = _need(buf, 4, 13, "header")
    version, count, n, k1 = struct.unpack("<BIII", buf[4:pos])
    if version != VERSION:
        raise ContainerError(f"unsupported version {version}")
    end = _need(buf, pos, 4 * k1, "frequencies")
    freqs = tuple(float(f) for f in np.frombuffer(buf[pos:end], dtype="<f4"))
    pos = _need(buf, end, 1, "target index")
    target_index = buf[end]
    if target_index >= k1:
        raise ContainerError("target index outside layer count")

    samples = []
    for idx in range(count):
        end = _need(buf, pos, 20, f"record {idx}")
        scene_id, density, seed = struct.unpack("<QfQ", buf[pos:end])
        truth, end = _read_cube(buf, end, n, k1)
        observed, end = _read_cube(buf, end, n, k1)
        maps_end = _need(buf, end, 2 * n * n, f"record {idx} maps")
        city = np.frombuffer(buf[end:end + n * n], dtype=np.uint8).reshape(n, n)
        recv = np.frombuffer(buf[end + n * n:maps_end], dtype=np.uint8).reshape(n, n)
        if not (np.isin(city, (0, 1)).all() and np.isin(recv, (0, 1)).all()):
            raise ContainerError(f"record {idx}: non-binary side map")
        if not (np.isfinite(truth).all() and np.isfinite(observed).all()):
            raise ContainerError(f"record {idx}: non-finite cube values")
        samples.append(Sample(scene_id=scene_id, density=float(density), seed=seed,
                              truth=truth, observed=observed, city=city,
                              receivers=recv))
        pos = maps_end
    return ScenarioSet(frequencies_mhz=freqs, target_index=int(target_index),
                       samples=samples)


def write_predictions(path: str, scene_ids, cubes) -> int:
    """Write estimate cubes keyed by scene id; returns the count written."""
    cubes = [np.asarray(c, dtype=np.float32) for c in cubes]
    if len(cubes) != len(scene_ids):
        raise ValueError("one cube per scene id required")
    if cubes:
        n = cubes[0].shape[0]
        k1 = cubes[0].shape[2]
        for c in cubes:
            if c.shape != (n, n, k1):
                raise ValueError("inconsistent cube shapes")
    else:
        n = k1 = 0
    parts = [PREDICTION_MAGIC, struct.pack("<BIII", VERSION, len(cubes), n, k1)]
    for scene_id, cube in zip(scene_ids, cubes):
        parts.append(struct.pack("<Q", int(scene_id) & (2**64 - 1)))
        parts.append(np.ascontiguousarray(np.moveaxis(cube, 2, 0)).tobytes())
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(b"".join(parts))
    os.replace(tmp, path)
    return len(cubes)


def read_predictions(path: str) -> list[tuple[int, np.ndarray]]:
    """Read (scene_id, cube) pairs back; used by round-trip tests."""
    with open(path, "rb") as fh:
        buf = fh.read()
    if buf[:4] != PREDICTION_MAGIC:
        raise ContainerError(f"bad magic {buf[:4]!r}, expected {PREDICTION_MAGIC!r}")
    pos = _need(buf, 4, 13, "header")
    version, count, n, k1 = struct.unpack("<BIII", buf[4:pos])
    if version != VERSION:
        raise ContainerError(f"unsupported version {version}")
    out = []
    for idx in range(count):
        end = _need(buf, pos, 8, f"record {idx}")
        (scene_id,) = struct.unpack("<Q", buf[pos:end])
        cube, pos = _read_cube(buf, end, n, k1)
        out.append((scene_id, cube))
    return out
