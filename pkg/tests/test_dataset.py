"""Binary container round trips, layout size, and validation errors."""

import numpy as np
import pytest

from specmap import (
    DatasetFormatError,
    DatasetTruncatedError,
    DatasetValidationError,
    PredictionRecord,
    ScenarioRecord,
    dataset_file_size,
    read_dataset,
    read_predictions,
    write_dataset,
    write_predictions,
)
from specmap.dataset import prediction_file_size

FREQS = (900.0, 1500.0, 1800.0, 2100.0)


def random_record(rng, scene_id, n=16, freqs=FREQS, density=0.2):
    k1 = len(freqs)
    buildings = (rng.random((n, n)) < 0.2).astype(np.uint8)
    receivers = ((rng.random((n, n)) < density) & (buildings == 0)).astype(np.uint8)
    return ScenarioRecord(
        scene_id=scene_id,
        density=density,
        seed=int(rng.integers(0, 2**63)),
        frequencies_mhz=freqs,
        target_index=2,
        truth_cube=rng.uniform(-150, -20, (n, n, k1)).astype(np.float32),
        observed_cube=rng.uniform(-150, -20, (n, n, k1)).astype(np.float32),
        building_map=buildings,
        receiver_map=receivers,
    )


def test_round_trip_bit_identical(tmp_path):
    rng = np.random.default_rng(0)
    records = [random_record(rng, i) for i in range(10)]
    path = str(tmp_path / "ds.bin")
    assert write_dataset(records, path) == 10
    loaded = read_dataset(path)
    assert loaded == records


def test_file_size_matches_layout(tmp_path):
    rng = np.random.default_rng(1)
    records = [random_record(rng, i, n=64) for i in range(1)]
    path = str(tmp_path / "one.bin")
    write_dataset(records, path)
    size = (tmp_path / "one.bin").stat().st_size
    assert size == dataset_file_size(1, 64, 4)
    # layout arithmetic: header 18 + 4*(K+1), record 20 + 8*N^2*(K+1) + 2*N^2
    assert size == 18 + 16 + (20 + 8 * 64 * 64 * 4 + 2 * 64 * 64)
    assert size == 139_318


def test_file_size_scales_with_records(tmp_path):
    rng = np.random.default_rng(2)
    records = [random_record(rng, i) for i in range(3)]
    path = str(tmp_path / "three.bin")
    write_dataset(records, path)
    assert (tmp_path / "three.bin").stat().st_size == dataset_file_size(3, 16, 4)


def test_wrong_magic(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"NOPE" + bytes(64))
    with pytest.raises(DatasetFormatError):
        read_dataset(str(path))
    with pytest.raises(DatasetFormatError):
        read_predictions(str(path))


def test_wrong_version(tmp_path):
    rng = np.random.default_rng(3)
    path = tmp_path / "v.bin"
    write_dataset([random_record(rng, 0)], str(path))
    raw = bytearray(path.read_bytes())
    raw[4] = 9
    path.write_bytes(bytes(raw))
    with pytest.raises(DatasetFormatError):
        read_dataset(str(path))


def test_truncation_names_record(tmp_path):
    rng = np.random.default_rng(4)
    records = [random_record(rng, i) for i in range(4)]
    path = tmp_path / "trunc.bin"
    write_dataset(records, str(path))
    full = path.read_bytes()
    record_size = (len(full) - dataset_file_size(0, 16, 4)) // 4
    cut = dataset_file_size(0, 16, 4) + 2 * record_size + record_size // 2
    path.write_bytes(full[:cut])
    with pytest.raises(DatasetTruncatedError, match="record 2"):
        read_dataset(str(path))


def test_nonbinary_city_map_rejected(tmp_path):
    rng = np.random.default_rng(5)
    record = random_record(rng, 0)
    path = tmp_path / "z.bin"
    write_dataset([record], str(path))
    raw = bytearray(path.read_bytes())
    # first byte of the building map: header + record metadata + both cubes
    offset = (18 + 16) + 20 + 2 * (4 * 16 * 16 * 4)
    raw[offset] = 2
    path.write_bytes(bytes(raw))
    with pytest.raises(DatasetValidationError, match="record 0"):
        read_dataset(str(path))


def test_nonfinite_cube_rejected(tmp_path):
    rng = np.random.default_rng(6)
    record = random_record(rng, 0)
    path = tmp_path / "nan.bin"
    write_dataset([record], str(path))
    raw = bytearray(path.read_bytes())
    offset = 18 + 16 + 20
    raw[offset:offset + 4] = np.float32("nan").tobytes()
    path.write_bytes(bytes(raw))
    with pytest.raises(DatasetValidationError):
        read_dataset(str(path))


def test_inconsistent_records_rejected_before_write(tmp_path):
    rng = np.random.default_rng(7)
    records = [random_record(rng, 0, n=16), random_record(rng, 1, n=8)]
    path = tmp_path / "never.bin"
    with pytest.raises(ValueError):
        write_dataset(records, str(path))
    assert not path.exists()
    with pytest.raises(ValueError):
        write_dataset([], str(path))


def test_prediction_round_trip(tmp_path):
    rng = np.random.default_rng(8)
    preds = [
        PredictionRecord(scene_id=i,
                         estimate_cube=rng.uniform(-150, -20, (16, 16, 4)).astype(np.float32))
        for i in range(5)
    ]
    path = str(tmp_path / "pred.bin")
    assert write_predictions(preds, path, 16, 4) == 5
    loaded = read_predictions(path)
    assert loaded == preds
    import os
    assert os.path.getsize(path) == prediction_file_size(5, 16, 4)


def test_empty_prediction_file(tmp_path):
    path = str(tmp_path / "empty.bin")
    assert write_predictions([], path, 16, 4) == 0
    assert read_predictions(path) == []


def test_prediction_shape_mismatch_rejected(tmp_path):
    pred = PredictionRecord(scene_id=0, estimate_cube=np.zeros((8, 8, 4), np.float32))
    with pytest.raises(ValueError):
        write_predictions([pred], str(tmp_path / "x.bin"), 16, 4)
