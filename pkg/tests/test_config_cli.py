"""Config parsing and CLI subcommand behavior."""

import hashlib

import numpy as np
import pytest

from specmap import ExperimentConfig, read_dataset, read_predictions
from specmap.cli import main
from specmap.config import parse_key_values


def sha(path):
    return hashlib.sha256(open(path, "rb").read()).hexdigest()


# -- config ----------------------------------------------------------------------

def test_defaults_match_reference_setup():
    config = ExperimentConfig()
    assert config.scene.side_meters == 256.0
    assert config.scene.cells_per_side == 64
    assert config.scene.frequencies_mhz == (900.0, 1500.0, 1800.0, 2100.0)
    assert config.scene.target_freq_mhz == 1800.0
    assert config.scene.grid.interval == 4.0
    assert config.scene.target_index == 2


def test_parse_key_values():
    parsed = parse_key_values("a=1\n# comment\n\n b = 2 # trailing\n")
    assert parsed == {"a": "1", "b": "2"}
    with pytest.raises(ValueError):
        parse_key_values("not a pair\n")


def test_config_file_round_trip(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(
        "side_meters=128\ncells_per_side=32\nfrequencies_mhz=600,1200,2400\n"
        "target_freq_mhz=1200\npath_loss_exponent=2.5\nnoise_sigma_db=0.5\n"
        "broadband=true\n"
    )
    config = ExperimentConfig.from_file(str(path))
    assert config.scene.cells_per_side == 32
    assert config.scene.frequencies_mhz == (600.0, 1200.0, 2400.0)
    assert config.scene.broadband is True
    assert config.channel.path_loss_exponent == 2.5
    assert config.noise_sigma_db == 0.5


def test_config_rejects_unknown_key():
    with pytest.raises(ValueError):
        ExperimentConfig.from_mapping({"no_such_key": "1"})


# -- CLI -------------------------------------------------------------------------

@pytest.fixture(scope="module")
def small_dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    path = str(root / "ds.bin")
    code = main(["generate", "--scenes", "4", "--density", "0.2",
                 "--seed", "7", "--out", path])
    assert code == 0
    return path


def test_generate_reproducible_bytes(tmp_path):
    a = str(tmp_path / "a.bin")
    b = str(tmp_path / "b.bin")
    assert main(["generate", "--scenes", "3", "--density", "0.05",
                 "--seed", "11", "--out", a]) == 0
    assert main(["generate", "--scenes", "3", "--density", "0.05",
                 "--seed", "11", "--out", b]) == 0
    assert sha(a) == sha(b)
    c = str(tmp_path / "c.bin")
    assert main(["generate", "--scenes", "3", "--density", "0.05",
                 "--seed", "12", "--out", c]) == 0
    assert sha(a) != sha(c)


def test_generate_defaults(small_dataset):
    records = read_dataset(small_dataset)
    assert len(records) == 4
    assert records[0].n == 64
    assert records[0].frequencies_mhz == (900.0, 1500.0, 1800.0, 2100.0)
    assert records[0].frequencies_mhz[records[0].target_index] == 1800.0


def test_generate_zero_scenes_usage_error(tmp_path, capsys):
    code = main(["generate", "--scenes", "0", "--out", str(tmp_path / "x.bin")])
    assert code == 2
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert "\n" not in err.strip()


def test_reconstruct_deterministic(small_dataset, tmp_path):
    a = str(tmp_path / "a.bin")
    b = str(tmp_path / "b.bin")
    for out in (a, b):
        assert main(["reconstruct", "--method", "idw", "--power", "2",
                     "--in", small_dataset, "--out", out]) == 0
    assert sha(a) == sha(b)


def test_reconstruct_unknown_method(small_dataset, tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["reconstruct", "--method", "gan", "--in", small_dataset,
              "--out", str(tmp_path / "x.bin")])
    assert exc.value.code == 2
    err = capsys.readouterr().err
    assert err.startswith("error:")
    for method in ("idw", "knn", "kriging"):
        assert method in err


def test_eval_perfect_predictions_zero_rmse(small_dataset, tmp_path, capsys):
    from specmap import PredictionRecord, write_predictions

    records = read_dataset(small_dataset)
    preds = [PredictionRecord(r.scene_id, r.truth_cube) for r in records]
    pred_path = str(tmp_path / "perfect.bin")
    write_predictions(preds, pred_path, records[0].n, len(records[0].frequencies_mhz))
    csv_path = str(tmp_path / "out.csv")
    assert main(["eval", "--truth", small_dataset, "--pred", f"perfect={pred_path}",
                 "--csv", csv_path]) == 0
    lines = open(csv_path).read().strip().splitlines()
    assert lines[0] == "scene_id,density,method,layer_freq_mhz,rmse_db,n_cells"
    for line in lines[1:]:
        assert float(line.split(",")[4]) == 0.0


def test_eval_two_labels_and_aggregate(small_dataset, tmp_path):
    pred_a = str(tmp_path / "a.bin")
    pred_b = str(tmp_path / "b.bin")
    assert main(["reconstruct", "--method", "idw", "--in", small_dataset,
                 "--out", pred_a]) == 0
    assert main(["reconstruct", "--method", "knn", "--in", small_dataset,
                 "--out", pred_b]) == 0
    csv_path = str(tmp_path / "out.csv")
    assert main(["eval", "--truth", small_dataset,
                 "--pred", f"idw={pred_a}", "--pred", f"knn={pred_b}",
                 "--csv", csv_path]) == 0
    text = open(csv_path).read()
    rows = [line.split(",") for line in text.strip().splitlines()[1:]]
    methods = {r[2] for r in rows}
    assert methods == {"idw", "knn"}

    # aggregate equals the cell-weighted RMS of per-scene overall rows
    for method in methods:
        per_scene = [
            (int(r[5]), float(r[4])) for r in rows
            if r[2] == method and r[3] == "overall" and r[0] != "aggregate"
        ]
        (aggregate,) = [
            float(r[4]) for r in rows if r[2] == method and r[0] == "aggregate"
        ]
        counts = np.array([c for c, _ in per_scene], float)
        vals = np.array([v for _, v in per_scene])
        expected = np.sqrt((counts * vals**2).sum() / counts.sum())
        assert aggregate == pytest.approx(expected, abs=1e-6)


def test_generate_with_config_file(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(
        "side_meters=128\ncells_per_side=32\nfrequencies_mhz=700,1400,2800\n"
        "target_freq_mhz=1400\nshadowing_sigma_db=3.0\n"
    )
    out = str(tmp_path / "ds.bin")
    assert main(["generate", "--scenes", "2", "--density", "0.1",
                 "--seed", "3", "--config", str(cfg), "--out", out]) == 0
    records = read_dataset(out)
    assert records[0].n == 32
    assert records[0].frequencies_mhz == (700.0, 1400.0, 2800.0)
    assert records[0].target_index == 1
    # broadband flag flips the scene config even with a config file present
    out2 = str(tmp_path / "bb.bin")
    assert main(["generate", "--scenes", "1", "--density", "0.1", "--seed", "3",
                 "--config", str(cfg), "--broadband", "--out", out2]) == 0


def test_kriging_cli_exact_at_full_sampling(tmp_path):
    ds = str(tmp_path / "full.bin")
    pred = str(tmp_path / "pred.bin")
    assert main(["generate", "--scenes", "2", "--density", "1.0",
                 "--seed", "21", "--out", ds]) == 0
    assert main(["reconstruct", "--method", "kriging", "--in", ds,
                 "--out", pred]) == 0
    truth = {r.scene_id: r for r in read_dataset(ds)}
    for record in read_predictions(pred):
        ref = truth[record.scene_id]
        mask = ref.receiver_map.astype(bool)  # density 1.0: all free cells
        for k in range(4):
            if k == ref.target_index:
                continue
            err = np.abs(
                record.estimate_cube[:, :, k].astype(np.float64)
                - ref.truth_cube[:, :, k].astype(np.float64)
            )
            assert err[mask].max() < 1e-6


def test_eval_unmatched_scene_id(small_dataset, tmp_path, capsys):
    from specmap import PredictionRecord, write_predictions

    records = read_dataset(small_dataset)
    preds = [PredictionRecord(999, records[0].truth_cube)]
    pred_path = str(tmp_path / "bad.bin")
    write_predictions(preds, pred_path, records[0].n, len(records[0].frequencies_mhz))
    code = main(["eval", "--truth", small_dataset, "--pred", f"bad={pred_path}",
                 "--csv", str(tmp_path / "x.csv")])
    assert code == 1
    assert capsys.readouterr().err.startswith("error:")


def test_render_deterministic_and_freq_match(small_dataset, tmp_path):
    a = str(tmp_path / "a.pgm")
    b = str(tmp_path / "b.pgm")
    for out in (a, b):
        assert main(["render", "--in", small_dataset, "--scene", "0",
                     "--freq", "900", "--out", out]) == 0
    assert sha(a) == sha(b)
    with open(a, "rb") as fh:
        assert fh.read(2) == b"P5"


def test_render_unknown_frequency(small_dataset, tmp_path, capsys):
    code = main(["render", "--in", small_dataset, "--scene", "0",
                 "--freq", "999", "--out", str(tmp_path / "x.pgm")])
    assert code == 1
    err = capsys.readouterr().err
    assert err.startswith("error:")
    for freq in ("900", "1500", "1800", "2100"):
        assert freq in err


def test_render_prediction_by_layer(small_dataset, tmp_path):
    pred_path = str(tmp_path / "p.bin")
    assert main(["reconstruct", "--method", "knn", "--in", small_dataset,
                 "--out", pred_path]) == 0
    out = str(tmp_path / "p.pgm")
    assert main(["render", "--in", pred_path, "--scene", "1", "--layer", "2",
                 "--out", out]) == 0
    cube = read_predictions(pred_path)[1].estimate_cube
    from specmap import render_layer
    assert open(out, "rb").read() == render_layer(cube[:, :, 2])


def test_render_perfect_prediction_matches_truth_image(small_dataset, tmp_path):
    from specmap import PredictionRecord, write_predictions

    records = read_dataset(small_dataset)
    pred_path = str(tmp_path / "perfect.bin")
    write_predictions(
        [PredictionRecord(r.scene_id, r.truth_cube) for r in records],
        pred_path, records[0].n, len(records[0].frequencies_mhz),
    )
    truth_img = str(tmp_path / "truth.pgm")
    pred_img = str(tmp_path / "pred.pgm")
    assert main(["render", "--in", small_dataset, "--scene", "2",
                 "--freq", "1500", "--out", truth_img]) == 0
    assert main(["render", "--in", pred_path, "--scene", "2",
                 "--layer", "1", "--out", pred_img]) == 0
    assert sha(truth_img) == sha(pred_img)
