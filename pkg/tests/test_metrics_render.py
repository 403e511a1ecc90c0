"""RMSE accounting and PGM rendering."""

import numpy as np
import pytest

from specmap import aggregate_rmse, render_layer, rmse


def test_identical_cubes_zero_rmse():
    cube = np.random.default_rng(0).uniform(-90, -30, (8, 8, 3))
    report = rmse(cube, cube)
    assert report.overall_rmse_db == 0.0
    assert (report.per_layer_rmse_db == 0.0).all()


def test_constant_offset():
    cube = np.random.default_rng(1).uniform(-90, -30, (8, 8, 3))
    report = rmse(cube + 2.0, cube)
    assert report.overall_rmse_db == pytest.approx(2.0, abs=1e-12)
    assert np.allclose(report.per_layer_rmse_db, 2.0, atol=1e-12)


def test_matches_double_loop_oracle():
    rng = np.random.default_rng(2)
    est = rng.uniform(-90, -30, (4, 4, 2))
    truth = rng.uniform(-90, -30, (4, 4, 2))
    report = rmse(est, truth)
    total = 0.0
    for i in range(4):
        for j in range(4):
            for k in range(2):
                total += (est[i, j, k] - truth[i, j, k]) ** 2
    assert report.overall_rmse_db == pytest.approx(np.sqrt(total / 32), abs=1e-12)
    for k in range(2):
        layer_total = sum(
            (est[i, j, k] - truth[i, j, k]) ** 2 for i in range(4) for j in range(4)
        )
        assert report.per_layer_rmse_db[k] == pytest.approx(
            np.sqrt(layer_total / 16), abs=1e-12
        )


def test_symmetry_and_shift_invariance():
    rng = np.random.default_rng(3)
    est = rng.uniform(-90, -30, (6, 6, 4))
    truth = rng.uniform(-90, -30, (6, 6, 4))
    assert rmse(est, truth).overall_rmse_db == rmse(truth, est).overall_rmse_db
    shifted = rmse(est + 7.5, truth + 7.5)
    assert shifted.overall_rmse_db == pytest.approx(
        rmse(est, truth).overall_rmse_db, abs=1e-12
    )


def test_building_mask():
    rng = np.random.default_rng(4)
    est = rng.uniform(-90, -30, (4, 4, 1))
    truth = est.copy()
    buildings = np.zeros((4, 4), dtype=np.uint8)
    buildings[0, 0] = 1
    est[0, 0, 0] += 100.0  # error only inside the building
    assert rmse(est, truth).overall_rmse_db > 0
    masked = rmse(est, truth, mask_policy="exclude_buildings", buildings=buildings)
    assert masked.overall_rmse_db == 0.0
    assert masked.cells_per_layer == 15


def test_rmse_errors():
    cube = np.zeros((4, 4, 2))
    with pytest.raises(ValueError):
        rmse(cube, np.zeros((4, 4, 3)))
    with pytest.raises(ValueError):
        rmse(cube, cube, mask_policy="nonsense")
    with pytest.raises(ValueError):
        rmse(cube, cube, mask_policy="exclude_buildings")


def test_aggregate_is_cell_weighted_rms():
    entries = [(100, 2.0), (300, 4.0)]
    expected = np.sqrt((100 * 4.0 + 300 * 16.0) / 400)
    assert aggregate_rmse(entries) == pytest.approx(expected, abs=1e-12)
    with pytest.raises(ValueError):
        aggregate_rmse([])


# -- rendering -----------------------------------------------------------------

def test_render_bounds_map_to_black_and_white():
    lo, hi = -150.0, -20.0
    black = render_layer(np.full((4, 4), lo), lo, hi)
    white = render_layer(np.full((4, 4), hi), lo, hi)
    header = b"P5\n4 4\n255\n"
    assert black == header + bytes(16)
    assert white == header + b"\xff" * 16


def test_render_midpoint_rounds_half_up():
    lo, hi = -100.0, -50.0
    img = render_layer(np.full((2, 2), (lo + hi) / 2), lo, hi)
    assert img.endswith(bytes([128] * 4))


def test_render_clamps_out_of_range():
    img = render_layer(np.array([[-500.0, 500.0]]), -150.0, -20.0)
    assert img.endswith(bytes([0, 255]))


def test_render_orientation_row_major():
    layer = np.array([[-150.0, -20.0], [-20.0, -150.0]])
    img = render_layer(layer, -150.0, -20.0)
    assert img == b"P5\n2 2\n255\n" + bytes([0, 255, 255, 0])


def test_render_deterministic_bytes():
    rng = np.random.default_rng(5)
    layer = rng.uniform(-150, -20, (16, 16))
    assert render_layer(layer) == render_layer(layer.copy())


def test_render_rejects_bad_window():
    with pytest.raises(ValueError):
        render_layer(np.zeros((2, 2)), lo=-20.0, hi=-20.0)
    with pytest.raises(ValueError):
        render_layer(np.zeros((2, 2)), lo=-10.0, hi=-20.0)
    with pytest.raises(ValueError):
        render_layer(np.zeros((2, 2)), out_format="png")
