"""Randomized urban scene generation: buildings and transmitters on a grid."""

from dataclasses import dataclass

import numpy as np

from .grid import GridSpec

# Redrawing the building set more than this many times means the
# configuration leaves no free cell and is treated as infeasible.
_MAX_BUILDING_ATTEMPTS = 16


class SceneGenerationError(RuntimeError):
    """Raised when a scene configuration cannot produce a valid scene."""


@dataclass(frozen=True)
class Transmitter:
    """A single emitter.

    ``freq_index`` selects one entry of the scene frequency list; ``None``
    means broadband, i.e. the transmitter contributes to every layer.
    """

    cell: tuple[int, int]
    power_dbm: float
    freq_index: int | None = None


@dataclass(frozen=True)
class SceneConfig:
    """Generation parameters for randomized scenes.

    Building rectangle sides are drawn in cell units and converted to meters
    with the grid interval; rectangles may overlap (the occupancy grid is
    their union). ``broadband`` switches every transmitter to emitting on
    all frequencies instead of one randomly drawn frequency.
    """

    side_meters: float = 256.0
    cells_per_side: int = 64
    frequencies_mhz: tuple[float, ...] = (900.0, 1500.0, 1800.0, 2100.0)
    target_freq_mhz: float = 1800.0
    min_buildings: int = 3
    max_buildings: int = 12
    min_building_side_cells: float = 4.0
    max_building_side_cells: float = 16.0
    min_transmitters: int = 1
    max_transmitters: int = 5
    min_power_dbm: float = 10.0
    max_power_dbm: float = 30.0
    broadband: bool = False

    def __post_init__(self):
        if len(self.frequencies_mhz) < 1:
            raise ValueError("at least one frequency is required")
        freqs = tuple(float(f) for f in self.frequencies_mhz)
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ValueError("frequencies must be strictly ascending")
        if self.target_freq_mhz not in freqs:
            raise ValueError(
                f"target frequency {self.target_freq_mhz} MHz not in {freqs}"
            )
        if not (0 <= self.min_buildings <= self.max_buildings):
            raise ValueError("building count bounds must satisfy 0 <= min <= max")
        if not (0 < self.min_building_side_cells <= self.max_building_side_cells):
            raise ValueError("building side bounds must satisfy 0 < min <= max")
        if not (1 <= self.min_transmitters <= self.max_transmitters):
            raise ValueError("transmitter count bounds must satisfy 1 <= min <= max")
        if self.min_power_dbm > self.max_power_dbm:
            raise ValueError("power bounds must satisfy min <= max")

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.side_meters, self.cells_per_side)

    @property
    def target_index(self) -> int:
        return self.frequencies_mhz.index(self.target_freq_mhz)


@dataclass(frozen=True)
class Scene:
    """One generated environment: occupancy grid plus transmitters.

    Immutable after construction; safe to share across workers.
    """

    grid: GridSpec
    buildings: np.ndarray  # (N, N) uint8, 1 = occupied
    transmitters: tuple[Transmitter, ...]
    frequencies_mhz: tuple[float, ...]
    target_index: int

    def __post_init__(self):
        n = self.grid.cells_per_side
        bld = np.array(self.buildings, dtype=np.uint8)
        if bld.shape != (n, n):
            raise ValueError(f"buildings must have shape ({n}, {n})")
        if not np.isin(bld, (0, 1)).all():
            raise ValueError("buildings grid must be binary")
        bld.setflags(write=False)
        object.__setattr__(self, "buildings", bld)
        freqs = tuple(float(f) for f in self.frequencies_mhz)
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ValueError("frequencies must be strictly ascending")
        if not (0 <= self.target_index < len(freqs)):
            raise ValueError("target_index out of range")
        if len(self.transmitters) == 0:
            raise ValueError("scene needs at least one transmitter")
        for t in self.transmitters:
            i, j = t.cell
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"transmitter cell {t.cell} outside the grid")
            if bld[i, j]:
                raise ValueError(f"transmitter cell {t.cell} lies inside a building")
            if t.freq_index is not None and not (0 <= t.freq_index < len(freqs)):
                raise ValueError(f"transmitter frequency index {t.freq_index} invalid")

    @property
    def n_layers(self) -> int:
        return len(self.frequencies_mhz)

    def free_cells(self) -> np.ndarray:
        """Indices of building-free cells, shape (n_free, 2)."""
        return np.argwhere(self.buildings == 0)


def _rasterize_rectangles(grid: GridSpec, rects) -> np.ndarray:
    """Union occupancy of axis-aligned rectangles given in meters.

    A cell is occupied iff its center lies inside a rectangle; rectangle
    edges are closed on the low side and open on the high side.
    """
    n = grid.cells_per_side
    centers = (np.arange(n) + 0.5) * grid.interval
    occ = np.zeros((n, n), dtype=np.uint8)
    for x0, y0, x1, y1 in rects:
        in_x = (centers >= x0) & (centers < x1)
        in_y = (centers >= y0) & (centers < y1)
        occ |= in_x[:, None] & in_y[None, :]
    return occ


def generate_scene(config: SceneConfig, seed: int) -> Scene:
    """Generate one randomized scene, deterministically for (config, seed).

    Buildings are random axis-aligned rectangles (count, side lengths and
    positions uniform within the configured bounds) rasterized by the
    cell-center rule; transmitters are placed uniformly on free cells with
    uniform power draws. Uses a counter-based Philox stream keyed by
    ``seed`` so scenes can be generated in parallel.

    Raises
    ------
    SceneGenerationError
        If after a bounded number of redraws the buildings leave no free
        cell for transmitters.
    """
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    gridspec = config.grid
    dd = gridspec.interval
    w = config.side_meters

    occ = None
    for _ in range(_MAX_BUILDING_ATTEMPTS):
        n_rect = int(rng.integers(config.min_buildings, config.max_buildings + 1))
        rects = []
        for _ in range(n_rect):
            side_x = rng.uniform(config.min_building_side_cells * dd,
                                 config.max_building_side_cells * dd)
            side_y = rng.uniform(config.min_building_side_cells * dd,
                                 config.max_building_side_cells * dd)
            x0 = rng.uniform(0.0, max(w - side_x, 0.0))
            y0 = rng.uniform(0.0, max(w - side_y, 0.0))
            rects.append((x0, y0, x0 + side_x, y0 + side_y))
        occ = _rasterize_rectangles(gridspec, rects)
        if (occ == 0).any():
            break
    else:
        raise SceneGenerationError(
            "buildings cover every cell; no free cell left for transmitters"
        )

    free = np.argwhere(occ == 0)
    n_tx = int(rng.integers(config.min_transmitters, config.max_transmitters + 1))
    cells = free[rng.integers(0, len(free), size=n_tx)]
    powers = rng.uniform(config.min_power_dbm, config.max_power_dbm, size=n_tx)
    n_freq = len(config.frequencies_mhz)
    if config.broadband:
        freq_idx = [None] * n_tx
    else:
        freq_idx = [int(k) for k in rng.integers(0, n_freq, size=n_tx)]

    transmitters = tuple(
        Transmitter(cell=(int(c[0]), int(c[1])), power_dbm=float(p), freq_index=k)
        for c, p, k in zip(cells, powers, freq_idx)
    )
    return Scene(
        grid=gridspec,
        buildings=occ,
        transmitters=transmitters,
        frequencies_mhz=tuple(float(f) for f in config.frequencies_mhz),
        target_index=config.target_index,
    )
