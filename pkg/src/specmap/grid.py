"""Regular square grid over the target area."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Geometry of the square target area.

    Parameters
    ----------
    side_meters : float
        Side length of the area in meters.
    cells_per_side : int
        Number of cells along each axis; the area is split into
        ``cells_per_side ** 2`` square cells.

    Notes
    -----
    ``side_meters`` must be an exact multiple of ``cells_per_side`` so that
    ``interval * cells_per_side == side_meters`` holds without rounding.
    The center of cell ``(i, j)`` sits at ``((i + 0.5) * interval,
    (j + 0.5) * interval)``.
    """

    side_meters: float
    cells_per_side: int

    def __post_init__(self):
        if self.side_meters <= 0:
            raise ValueError("side_meters must be positive")
        if self.cells_per_side <= 0:
            raise ValueError("cells_per_side must be a positive integer")
        if self.interval * self.cells_per_side != self.side_meters:
            raise ValueError(
                "side_meters must be exactly divisible by cells_per_side "
                f"(got {self.side_meters} / {self.cells_per_side})"
            )

    @property
    def interval(self) -> float:
        """Cell edge length in meters."""
        return self.side_meters / self.cells_per_side

    def center_coords(self) -> np.ndarray:
        """Coordinates of all cell centers, shape (N*N, 2), row-major in (i, j)."""
        n = self.cells_per_side
        axis = (np.arange(n) + 0.5) * self.interval
        ii, jj = np.meshgrid(axis, axis, indexing="ij")
        return np.column_stack([ii.ravel(), jj.ravel()])


def cell_center(grid: GridSpec, i: int, j: int) -> tuple[float, float]:
    """Physical coordinates of the center of cell ``(i, j)`` in meters.

    Raises
    ------
    IndexError
        If ``i`` or ``j`` falls outside ``[0, cells_per_side)``.
    """
    n = grid.cells_per_side
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"cell index ({i}, {j}) outside grid of size {n}x{n}")
    return ((i + 0.5) * grid.interval, (j + 0.5) * grid.interval)
