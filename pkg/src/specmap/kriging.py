"""Ordinary kriging with a fitted exponential semivariogram.

The semivariogram is estimated from binned pairwise squared differences,
fitted by a deterministic grid search over the range parameter with a
pair-count-weighted linear solve for nugget and partial sill, and used in a
moving-neighborhood ordinary kriging solve with a unit-sum weight
constraint enforced through a Lagrange multiplier.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from .grid import GridSpec
from .interpolate import SampleList

# Partial sill floor: keeps degenerate fits strictly positive definite.
_MIN_SILL = 1e-8
# Diagonal jitter applied when a kriging system is near-singular.
_JITTER = 1e-10
# Unit-sum weight tolerance asserted on every solved cell.
_WEIGHT_TOL = 1e-9


class KrigingError(RuntimeError):
    """Raised when a kriging system cannot be solved to tolerance."""


@dataclass(frozen=True)
class VariogramModel:
    """Exponential semivariogram.

    ``gamma(h) = nugget + sill * (1 - exp(-3 h / range_m))`` for ``h > 0``
    and ``gamma(0) = 0``, the convention that makes kriging an exact
    interpolator at sample locations. ``sill`` is the partial sill in dB^2;
    ``range_m`` is the effective range in meters. ``flagged`` marks
    degenerate fits (all empirical semivariances zero).
    """

    nugget: float
    sill: float
    range_m: float
    kind: str = "exponential"
    flagged: bool = False

    def __post_init__(self):
        if self.kind != "exponential":
            raise ValueError(f"unsupported variogram kind: {self.kind}")
        if self.nugget < 0:
            raise ValueError("nugget must be non-negative")
        if self.sill <= 0:
            raise ValueError("sill must be positive")
        if self.range_m <= 0:
            raise ValueError("range must be positive")

    def __call__(self, h: np.ndarray) -> np.ndarray:
        h = np.asarray(h, dtype=np.float64)
        gamma = self.nugget + self.sill * (1.0 - np.exp(-3.0 * h / self.range_m))
        return np.where(h > 0, gamma, 0.0)


def empirical_variogram(
    samples: SampleList,
    grid: GridSpec,
    bin_width: float | None = None,
    max_lag: float | None = None,
) -> list[tuple[float, float, int]]:
    """Binned empirical semivariogram of one sample layer.

    Parameters
    ----------
    samples : SampleList
        Point observations of one frequency layer.
    grid : GridSpec
        Grid geometry; supplies cell-center coordinates and the defaults.
    bin_width : float, optional
        Lag bin width in meters. Default: twice the grid interval.
    max_lag : float, optional
        Largest pair distance considered. Default: half the area side.

    Returns
    -------
    list of (float, float, int)
        One (mean pair distance, semivariance estimate, pair count) triple
        per non-empty bin, in ascending lag order. The semivariance of a
        bin B is ``sum((z_i - z_j)^2) / (2 |B|)`` over its pairs.
    """
    if len(samples) < 2:
        raise ValueError("need at least two samples")
    if bin_width is None:
        bin_width = 2.0 * grid.interval
    if max_lag is None:
        max_lag = grid.side_meters / 2.0
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")

    pts = samples.points(grid)
    d = pdist(pts)
    g = 0.5 * pdist(samples.values[:, None], metric="sqeuclidean")

    keep = d <= max_lag
    d = d[keep]
    g = g[keep]
    bins = np.floor(d / bin_width).astype(np.int64)

    counts = np.bincount(bins)
    sum_d = np.bincount(bins, weights=d)
    sum_g = np.bincount(bins, weights=g)
    out = []
    for b in np.nonzero(counts)[0]:
        out.append((float(sum_d[b] / counts[b]), float(sum_g[b] / counts[b]),
                    int(counts[b])))
    return out


def _weighted_fit(g: np.ndarray, gamma: np.ndarray, w: np.ndarray) -> tuple[float, float]:
    """Weighted least squares of gamma against (1, g) with nugget >= 0, sill >= floor.

    The convex two-variable problem is solved exactly by evaluating every
    active-set candidate (interior, each edge, and the corner) and keeping
    the feasible one with the smallest weighted squared error.
    """
    sw = w.sum()
    swg = (w * g).sum()
    swgg = (w * g * g).sum()
    swy = (w * gamma).sum()
    swgy = (w * g * gamma).sum()

    candidates = []
    det = sw * swgg - swg * swg
    if det > 0:  # interior (unconstrained) optimum
        candidates.append(((swgg * swy - swg * swgy) / det,
                           (sw * swgy - swg * swy) / det))
    if swgg > 0:  # nugget pinned to zero
        candidates.append((0.0, swgy / swgg))
    # sill pinned to the floor, and the corner
    candidates.append(((w * (gamma - _MIN_SILL * g)).sum() / sw, _MIN_SILL))
    candidates.append((0.0, _MIN_SILL))

    best = None
    for c0, c in candidates:
        if c0 < 0 or c < _MIN_SILL:
            continue
        sse = float((w * (c0 + c * g - gamma) ** 2).sum())
        if best is None or sse < best[0]:
            best = (sse, c0, c)
    return best[1], best[2]


def fit_variogram(
    empirical: list[tuple[float, float, int]],
    grid: GridSpec,
    kind: str = "exponential",
) -> VariogramModel:
    """Fit an exponential model to an empirical semivariogram.

    Deterministic and derivative-free: the range is scanned over every
    multiple of the grid interval up to half the area side; for each
    candidate range the nugget and partial sill solve a pair-count-weighted
    linear least squares with non-negativity constraints (exact active-set
    enumeration). The candidate with the smallest weighted squared error
    wins, first-come on ties.

    Parameters
    ----------
    empirical : list of (lag, semivariance, pair_count)
        Output of :func:`empirical_variogram`; at least three bins.
    grid : GridSpec
        Supplies the range search grid {interval, 2*interval, ..., side/2}.
    kind : str
        Model family; only "exponential" is supported.

    Returns
    -------
    VariogramModel
        Fitted model. A degenerate input (every semivariance zero) yields a
        flagged nugget-only model with the minimum sill.
    """
    if kind != "exponential":
        raise ValueError(f"unsupported variogram kind: {kind}")
    if len(empirical) < 3:
        raise ValueError("need at least three non-empty bins to fit")

    lags = np.array([e[0] for e in empirical], dtype=np.float64)
    gamma = np.array([e[1] for e in empirical], dtype=np.float64)
    weights = np.array([e[2] for e in empirical], dtype=np.float64)

    if (gamma == 0).all():
        return VariogramModel(nugget=0.0, sill=_MIN_SILL, range_m=grid.interval,
                              flagged=True)

    dd = grid.interval
    n_steps = max(1, int(round(grid.side_meters / 2.0 / dd)))
    best = None
    for step in range(1, n_steps + 1):
        a = step * dd
        g = 1.0 - np.exp(-3.0 * lags / a)
        c0, c = _weighted_fit(g, gamma, weights)
        sse = float((weights * (c0 + c * g - gamma) ** 2).sum())
        if best is None or sse < best[0]:
            best = (sse, a, c0, c)
    _, a, c0, c = best
    return VariogramModel(nugget=c0, sill=c, range_m=a)


def _solve_chunk(a_mats: np.ndarray, b_vecs: np.ndarray) -> np.ndarray:
    """Batched solve with a jittered retry for singular systems."""
    try:
        return np.linalg.solve(a_mats, b_vecs[..., None])[..., 0]
    except np.linalg.LinAlgError:
        m = a_mats.shape[1] - 1
        jittered = a_mats.copy()
        jittered[:, np.arange(m), np.arange(m)] += _JITTER
        warnings.warn("singular kriging system; retried with diagonal jitter")
        return np.linalg.solve(jittered, b_vecs[..., None])[..., 0]


def _solve_layer(a_mats, b_vecs, values, idx):
    """Solve one layer's systems for a chunk; returns predictions and flags."""
    m = a_mats.shape[1] - 1
    sol = _solve_chunk(a_mats, b_vecs)
    weights = sol[:, :m]
    flagged = 0
    bad = np.abs(weights.sum(axis=1) - 1.0) > _WEIGHT_TOL
    if bad.any():
        jittered = a_mats[bad].copy()
        jittered[:, np.arange(m), np.arange(m)] += _JITTER
        sol_bad = np.linalg.solve(jittered, b_vecs[bad][..., None])[..., 0]
        weights[bad] = sol_bad[:, :m]
        flagged = int(bad.sum())
        still = np.abs(weights.sum(axis=1) - 1.0) > _WEIGHT_TOL
        if still.any():
            raise KrigingError(
                f"{int(still.sum())} cells violate the unit-sum weight "
                f"constraint beyond {_WEIGHT_TOL}"
            )
    return (weights * values[idx]).sum(axis=1), flagged


def kriging_reconstruct_stack(
    sample_stack: "list[SampleList]",
    grid: GridSpec,
    models: "list[VariogramModel]",
    neighborhood: int = 32,
    chunk: int = 1024,
) -> "list[np.ndarray]":
    """Ordinary kriging of several layers sharing one receiver layout.

    All sample lists must sit on identical cells (one receiver set observes
    every frequency), so neighbor search and inter-sample distances are
    computed once and reused across layers; only the semivariogram
    evaluations and solves differ. Semantics per layer are identical to
    :func:`kriging_reconstruct`.
    """
    if len(sample_stack) != len(models):
        raise ValueError("one variogram model per layer required")
    base = sample_stack[0]
    if len(base) < 2:
        raise ValueError("need at least two samples to krige")
    for other in sample_stack[1:]:
        if not np.array_equal(other.cells, base.cells):
            raise ValueError("stacked layers must share the same sample cells")

    m = min(neighborhood, len(base))
    n = grid.cells_per_side
    pts = base.points(grid)
    tree = cKDTree(pts)
    query = grid.center_coords()
    outs = [np.empty(len(query)) for _ in sample_stack]
    flagged = 0

    diag = np.arange(m)
    for start in range(0, len(query), chunk):
        q = query[start:start + chunk]
        dist, idx = tree.query(q, k=m)
        if m == 1:  # unreachable through the public preconditions, kept for safety
            dist, idx = dist[:, None], idx[:, None]
        coords = pts[idx]
        # squared-expansion pairwise distances: one gram matrix per cell
        sq_norms = np.einsum("qmd,qmd->qm", coords, coords)
        gram = coords @ coords.transpose(0, 2, 1)
        d2 = sq_norms[:, :, None] + sq_norms[:, None, :] - 2.0 * gram
        np.maximum(d2, 0.0, out=d2)
        pairwise = np.sqrt(d2)
        pairwise[:, diag, diag] = 0.0  # exact zeros drive exact interpolation

        nq = len(q)
        for layer, (samples, model) in enumerate(zip(sample_stack, models)):
            a_mats = np.zeros((nq, m + 1, m + 1))
            a_mats[:, :m, :m] = model(pairwise)
            a_mats[:, m, :m] = 1.0
            a_mats[:, :m, m] = 1.0
            b_vecs = np.zeros((nq, m + 1))
            b_vecs[:, :m] = model(dist)
            b_vecs[:, m] = 1.0
            preds, new_flags = _solve_layer(a_mats, b_vecs, samples.values, idx)
            outs[layer][start:start + chunk] = preds
            flagged += new_flags

    if flagged:
        warnings.warn(f"{flagged} kriging systems were near-singular; "
                      "solved with diagonal jitter")
    return [out.reshape(n, n) for out in outs]


def kriging_reconstruct(
    samples: SampleList,
    grid: GridSpec,
    model: VariogramModel,
    neighborhood: int = 32,
    chunk: int = 1024,
) -> np.ndarray:
    """Ordinary kriging of one layer onto the full grid.

    Each cell is predicted from its ``neighborhood`` nearest samples
    (clamped to the sample count) by solving the (m+1) x (m+1) ordinary
    kriging system: semivariogram entries between the neighbors, a unit-sum
    constraint row handled through a Lagrange multiplier, and the
    query-to-neighbor semivariances on the right-hand side.

    Parameters
    ----------
    samples : SampleList
        Observations of the layer; at least two.
    grid : GridSpec
        Geometry of the prediction grid.
    model : VariogramModel
        Semivariogram to use; with a zero nugget the prediction at a sample
        cell reproduces the sample exactly.
    neighborhood : int
        Samples per local system (moving window), clamped to the sample
        count. Bounds the per-cell solve at O(neighborhood^3).
    chunk : int
        Cells per batched solve; a memory/speed knob with no effect on
        results.

    Returns
    -------
    np.ndarray
        (N, N) predicted layer. Weight sums are asserted to 1 within 1e-9
        on every cell; near-singular systems are retried with a tiny
        diagonal jitter and flagged with a warning.
    """
    return kriging_reconstruct_stack([samples], grid, [model],
                                     neighborhood=neighborhood, chunk=chunk)[0]
