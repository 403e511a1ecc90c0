"""Grayscale rendering of spectrum map layers."""

import numpy as np

# Default display window in dBm: noise floor up to the strong-signal regime.
DEFAULT_LO_DBM = -150.0
DEFAULT_HI_DBM = -20.0


def render_layer(
    layer: np.ndarray,
    lo: float = DEFAULT_LO_DBM,
    hi: float = DEFAULT_HI_DBM,
    out_format: str = "pgm",
) -> bytes:
    """Render one map layer to 8-bit grayscale PGM (P5) bytes.

    Values map linearly from [lo, hi] to [0, 255] with round-half-up and
    clamping; row i runs top to bottom and column j left to right. Output
    bytes are identical across runs and platforms for identical inputs.
    """
    if out_format != "pgm":
        raise ValueError(f"unsupported output format: {out_format}")
    if lo >= hi:
        raise ValueError("lo must be strictly below hi")
    layer = np.asarray(layer, dtype=np.float64)
    if layer.ndim != 2:
        raise ValueError("layer must be a 2-D map")
    scaled = (layer - lo) / (hi - lo) * 255.0
    pixels = np.clip(np.floor(scaled + 0.5), 0, 255).astype(np.uint8)
    rows, cols = pixels.shape
    header = f"P5\n{cols} {rows}\n255\n".encode("ascii")
    return header + pixels.tobytes(order="C")
