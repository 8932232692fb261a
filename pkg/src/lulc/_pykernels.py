"""Pure numpy implementations of the raster kernels.

Reference semantics for :mod:`lulc._ckernels`; both must agree bit for bit.
"""
import numpy as np

from lulc.codes import ALPHA_THRESHOLD, LABEL_DTYPE, NODATA, UNCLASSIFIED


def classify_rgba(pixels, colors, tolerances, mask=None):
    """Nearest in-tolerance band per pixel under the L-inf channel distance.

    Ties keep the lowest band index. Pixels with alpha below the threshold,
    or outside ``mask``, become NODATA.
    """
    h, w = pixels.shape[:2]
    rgb = pixels[..., :3].astype(np.int16)
    best = np.full((h, w), UNCLASSIFIED, dtype=LABEL_DTYPE)
    best_d = np.full((h, w), 256, dtype=np.int16)
    for i in range(len(tolerances)):
        d = np.abs(rgb - colors[i].astype(np.int16)).max(axis=2)
        hit = (d <= tolerances[i]) & (d < best_d)
        best[hit] = i
        best_d[hit] = d[hit]
    nodata = pixels[..., 3] < ALPHA_THRESHOLD
    if mask is not None:
        nodata |= ~mask.astype(bool)
    best[nodata] = NODATA
    return best


def _edges(rings):
    x1, y1, x2, y2 = [], [], [], []
    for ring in rings:
        r = np.asarray(ring, dtype=np.float64)
        x1.append(r[:-1, 0])
        y1.append(r[:-1, 1])
        x2.append(r[1:, 0])
        y2.append(r[1:, 1])
    if not x1:
        return (np.empty(0),) * 4
    return tuple(np.concatenate(a) for a in (x1, y1, x2, y2))


def rasterize_even_odd(rings, origin_x, origin_y, scale_x, scale_y, width, height):
    """Even-odd fill sampled at pixel centres.

    A pixel is inside when a ray cast from its centre towards +x crosses an
    odd number of edges. An edge counts when exactly one endpoint lies
    strictly above the centre line (half-open rule) and the crossing lies
    strictly right of the centre.
    """
    out = np.zeros((height, width), dtype=bool)
    x1, y1, x2, y2 = _edges(rings)
    if x1.size == 0:
        return out
    cx = origin_x + (np.arange(width) + 0.5) * scale_x
    for row in range(height):
        py = origin_y - (row + 0.5) * scale_y
        c = (y1 > py) != (y2 > py)
        if not c.any():
            continue
        ax, ay, bx, by = x1[c], y1[c], x2[c], y2[c]
        xs = np.sort(ax + (py - ay) * (bx - ax) / (by - ay))
        right = xs.size - np.searchsorted(xs, cx, side="right")
        out[row] = (right & 1).astype(bool)
    return out


def aggregate_majority(labels, factor):
    """Most frequent non-NODATA code per block; ties go to the lowest code."""
    h, w = labels.shape
    oh, ow = -(-h // factor), -(-w // factor)
    padded = np.full((oh * factor, ow * factor), NODATA, dtype=LABEL_DTYPE)
    padded[:h, :w] = labels
    blocks = padded.reshape(oh, factor, ow, factor).transpose(0, 2, 1, 3)
    blocks = blocks.reshape(oh, ow, factor * factor)
    out = np.full((oh, ow), NODATA, dtype=LABEL_DTYPE)
    codes = np.unique(labels)
    codes = codes[codes != NODATA]
    if codes.size == 0:
        return out
    best_n = np.zeros((oh, ow), dtype=np.int64)
    for c in codes:  # ascending, so strict > keeps the lowest code on ties
        n = (blocks == c).sum(axis=2)
        win = n > best_n
        out[win] = c
        best_n[win] = n[win]
    return out


def aggregate_central(labels, factor):
    """Code of block cell (factor // 2, factor // 2), clipped to the grid."""
    h, w = labels.shape
    rows = np.minimum(np.arange(0, h, factor) + factor // 2, h - 1)
    cols = np.minimum(np.arange(0, w, factor) + factor // 2, w - 1)
    return np.ascontiguousarray(labels[np.ix_(rows, cols)])
