"""Colour-range classification of RGBA rasters."""
from __future__ import annotations

from typing import Optional

import numpy as np

from lulc import kernels
from lulc.codes import ALPHA_THRESHOLD, LABEL_DTYPE, MAX_BANDS, NODATA, UNCLASSIFIED
from lulc.errors import DimensionMismatch
from lulc.geoformats.model import BandSet, ColorBand, GeoTransform, RasterImage

DEFAULT_UNCLASSIFIED_COLOR = (0x80, 0x80, 0x80)


class LabelField:
    """Per-pixel label codes: band index, ``UNCLASSIFIED`` or ``NODATA``."""

    __slots__ = ("labels", "histogram")

    def __init__(self, labels):
        arr = np.ascontiguousarray(labels, dtype=LABEL_DTYPE)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"labels must be a nonempty 2-D grid, got shape {arr.shape}")
        self.labels = arr
        counts = np.bincount(arr.ravel(), minlength=0)
        nz = np.flatnonzero(counts)
        self.histogram: dict[int, int] = {int(c): int(counts[c]) for c in nz}

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    def count(self, code: int) -> int:
        return self.histogram.get(code, 0)

    def band_counts(self, n_bands: int) -> list[int]:
        return [self.count(i) for i in range(n_bands)]

    def max_band_code(self) -> int:
        """Largest band code present, or -1 if only sentinels occur."""
        codes = [c for c in self.histogram if c < UNCLASSIFIED]
        return max(codes) if codes else -1

    def __eq__(self, other):
        if not isinstance(other, LabelField):
            return NotImplemented
        return self.labels.shape == other.labels.shape and bool(
            np.array_equal(self.labels, other.labels))

    def __repr__(self):
        return f"LabelField({self.width}x{self.height}, histogram={self.histogram})"


def channel_distance(pixel, color) -> int:
    """L-inf distance between the RGB parts of two colours."""
    return max(abs(int(pixel[k]) - int(color[k])) for k in range(3))


def match_band(pixel, band: ColorBand) -> bool:
    """True when every RGB channel is within ``band.tolerance`` of its centre."""
    return channel_distance(pixel, band.color) <= band.tolerance


def classify_pixel(pixel, bands: BandSet) -> int:
    """Label code of one RGBA sample.

    The nearest matching band wins; equal distances go to the earlier band.
    """
    if len(pixel) > 3 and pixel[3] < ALPHA_THRESHOLD:
        return NODATA
    best, best_d = UNCLASSIFIED, 256
    for i, band in enumerate(bands):
        d = channel_distance(pixel, band.color)
        if d <= band.tolerance and d < best_d:
            best, best_d = i, d
    return best


def classify_raster(img: RasterImage, bands: BandSet,
                    mask: Optional[np.ndarray] = None) -> LabelField:
    """Classify every pixel of ``img``; pixels outside ``mask`` become NODATA."""
    if len(bands) > MAX_BANDS:
        raise ValueError(f"at most {MAX_BANDS} bands are supported")
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (img.height, img.width):
            raise DimensionMismatch(
                f"mask is {mask.shape[::-1]} but raster is {img.width}x{img.height}")
    labels = kernels.classify_rgba(img.pixels, bands.colors_array(),
                                   bands.tolerances_array(), mask)
    return LabelField(labels)


def render_labels(field: LabelField, bands: BandSet,
                  unclassified_color=DEFAULT_UNCLASSIFIED_COLOR,
                  nodata_transparent: bool = True,
                  transform: Optional[GeoTransform] = None) -> RasterImage:
    """Paint each label with its band colour (the map legend)."""
    if field.max_band_code() >= len(bands):
        raise ValueError("label field references bands beyond the band set")
    lut = np.zeros((0x10000, 4), dtype=np.uint8)
    for i, band in enumerate(bands):
        lut[i] = (*band.color, 255)
    lut[UNCLASSIFIED] = (*unclassified_color, 255)
    lut[NODATA] = (0, 0, 0, 0) if nodata_transparent else (*unclassified_color, 255)
    return RasterImage(lut[field.labels], transform)

