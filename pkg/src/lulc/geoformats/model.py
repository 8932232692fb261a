"""In-memory data model shared by the parsers and the pipeline."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Tuple

import numpy as np

from lulc.errors import SchemaError

RGB = Tuple[int, int, int]

#: Category roll-up used when no hierarchy file is given.
DEFAULT_HIERARCHY: dict[str, tuple[str, ...]] = {
    "Crop": ("Wheat", "Canola", "Pulses", "Misc Crop"),
    "Agri Land": ("Crop", "Pasture"),
}

_BAND_PREFIX = re.compile(r"^\s*Band\s+\d+\s*[-–—]\s*", re.IGNORECASE)


def class_label_from_name(name: str) -> str:
    """Strip a leading ``Band N - `` prefix: ``"Band 1 - Wheat"`` -> ``"Wheat"``."""
    stripped = _BAND_PREFIX.sub("", name, count=1).strip()
    return stripped or name


@dataclass(frozen=True)
class GeoTransform:
    """North-up affine georeferencing.

    ``origin_x``/``origin_y`` locate the top-left corner of pixel (0, 0);
    x grows with the column index and y *decreases* with the row index.
    """

    origin_x: float = 0.0
    origin_y: float = 0.0
    scale_x: float = 1.0
    scale_y: float = 1.0
    crs_code: int = 4326

    def __post_init__(self):
        for name in ("origin_x", "origin_y", "scale_x", "scale_y"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not (self.scale_x > 0 and self.scale_y > 0):
            raise ValueError("pixel scales must be positive")
        if not 0 < self.crs_code <= 0xFFFF:
            raise ValueError(f"crs_code {self.crs_code} does not fit a GeoKey")


class RasterImage:
    """A georeferenced RGBA raster, 8 bits per channel.

    ``pixels`` is a C-contiguous ``uint8`` array of shape
    ``(height, width, 4)``, row-major from the top-left corner.
    ``georeferenced`` records whether the transform came from real GeoTIFF
    tags; it is metadata and does not take part in equality.
    """

    __slots__ = ("pixels", "transform", "georeferenced")

    def __init__(self, pixels, transform: Optional[GeoTransform] = None,
                 georeferenced: bool = True):
        arr = np.ascontiguousarray(pixels, dtype=np.uint8)
        if arr.ndim != 3 or arr.shape[2] != 4:
            raise ValueError(f"pixels must have shape (h, w, 4), got {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("raster must be at least 1 x 1")
        self.pixels = arr
        self.transform = transform if transform is not None else GeoTransform()
        self.georeferenced = georeferenced

    @classmethod
    def filled(cls, width: int, height: int, rgba=(0, 0, 0, 255),
               transform: Optional[GeoTransform] = None) -> "RasterImage":
        px = np.empty((height, width, 4), dtype=np.uint8)
        px[...] = rgba
        return cls(px, transform)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, RasterImage):
            return NotImplemented
        return (self.transform == other.transform
                and self.pixels.shape == other.pixels.shape
                and bool(np.array_equal(self.pixels, other.pixels)))

    def __repr__(self):
        return f"RasterImage({self.width}x{self.height}, {self.transform!r})"


@dataclass(frozen=True)
class ColorBand:
    """A named colour centre plus a scalar per-channel tolerance."""

    name: str
    color: RGB
    tolerance: int
    class_label: str = ""
    comment: Optional[str] = None

    def __post_init__(self):
        if not self.name or not self.name.strip():
            raise SchemaError("band name must be nonempty")
        color = tuple(int(c) for c in self.color)
        if len(color) != 3 or any(not 0 <= c <= 255 for c in color):
            raise SchemaError(f"band {self.name!r}: color must be three 0-255 values")
        object.__setattr__(self, "color", color)
        tol = self.tolerance
        if isinstance(tol, bool) or int(tol) != tol or not 0 <= tol <= 255:
            raise SchemaError(f"band {self.name!r}: tolerance {tol!r} outside 0-255")
        object.__setattr__(self, "tolerance", int(tol))
        if not self.class_label:
            object.__setattr__(self, "class_label", class_label_from_name(self.name))

    @property
    def hex_color(self) -> str:
        return "%02x%02x%02x" % self.color


@dataclass(frozen=True)
class BandSet:
    """Ordered colour bands plus the class -> category hierarchy.

    Band order matters: it is the tie-break order of the classifier.
    Hierarchy members that name neither a band class nor another category
    simply contribute zero area.
    """

    bands: Tuple[ColorBand, ...] = ()
    hierarchy: Mapping[str, Tuple[str, ...]] = field(
        default_factory=lambda: dict(DEFAULT_HIERARCHY))

    def __post_init__(self):
        object.__setattr__(self, "bands", tuple(self.bands))
        object.__setattr__(self, "hierarchy",
                           {k: tuple(v) for k, v in self.hierarchy.items()})
        self._check_acyclic()

    def _check_acyclic(self):
        state: dict[str, int] = {}

        def visit(node, path):
            if state.get(node) == 2:
                return
            if state.get(node) == 1:
                raise SchemaError("category hierarchy has a cycle: "
                                  + " -> ".join(path + [node]))
            state[node] = 1
            for child in self.hierarchy.get(node, ()):
                visit(child, path + [node])
            state[node] = 2

        for cat in self.hierarchy:
            visit(cat, [])

    def __len__(self):
        return len(self.bands)

    def __iter__(self):
        return iter(self.bands)

    def __getitem__(self, i) -> ColorBand:
        return self.bands[i]

    @property
    def class_labels(self) -> list[str]:
        """Distinct class labels in first-appearance order."""
        seen: dict[str, None] = {}
        for b in self.bands:
            seen.setdefault(b.class_label, None)
        return list(seen)

    def colors_array(self) -> np.ndarray:
        return np.array([b.color for b in self.bands], dtype=np.int32).reshape(-1, 3)

    def tolerances_array(self) -> np.ndarray:
        return np.array([b.tolerance for b in self.bands], dtype=np.int32)

    def with_band(self, index: int, **changes) -> "BandSet":
        bands = list(self.bands)
        bands[index] = replace(bands[index], **changes)
        return BandSet(tuple(bands), self.hierarchy)

    def with_tolerances(self, tolerances: Iterable[int]) -> "BandSet":
        bands = tuple(replace(b, tolerance=int(t))
                      for b, t in zip(self.bands, tolerances, strict=True))
        return BandSet(bands, self.hierarchy)


@dataclass(frozen=True)
class Region:
    """A boundary polygon: closed rings combined under the even-odd rule."""

    id: str
    rings: Tuple[Tuple[Tuple[float, float], ...], ...] = ()

    def __post_init__(self):
        rings = []
        for k, ring in enumerate(self.rings):
            pts = tuple((float(x), float(y)) for x, y in ring)
            if len(pts) < 4:
                raise SchemaError(f"region {self.id!r} ring {k}: {len(pts)} points, need >= 4")
            if pts[0] != pts[-1]:
                raise SchemaError(f"region {self.id!r} ring {k} is not closed")
            rings.append(pts)
        object.__setattr__(self, "rings", tuple(rings))

    def ring_arrays(self) -> list[np.ndarray]:
        return [np.asarray(r, dtype=np.float64) for r in self.rings]

    def bounds(self):
        pts = [p for r in self.rings for p in r]
        if not pts:
            return None
        xs, ys = zip(*pts)
        return min(xs), min(ys), max(xs), max(ys)


@dataclass(frozen=True)
class CensusRecord:
    region_id: str
    class_name: str
    area_km2: float


@dataclass(frozen=True)
class CensusTable:
    records: Tuple[CensusRecord, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        seen = set()
        for r in self.records:
            if not (r.area_km2 >= 0 and math.isfinite(r.area_km2)):
                raise SchemaError(f"census area for {r.class_name!r} must be >= 0")
            key = (r.region_id, r.class_name.strip().casefold())
            if key in seen:
                raise SchemaError(f"duplicate census row {r.region_id}/{r.class_name}")
            seen.add(key)

    def __len__(self):
        return len(self.records)

    @classmethod
    def from_mapping(cls, region_id: str, areas: Mapping[str, float]) -> "CensusTable":
        return cls(tuple(CensusRecord(region_id, k, float(v)) for k, v in areas.items()))

    def for_region(self, region_id: str) -> dict[str, CensusRecord]:
        """Records of one region keyed by case-folded, trimmed class name."""
        return {r.class_name.strip().casefold(): r
                for r in self.records if r.region_id == region_id}

    @property
    def region_ids(self) -> list[str]:
        return list(dict.fromkeys(r.region_id for r in self.records))

