"""Zonal bookkeeping: region masks, pixel areas, class roll-ups and census comparison."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from lulc import kernels
from lulc.classify import LabelField
from lulc.codes import LABEL_DTYPE, NODATA, UNCLASSIFIED
from lulc.errors import BadFactor, MissingFixedValue
from lulc.geoformats.model import BandSet, CensusTable, GeoTransform, Region

# km per degree of longitude at the equator / of latitude
KM_PER_DEG_LON = 111.320
KM_PER_DEG_LAT = 110.574

AREA_MODES = ("fixed", "projected", "geographic")

COMPARED = "compared"
NO_CENSUS = "no-census-reference"
NO_COMPUTED = "no-computed-value"


@dataclass(frozen=True)
class AreaMode:
    """How to turn a pixel into km².

    ``fixed`` uses ``fixed_value`` for every pixel; ``projected`` treats the
    pixel scales as metres; ``geographic`` treats them as degrees and scales
    longitude by the cosine of the row's centre latitude.
    """

    mode: str = "fixed"
    fixed_value: Optional[float] = None

    def __post_init__(self):
        if self.mode not in AREA_MODES:
            raise ValueError(f"area mode must be one of {AREA_MODES}, got {self.mode!r}")
        if self.mode == "fixed":
            if self.fixed_value is None:
                raise MissingFixedValue("fixed area mode needs a per-pixel area")
            if not (self.fixed_value > 0 and math.isfinite(self.fixed_value)):
                raise ValueError(f"fixed pixel area must be positive, got {self.fixed_value}")

    @classmethod
    def fixed(cls, km2: float) -> "AreaMode":
        return cls("fixed", km2)


def pixel_center_geo(t: GeoTransform, row: int, col: int) -> tuple[float, float]:
    return t.origin_x + (col + 0.5) * t.scale_x, t.origin_y - (row + 0.5) * t.scale_y


def point_in_region(p, r: Region) -> bool:
    """Even-odd test of ``p`` against all rings of ``r``.

    Points on a horizontal line through a vertex follow the half-open rule:
    an edge counts when exactly one endpoint is strictly above the point.
    A point exactly on a non-horizontal edge is outside when the edge lies
    to its left or passes through it, i.e. crossings must be strictly right.
    """
    px, py = p
    inside = False
    for ring in r.rings:
        for (x1, y1), (x2, y2) in zip(ring, ring[1:]):
            if (y1 > py) != (y2 > py):
                if px < x1 + (py - y1) * (x2 - x1) / (y2 - y1):
                    inside = not inside
    return inside


def rasterize_region(r: Region, t: GeoTransform, width: int, height: int) -> np.ndarray:
    """Boolean ``(height, width)`` mask of pixels whose centre lies in ``r``."""
    return kernels.rasterize_even_odd(r.ring_arrays(), t.origin_x, t.origin_y,
                                      t.scale_x, t.scale_y, width, height)


def pixel_area_km2(t: GeoTransform, row: int, mode: str = "fixed",
                   fixed_value: Optional[float] = None) -> float:
    if mode == "fixed":
        if fixed_value is None:
            raise MissingFixedValue("fixed area mode needs a per-pixel area")
        return float(fixed_value)
    if mode == "projected":
        return t.scale_x * t.scale_y / 1e6
    if mode == "geographic":
        lat = t.origin_y - (row + 0.5) * t.scale_y
        return (t.scale_x * KM_PER_DEG_LON * math.cos(math.radians(lat))) * (
            t.scale_y * KM_PER_DEG_LAT)
    raise ValueError(f"unknown area mode {mode!r}")


def row_areas_km2(t: GeoTransform, height: int, area_mode: AreaMode) -> np.ndarray:
    return np.array([pixel_area_km2(t, r, area_mode.mode, area_mode.fixed_value)
                     for r in range(height)], dtype=np.float64)


def rollup_categories(class_values: Mapping[str, float],
                      hierarchy: Mapping[str, Sequence[str]]) -> dict:
    """Sum class values into categories, recursing through nested categories.

    Names match case-insensitively; unknown members count as zero.
    """
    by_key = {k.casefold(): v for k, v in class_values.items()}
    cats = {k.casefold(): (k, members) for k, members in hierarchy.items()}
    memo: dict[str, float] = {}

    def value(name):
        key = name.casefold()
        if key in memo:
            return memo[key]
        if key in cats:
            total = sum((value(m) for m in cats[key][1]), start=0)
        else:
            total = by_key.get(key, 0)
        memo[key] = total
        return total

    return {k: value(k) for k in hierarchy}


@dataclass
class AreaReport:
    region_id: str
    per_band: dict = field(default_factory=dict)
    per_class: dict = field(default_factory=dict)
    per_category: dict = field(default_factory=dict)
    unclassified_km2: float = 0.0
    nodata_km2: float = 0.0
    total_km2: float = 0.0
    pixel_counts: dict = field(default_factory=dict)

    @property
    def valid_km2(self) -> float:
        """Area inside the region / mask, i.e. total minus NODATA."""
        return self.total_km2 - self.nodata_km2

    def lookup(self, name: str) -> Optional[float]:
        """Computed area of a class or category, matched case-insensitively."""
        key = name.strip().casefold()
        for table in (self.per_class, self.per_category):
            for k, v in table.items():
                if k.casefold() == key:
                    return v
        return None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "AreaReport":
        d = json.loads(text)
        return cls(**{k: d[k] for k in d if k in cls.__dataclass_fields__})

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "name", "area_km2"])
        for kind, table in (("band", self.per_band), ("class", self.per_class),
                            ("category", self.per_category)):
            for name, v in table.items():
                w.writerow([kind, name, f"{v:.2f}"])
        w.writerow(["other", "UNCLASSIFIED", f"{self.unclassified_km2:.2f}"])
        w.writerow(["other", "NODATA", f"{self.nodata_km2:.2f}"])
        w.writerow(["other", "Total Area", f"{self.total_km2:.2f}"])
        return buf.getvalue()


def area_report(field_: LabelField, bands: BandSet, t: GeoTransform,
                area_mode: AreaMode, region_id: str = "") -> AreaReport:
    """Per-band, per-class and per-category areas of a label field.

    Roll-ups are done on integer pixel counts and scaled to km² once, so a
    class equals the sum of its bands exactly in pixels.
    """
    n = len(bands)
    if field_.max_band_code() >= n:
        raise ValueError("label field references bands beyond the band set")
    h = field_.height
    unc, nod = n, n + 1
    if area_mode.mode == "fixed":
        # every row has the same area: a single row of counts suffices
        row_area = np.array([float(area_mode.fixed_value)])
        counts = np.zeros((1, n + 2), dtype=np.int64)
        for code, c in field_.histogram.items():
            counts[0, unc if code == UNCLASSIFIED else nod if code == NODATA else code] = c
    else:
        row_area = row_areas_km2(t, h, area_mode)
        compact = field_.labels.astype(np.int64)
        compact[field_.labels == UNCLASSIFIED] = unc
        compact[field_.labels == NODATA] = nod
        idx = compact + (np.arange(h, dtype=np.int64) * (n + 2))[:, None]
        counts = np.bincount(idx.ravel(), minlength=h * (n + 2)).reshape(h, n + 2)

    def km2(col_counts) -> float:
        return float(col_counts @ row_area)

    per_band: dict[str, float] = {}
    band_cols: dict[str, np.ndarray] = {}
    class_cols: dict[str, np.ndarray] = {}
    for i, band in enumerate(bands):
        band_cols[band.name] = band_cols.get(band.name, 0) + counts[:, i]
        class_cols[band.class_label] = class_cols.get(band.class_label, 0) + counts[:, i]
    per_band = {k: km2(v) for k, v in band_cols.items()}
    per_class = {k: km2(v) for k, v in class_cols.items()}
    zero = np.zeros(counts.shape[0], dtype=np.int64)
    cat_cols = rollup_categories(class_cols, bands.hierarchy)
    per_category = {k: km2(v if isinstance(v, np.ndarray) else zero)
                    for k, v in cat_cols.items()}
    unclassified = km2(counts[:, unc])
    nodata = km2(counts[:, nod])
    total = sum(per_class.values(), start=0.0) + unclassified + nodata

    pixel_counts = {k: int(v.sum()) for k, v in class_cols.items()}
    pixel_counts["UNCLASSIFIED"] = int(counts[:, unc].sum())
    pixel_counts["NODATA"] = int(counts[:, nod].sum())
    return AreaReport(region_id, per_band, per_class, per_category,
                      unclassified, nodata, total, pixel_counts)


@dataclass
class ComparisonRow:
    class_name: str
    census_km2: Optional[float]
    computed_km2: Optional[float]
    abs_error_km2: Optional[float]
    rel_error: Optional[float]
    status: str

    def within(self, epsilon_rel: float) -> bool:
        """Whether this censused class meets the relative stopping tolerance."""
        if self.status != COMPARED:
            return False
        if self.census_km2 > 0:
            return self.rel_error <= epsilon_rel
        return self.computed_km2 == 0


@dataclass
class ComparisonReport:
    region_id: str
    rows: list
    objective_km2: float

    def row(self, class_name: str) -> Optional[ComparisonRow]:
        key = class_name.strip().casefold()
        return next((r for r in self.rows if r.class_name.casefold() == key), None)

    def converged(self, epsilon_rel: float) -> bool:
        """Every censused class is within ``epsilon_rel``."""
        return all(r.within(epsilon_rel) for r in self.rows if r.status != NO_CENSUS)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["class", "census_km2", "computed_km2", "abs_error_km2",
                    "rel_error", "status"])
        for r in self.rows:
            w.writerow([r.class_name, _fmt(r.census_km2, 2), _fmt(r.computed_km2, 2),
                        _fmt(r.abs_error_km2, 2), _fmt(r.rel_error, 4), r.status])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"region_id": self.region_id,
                           "objective_km2": self.objective_km2,
                           "rows": [asdict(r) for r in self.rows]}, indent=2)


def _fmt(value: Optional[float], places: int) -> str:
    if value is None:
        return ""
    text = f"{value:.{places}f}"
    return text[1:] if text.startswith("-") and float(text) == 0 else text


def compare(report: AreaReport, census: CensusTable, region_id: str) -> ComparisonReport:
    """Join computed areas with the census rows of ``region_id``.

    Census classes come first in census order, then computed classes that
    have no census row. Census names may refer to classes or categories.
    """
    rows = []
    seen = set()
    objective = 0.0
    for rec in census.records:
        if rec.region_id != region_id:
            continue
        name = rec.class_name.strip()
        seen.add(name.casefold())
        computed = report.lookup(name)
        if computed is None:
            rows.append(ComparisonRow(name, rec.area_km2, None, None, None, NO_COMPUTED))
            continue
        err = computed - rec.area_km2
        rel = abs(err) / rec.area_km2 if rec.area_km2 > 0 else None
        objective += abs(err)
        rows.append(ComparisonRow(name, rec.area_km2, computed, err, rel, COMPARED))
    for name, computed in report.per_class.items():
        if name.casefold() not in seen:
            seen.add(name.casefold())
            rows.append(ComparisonRow(name, None, computed, None, None, NO_CENSUS))
    return ComparisonReport(region_id, rows, objective)


def aggregate_categorical(field_: LabelField, factor: int, rule: str = "majority") -> LabelField:
    """Downscale a label field by ``factor`` using block majority or centre cell."""
    if isinstance(factor, bool) or not isinstance(factor, (int, np.integer)) or factor < 2:
        raise BadFactor(f"aggregation factor must be an integer >= 2, got {factor!r}")
    labels = np.ascontiguousarray(field_.labels, dtype=LABEL_DTYPE)
    if rule == "majority":
        out = kernels.aggregate_majority(labels, int(factor))
    elif rule == "central":
        out = kernels.aggregate_central(labels, int(factor))
    else:
        raise ValueError(f"unknown aggregation rule {rule!r}")
    return LabelField(out)


def aggregate_transform(t: GeoTransform, factor: int) -> GeoTransform:
    return GeoTransform(t.origin_x, t.origin_y, t.scale_x * factor, t.scale_y * factor,
                        t.crs_code)
