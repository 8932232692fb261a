import json
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from lulc.classify import LabelField, classify_raster
from lulc.codes import NODATA, UNCLASSIFIED
from lulc.errors import BadFactor, MissingFixedValue
from lulc.geoformats import BandSet, CensusTable, ColorBand, GeoTransform, RasterImage, Region
from lulc.zonal import (COMPARED, NO_CENSUS, NO_COMPUTED, AreaMode, AreaReport,
                        aggregate_categorical, aggregate_transform, area_report, compare,
                        pixel_area_km2, pixel_center_geo, point_in_region, rasterize_region,
                        rollup_categories)

from helpers import (TOWNSHIP_COMPUTED, TOWNSHIP_CENSUS, segment_distance, star_ring,
                     vertical_ray_inside)

SQUARE = [(0, 0), (0, 10), (10, 10), (10, 0), (0, 0)]
HOLE = [(4, 4), (4, 6), (6, 6), (6, 4), (4, 4)]
UNIT = AreaMode.fixed(1.0)


@pytest.mark.parametrize("t,row,col,expected", [
    (GeoTransform(0, 0, 1, 1), 0, 0, (0.5, -0.5)),
    (GeoTransform(-112.0, 52.5, 0.001, 0.001), 10, 20, (-111.9795, 52.4895)),
    (GeoTransform(100, 200, 2, 3), 0, 0, (101, 198.5)),
])
def test_pixel_center(t, row, col, expected):
    assert pixel_center_geo(t, row, col) == pytest.approx(expected, abs=1e-12)


def test_point_in_region():
    sq = Region("a", (SQUARE,))
    assert point_in_region((5, 5), sq)
    assert not point_in_region((15, 5), sq)
    assert not point_in_region((5, 5), Region("b", (SQUARE, HOLE)))
    assert point_in_region((2, 5), Region("b", (SQUARE, HOLE)))


def test_rasterize_examples(backend, monkeypatch):
    from lulc import kernels
    monkeypatch.setattr(kernels, "rasterize_even_odd", backend.rasterize_even_odd)
    t = GeoTransform(0, 4, 1, 1)
    full = Region("f", ([(0, 0), (0, 4), (4, 4), (4, 0), (0, 0)],))
    assert rasterize_region(full, t, 4, 4).all()
    part = Region("p", ([(0, 0), (0, 2), (2, 2), (2, 0), (0, 0)],))
    m = rasterize_region(part, t, 4, 4)
    # rows 2,3 have centre y in (0,2); cols 0,1 have centre x in (0,2)
    expected = np.zeros((4, 4), bool)
    expected[2:, :2] = True
    assert np.array_equal(m, expected)
    assert not rasterize_region(Region("z", ()), t, 4, 4).any()


def test_pixel_area_modes():
    t = GeoTransform(0, 0, 30, 30, 32612)
    assert pixel_area_km2(t, 0, "fixed", 2.23e-5) == 2.23e-5
    assert pixel_area_km2(t, 0, "projected") == pytest.approx(9e-4, rel=1e-12)
    g = GeoTransform(-112.0, 52.0005, 0.001, 0.001)
    # cos(52 deg) * 0.11132 * 0.110574, evaluated independently at high precision
    assert pixel_area_km2(g, 0, "geographic") == pytest.approx(0.00757823723759644, rel=1e-12)
    with pytest.raises(MissingFixedValue):
        pixel_area_km2(t, 0, "fixed")
    with pytest.raises(MissingFixedValue):
        AreaMode("fixed")


def test_total_area_full_scene():
    field = LabelField(np.zeros((2048, 2045), np.uint16))
    bands = BandSet((ColorBand("Band 1 - Wheat", (0x60, 0x6F, 0x55), 10),))
    rep = area_report(field, bands, GeoTransform(0, 0), AreaMode.fixed(2.23e-5))
    assert rep.total_km2 == pytest.approx(93.395968, abs=1e-9)
    assert round(rep.total_km2) == 93


def test_class_rollup_additive():
    labels = np.full((1, 20), UNCLASSIFIED, np.uint16)
    labels[0, :10] = 0
    labels[0, 10:15] = 5
    bands = BandSet(tuple(ColorBand(f"Band {i} - {c}", (i, i, i), 1) for i, c in
                          enumerate(["Wheat", "Canola", "Pulses", "Pasture", "Misc Crop", "Wheat"])))
    rep = area_report(LabelField(labels), bands, GeoTransform(0, 0), UNIT)
    assert rep.per_class["Wheat"] == 15
    assert rep.per_category["Crop"] == 15
    assert rep.unclassified_km2 == 5 and rep.total_km2 == 20


def test_township_rollup():
    values = dict(TOWNSHIP_COMPUTED, **{"Misc Crop": 9.26})
    cats = rollup_categories(values, {"Crop": ("Wheat", "Canola", "Pulses", "Misc Crop"),
                                      "Agri Land": ("Crop", "Pasture")})
    assert cats["Crop"] == pytest.approx(56.19, abs=1e-9)
    assert cats["Agri Land"] == pytest.approx(70.90, abs=1e-9)


def _township_report(extra=None):
    per_class = dict(TOWNSHIP_COMPUTED)
    per_class.update(extra or {})
    return AreaReport("TO39R20W4", per_class=per_class)


def test_compare_township():
    census = CensusTable.from_mapping("TO39R20W4", TOWNSHIP_CENSUS)
    cmp = compare(_township_report({"Water": 1.87}), census, "TO39R20W4")
    wheat = cmp.row("wheat")
    assert wheat.abs_error_km2 == pytest.approx(-1.66, abs=1e-9)
    assert wheat.rel_error == pytest.approx(0.0646, abs=1e-4)
    assert wheat.status == COMPARED
    assert cmp.row("Water").status == NO_CENSUS
    assert cmp.row("Water").census_km2 is None
    assert cmp.objective_km2 == pytest.approx(6.26, abs=1e-9)
    assert "Wheat,25.69,24.03,-1.66,0.0646,compared" in cmp.to_csv().splitlines()
    assert "Water,,1.87,,,no-census-reference" in cmp.to_csv().splitlines()
    assert json.loads(cmp.to_json())["rows"][0]["class_name"] == "Wheat"


def test_compare_identity_and_missing():
    census = CensusTable.from_mapping("r", dict(TOWNSHIP_COMPUTED, Barley=3.0))
    cmp = compare(_township_report(), census, "r")
    assert cmp.objective_km2 == 0
    assert all(r.abs_error_km2 == 0 for r in cmp.rows if r.status == COMPARED)
    assert cmp.row("Barley").status == NO_COMPUTED
    assert not cmp.converged(0.1)
    assert compare(_township_report(), CensusTable(()), "r").objective_km2 == 0


def test_compare_other_region_ignored():
    census = CensusTable.from_mapping("other", TOWNSHIP_CENSUS)
    cmp = compare(_township_report(), census, "TO39R20W4")
    assert all(r.status == NO_CENSUS for r in cmp.rows)


def test_report_json_roundtrip(seven_bands):
    rng = np.random.default_rng(3)
    field = LabelField(rng.choice(np.array([0, 1, 3, UNCLASSIFIED, NODATA], np.uint16), (9, 7)))
    rep = area_report(field, seven_bands, GeoTransform(0, 0), AreaMode.fixed(0.5), "x")
    assert AreaReport.from_json(rep.to_json()) == rep
    assert rep.to_csv().splitlines()[0] == "kind,name,area_km2"


A, B, C, D = 0, 1, 2, 3


def test_aggregate_examples():
    f = LabelField(np.array([[A, A], [B, NODATA]], np.uint16))
    assert aggregate_categorical(f, 2).labels.tolist() == [[A]]
    u = LabelField(np.zeros((4, 4), np.uint16))
    for rule in ("majority", "central"):
        out = aggregate_categorical(u, 2, rule)
        assert out.labels.tolist() == [[0, 0], [0, 0]]
    g = LabelField(np.array([[A, B], [C, D]], np.uint16))
    assert aggregate_categorical(g, 2, "central").labels.tolist() == [[D]]
    allnod = LabelField(np.full((2, 2), NODATA, np.uint16))
    assert aggregate_categorical(allnod, 2).labels.tolist() == [[NODATA]]


def test_aggregate_partial_blocks():
    f = LabelField(np.arange(15, dtype=np.uint16).reshape(3, 5))
    out = aggregate_categorical(f, 2, "central")
    assert out.labels.shape == (2, 3)
    # bottom-right block is the single cell (2,4): centre clipped to it
    assert out.labels[1, 2] == 14
    assert aggregate_transform(GeoTransform(1, 2, 0.5, 0.25), 2) == GeoTransform(1, 2, 1.0, 0.5)


@pytest.mark.parametrize("factor", [0, 1, -2, 2.0, True])
def test_bad_factor(factor):
    with pytest.raises(BadFactor):
        aggregate_categorical(LabelField(np.zeros((2, 2), np.uint16)), factor)


# -- properties ---------------------------------------------------------------

codes = st.sampled_from([0, 1, 2, UNCLASSIFIED, NODATA])


@st.composite
def fields(draw):
    h, w = draw(st.integers(1, 20)), draw(st.integers(1, 20))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    return LabelField(rng.choice(np.array([0, 1, 2, UNCLASSIFIED, NODATA], np.uint16), (h, w)))


BANDS3 = BandSet((ColorBand("Band 1 - Wheat", (1, 1, 1), 0),
                  ColorBand("Band 2 - Wheat", (2, 2, 2), 0),
                  ColorBand("Band 3 - Canola", (3, 3, 3), 0)))


@settings(max_examples=100, deadline=None)
@given(fields(), st.sampled_from(["fixed", "projected", "geographic"]))
def test_area_conservation(field, mode):
    t = GeoTransform(-100.0, 50.0, 0.01, 0.02) if mode == "geographic" else GeoTransform(0, 0, 20, 30)
    am = AreaMode(mode, 0.37 if mode == "fixed" else None)
    rep = area_report(field, BANDS3, t, am)
    grid = sum(pixel_area_km2(t, r, mode, am.fixed_value) for r in range(field.height)) * field.width
    parts = sum(rep.per_band.values()) + rep.unclassified_km2 + rep.nodata_km2
    assert parts == pytest.approx(grid, rel=1e-9)
    assert rep.total_km2 == pytest.approx(grid, rel=1e-9)
    assert rep.per_class["Wheat"] == pytest.approx(
        rep.per_band["Band 1 - Wheat"] + rep.per_band["Band 2 - Wheat"], rel=1e-12)
    assert rep.pixel_counts["Wheat"] == field.count(0) + field.count(1)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 16), st.integers(1, 16), st.integers(0, 2**32 - 1))
def test_mask_equivalence(h, w, seed):
    rng = np.random.default_rng(seed)
    px = rng.integers(0, 4, (h, w, 4), dtype=np.uint8)
    px[..., 3] = rng.choice([0, 255], (h, w), p=[0.1, 0.9])
    img = RasterImage(px)
    mask = rng.random((h, w)) < 0.6
    t, am = GeoTransform(0, 0), AreaMode.fixed(0.25)
    masked = area_report(classify_raster(img, BANDS3, mask), BANDS3, t, am)
    recoded = classify_raster(img, BANDS3).labels.copy()
    recoded[~mask] = NODATA
    assert masked == area_report(LabelField(recoded), BANDS3, t, am)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rasterize_matches_point_test(seed):
    import random
    rng = random.Random(seed)
    rings = [star_ring(rng, 5, 5, 1, 4.5, rng.randint(3, 12))]
    if rng.random() < 0.5:
        rings.append(star_ring(rng, 5, 5, 0.2, 1.0, rng.randint(3, 6)))
    region = Region("r", tuple(rings))
    t = GeoTransform(rng.uniform(-1, 1), rng.uniform(9, 11), rng.uniform(0.1, 0.7), rng.uniform(0.1, 0.7))
    w, h = rng.randint(1, 30), rng.randint(1, 30)
    m = rasterize_region(region, t, w, h)
    for r in range(h):
        for c in range(w):
            assert m[r, c] == point_in_region(pixel_center_geo(t, r, c), region)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-1, 11), st.floats(-1, 11))
def test_point_in_region_vs_oracle(seed, x, y):
    import random
    rng = random.Random(seed)
    rings = [star_ring(rng, 5, 5, 0.5, 5, rng.randint(3, 10)) for _ in range(rng.randint(1, 3))]
    assume(all(segment_distance((x, y), a, b) > 1e-9
               for ring in rings for a, b in zip(ring, ring[1:])))
    assert point_in_region((x, y), Region("r", tuple(rings))) == vertical_ray_inside((x, y), rings)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 20), st.integers(1, 20), st.integers(2, 5), st.integers(0, 2))
def test_majority_preserves_single_label(h, w, f, code):
    rng = np.random.default_rng(h * 100 + w)
    labels = np.where(rng.random((h, w)) < 0.5, code, NODATA).astype(np.uint16)
    labels[0, 0] = code
    out = aggregate_categorical(LabelField(labels), f)
    assert out.labels.shape == (math.ceil(h / f), math.ceil(w / f))
    assert set(np.unique(out.labels)) <= {code, NODATA}
    assert out.labels[0, 0] == code
