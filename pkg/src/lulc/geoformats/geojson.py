"""Polygon subset of GeoJSON."""
from __future__ import annotations

import json
import math

from lulc.errors import ParseError, SchemaError, UnsupportedGeometry
from lulc.geoformats.model import Region


def read_geojson_polygons(text: str | bytes) -> list[Region]:
    """Extract polygon boundaries from a GeoJSON document.

    Accepts a bare Polygon or MultiPolygon geometry, a Feature, or a
    FeatureCollection. A MultiPolygon becomes a single region holding the
    rings of all its members. A Feature's ``id`` or ``name`` property (if a
    string) names the region; otherwise the feature ordinal is used.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError("invalid UTF-8", exc.start) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[:exc.pos].encode("utf-8"))
        raise ParseError(exc.msg, offset) from None
    if not isinstance(doc, dict):
        raise ParseError("top-level JSON value must be an object", 0)

    kind = doc.get("type")
    if kind == "FeatureCollection":
        features = doc.get("features")
        if not isinstance(features, list):
            raise SchemaError("FeatureCollection without a features array")
        regions = []
        for i, feat in enumerate(features):
            region = _feature(feat, i)
            if region is not None:
                regions.append(region)
        return regions
    if kind == "Feature":
        region = _feature(doc, 0)
        return [] if region is None else [region]
    return [Region("0", _geometry_rings(doc))]


def _feature(feat, index: int) -> Region | None:
    if not isinstance(feat, dict) or feat.get("type") != "Feature":
        raise SchemaError(f"feature {index} is not a Feature object")
    geom = feat.get("geometry")
    if geom is None:
        return None
    props = feat.get("properties") or {}
    region_id = str(index)
    for key in ("id", "name"):
        if isinstance(props.get(key), str):
            region_id = props[key]
            break
    else:
        if isinstance(feat.get("id"), str):
            region_id = feat["id"]
    return Region(region_id, _geometry_rings(geom))


def _geometry_rings(geom) -> tuple:
    if not isinstance(geom, dict):
        raise SchemaError("geometry must be an object")
    kind = geom.get("type")
    coords = geom.get("coordinates")
    if kind == "Polygon":
        return _polygon_rings(coords)
    if kind == "MultiPolygon":
        if not isinstance(coords, list):
            raise SchemaError("MultiPolygon coordinates must be an array")
        return tuple(r for poly in coords for r in _polygon_rings(poly))
    raise UnsupportedGeometry(f"geometry type {kind!r} is not a polygon")


def _polygon_rings(coords) -> tuple:
    if not isinstance(coords, list):
        raise SchemaError("Polygon coordinates must be an array of rings")
    rings = []
    for ring in coords:
        if not isinstance(ring, list):
            raise SchemaError("ring must be an array of positions")
        pts = []
        for pos in ring:
            if (not isinstance(pos, list) or len(pos) < 2
                    or not all(_is_number(v) for v in pos[:2])):
                raise SchemaError(f"bad position {pos!r}")
            pts.append((float(pos[0]), float(pos[1])))
        rings.append(tuple(pts))
    return tuple(rings)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)
