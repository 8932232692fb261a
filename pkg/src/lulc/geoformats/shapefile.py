"""Polygon reader for ESRI ``.shp`` main files.

Only Null (0) and Polygon (5) records are accepted. The ``.shx`` index and
``.dbf`` attributes are not consulted, so region ids default to the record
ordinal.
"""
from __future__ import annotations

import struct

from lulc.errors import BadFileCode, SchemaError, Truncated, UnsupportedShapeType
from lulc.geoformats.model import Region

FILE_CODE = 9994
HEADER_BYTES = 100
NULL_SHAPE = 0
POLYGON = 5

SHAPE_NAMES = {0: "Null", 1: "Point", 3: "PolyLine", 5: "Polygon", 8: "MultiPoint",
               11: "PointZ", 13: "PolyLineZ", 15: "PolygonZ", 18: "MultiPointZ",
               21: "PointM", 23: "PolyLineM", 25: "PolygonM", 28: "MultiPointM",
               31: "MultiPatch"}


def _unpack(fmt, buf, offset, what):
    size = struct.calcsize(fmt)
    if offset < 0 or offset + size > len(buf):
        raise Truncated(f"{what}: need {size} bytes at offset {offset}, have {len(buf)}")
    return struct.unpack_from(fmt, buf, offset)


def read_shapefile_polygons(data: bytes) -> list[Region]:
    """Parse the polygon records of a shapefile main file.

    Each non-null record becomes one :class:`Region` whose rings follow the
    record's parts array. Region ids are the zero-based record index.
    """
    buf = bytes(data)
    (code,) = _unpack(">i", buf, 0, "shapefile header")
    if code != FILE_CODE:
        raise BadFileCode(f"file code {code}, expected {FILE_CODE}")
    if len(buf) < HEADER_BYTES:
        raise Truncated(f"shapefile header: {len(buf)} of {HEADER_BYTES} bytes")
    (length_words,) = _unpack(">i", buf, 24, "file length")
    file_len = length_words * 2
    if file_len < HEADER_BYTES:
        raise Truncated(f"declared file length {file_len} shorter than the header")
    if file_len > len(buf):
        raise Truncated(f"declared file length {file_len} exceeds {len(buf)} bytes")
    (shape_type,) = _unpack("<i", buf, 32, "header shape type")
    if shape_type not in (NULL_SHAPE, POLYGON):
        raise UnsupportedShapeType(
            f"file shape type {SHAPE_NAMES.get(shape_type, shape_type)}; only Polygon is supported")

    regions = []
    pos = HEADER_BYTES
    index = 0
    while pos < file_len:
        _recno, content_words = _unpack(">ii", buf, pos, f"record {index} header")
        start = pos + 8
        end = start + content_words * 2
        if content_words < 2 or end > file_len:
            raise Truncated(f"record {index}: content of {content_words * 2} bytes "
                            f"overruns the file")
        record = buf[start:end]
        (rtype,) = _unpack("<i", record, 0, f"record {index} shape type")
        if rtype == POLYGON:
            regions.append(_polygon(record, index))
        elif rtype != NULL_SHAPE:
            raise UnsupportedShapeType(
                f"record {index} has shape type {SHAPE_NAMES.get(rtype, rtype)}")
        pos = end
        index += 1
    return regions


def _polygon(record: bytes, index: int) -> Region:
    what = f"record {index}"
    num_parts, num_points = _unpack("<ii", record, 36, what)
    if num_parts < 0 or num_points < 0:
        raise SchemaError(f"{what}: negative part or point count")
    parts = _unpack(f"<{num_parts}i", record, 44, f"{what} parts")
    pts_at = 44 + 4 * num_parts
    coords = _unpack(f"<{2 * num_points}d", record, pts_at, f"{what} points")
    points = list(zip(coords[0::2], coords[1::2]))
    bounds = list(parts) + [num_points]
    rings = []
    for k in range(num_parts):
        a, b = bounds[k], bounds[k + 1]
        if not 0 <= a <= b <= num_points:
            raise SchemaError(f"{what}: part {k} index {a} out of order")
        ring = points[a:b]
        if len(ring) < 4:
            raise Truncated(f"{what}: ring {k} has {len(ring)} points, need >= 4")
        rings.append(ring)
    return Region(str(index), tuple(rings))
