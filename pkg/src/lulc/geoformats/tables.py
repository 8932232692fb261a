"""CSV inputs: census reference areas and the optional category hierarchy."""
from __future__ import annotations

import csv
import io
import math

from lulc.errors import CsvError, SchemaError
from lulc.geoformats.model import BandSet, CensusRecord, CensusTable

CENSUS_HEADER = ["region", "class", "area_km2"]
HIERARCHY_HEADER = ["category", "member"]


def _rows(text: str, header: list[str], what: str):
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise CsvError(f"{what}: not UTF-8 ({exc})") from None
    reader = csv.reader(io.StringIO(text.lstrip("﻿")))
    found = next(reader, None)
    if found is None or [h.strip() for h in found] != header:
        raise CsvError(f"{what}: header must be {','.join(header)}, got {found!r}")
    for row in reader:
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise CsvError(f"{what} line {reader.line_num}: expected {len(header)} "
                           f"columns, got {len(row)}")
        yield reader.line_num, [c.strip() for c in row]


def load_census_csv(text: str | bytes) -> CensusTable:
    """Parse ``region,class,area_km2`` rows.

    Duplicate (region, class) keys are rejected, comparing class names
    case-insensitively.
    """
    records = []
    seen: dict[tuple, int] = {}
    for line, (region, cls, area) in _rows(text, CENSUS_HEADER, "census CSV"):
        if not region or not cls:
            raise CsvError(f"census CSV line {line}: empty region or class")
        try:
            value = float(area)
        except ValueError:
            raise CsvError(f"census CSV line {line}: area {area!r} is not a number") from None
        if not math.isfinite(value) or value < 0:
            raise CsvError(f"census CSV line {line}: area {area!r} must be >= 0")
        key = (region, cls.casefold())
        if key in seen:
            raise CsvError(f"census CSV line {line}: duplicate {region}/{cls} "
                           f"(first on line {seen[key]})")
        seen[key] = line
        records.append(CensusRecord(region, cls, value))
    return CensusTable(tuple(records))


def load_hierarchy_csv(text: str | bytes) -> dict[str, tuple[str, ...]]:
    """Parse ``category,member`` edges into a category -> members mapping."""
    out: dict[str, list[str]] = {}
    for line, (cat, member) in _rows(text, HIERARCHY_HEADER, "hierarchy CSV"):
        if not cat or not member:
            raise CsvError(f"hierarchy CSV line {line}: empty category or member")
        members = out.setdefault(cat, [])
        if member not in members:
            members.append(member)
    hierarchy = {k: tuple(v) for k, v in out.items()}
    try:
        BandSet((), hierarchy)
    except SchemaError as exc:
        raise CsvError(f"hierarchy CSV: {exc}") from None
    return hierarchy


def dump_hierarchy_csv(hierarchy) -> str:
    lines = [",".join(HIERARCHY_HEADER)]
    lines += [f"{cat},{m}" for cat, members in hierarchy.items() for m in members]
    return "\n".join(lines) + "\n"
