"""RangeList XML: the colour-band configuration document.

::

    <RangeList>
      <Range>
        <Name>Band 1 - Wheat</Name>
        <Comment>Band 1</Comment>      (optional)
        <Color>606f55</Color>          (6 hex digits)
        <Tolerance>10</Tolerance>      (0-255)
        <Class>Wheat</Class>           (optional, written only when the
                                        label differs from the name-derived one)
      </Range>
    </RangeList>
"""
from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from typing import Mapping, Optional, Sequence

from lulc.errors import SchemaError, XmlError
from lulc.geoformats.model import BandSet, ColorBand, class_label_from_name

_HEX6 = re.compile(r"^[0-9a-fA-F]{6}$")
_INT = re.compile(r"^[0-9]+$")


def parse_rangelist_xml(text: str | bytes,
                        hierarchy: Optional[Mapping[str, Sequence[str]]] = None) -> BandSet:
    """Parse a RangeList document into a :class:`BandSet`.

    ``hierarchy`` replaces the built-in Crop / Agri Land roll-up when given.
    """
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise XmlError(f"malformed XML: {exc}") from None
    if root.tag != "RangeList":
        raise SchemaError(f"root element is <{root.tag}>, expected <RangeList>")

    bands = []
    for i, rng in enumerate(root):
        if rng.tag != "Range":
            raise SchemaError(f"unexpected <{rng.tag}> in <RangeList>")
        where = f"Range {i + 1}"
        fields: dict[str, str] = {}
        for child in rng:
            if child.tag not in ("Name", "Comment", "Color", "Tolerance", "Class"):
                raise SchemaError(f"{where}: unexpected element <{child.tag}>")
            if child.tag in fields:
                raise SchemaError(f"{where}: duplicate <{child.tag}>")
            fields[child.tag] = (child.text or "").strip()
        for required in ("Name", "Color", "Tolerance"):
            if required not in fields:
                raise SchemaError(f"{where}: missing <{required}>")
        name = fields["Name"]
        if not name:
            raise SchemaError(f"{where}: empty <Name>")
        color = fields["Color"]
        if not _HEX6.match(color):
            raise SchemaError(f"{where}: Color {color!r} is not 6 hex digits")
        tol = fields["Tolerance"]
        if not _INT.match(tol) or int(tol) > 255:
            raise SchemaError(f"{where}: Tolerance {tol!r} is not an integer 0-255")
        rgb = tuple(int(color[k:k + 2], 16) for k in (0, 2, 4))
        bands.append(ColorBand(name=name, color=rgb, tolerance=int(tol),
                               class_label=fields.get("Class") or "",
                               comment=fields.get("Comment")))
    if hierarchy is None:
        return BandSet(tuple(bands))
    return BandSet(tuple(bands), hierarchy)


def serialize_rangelist_xml(bands: BandSet) -> str:
    """Render ``bands`` as a RangeList document (hierarchy is not included)."""
    root = ET.Element("RangeList")
    for band in bands:
        rng = ET.SubElement(root, "Range")
        ET.SubElement(rng, "Name").text = band.name
        if band.comment is not None:
            ET.SubElement(rng, "Comment").text = band.comment
        ET.SubElement(rng, "Color").text = band.hex_color
        ET.SubElement(rng, "Tolerance").text = str(band.tolerance)
        if band.class_label != class_label_from_name(band.name):
            ET.SubElement(rng, "Class").text = band.class_label
    ET.indent(root, space="  ")
    return ET.tostring(root, encoding="unicode", short_empty_elements=False) + "\n"
