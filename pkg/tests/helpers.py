"""Fixtures built by hand and independent reference implementations.

Nothing here calls into the code paths it is used to check.
"""
import math
import struct
from collections import Counter

import numpy as np

# The seven-band listing with the <Range> elements properly closed.
SEVEN_BAND_XML = """\
<RangeList>
  <Range>
    <Name>Band 1 - Wheat</Name>
    <Comment>Band 1</Comment>
    <Color>606f55</Color>
    <Tolerance>10</Tolerance>
  </Range>
  <Range>
    <Name>Band 2 - Canola</Name>
    <Comment>Band 2</Comment>
    <Color>897966</Color>
    <Tolerance>10</Tolerance>
  </Range>
  <Range>
    <Name>Band 3 - Misc Crop</Name>
    <Comment>Band 3</Comment>
    <Color>a59385</Color>
    <Tolerance>10</Tolerance>
  </Range>
  <Range>
    <Name>Band 4 - Pasture</Name>
    <Comment>Band 4</Comment>
    <Color>5f6655</Color>
    <Tolerance>10</Tolerance>
  </Range>
  <Range>
    <Name>Band 5 - Canola</Name>
    <Comment>Band 5</Comment>
    <Color>515546</Color>
    <Tolerance>10</Tolerance>
  </Range>
  <Range>
    <Name>Band 6 - Wheat</Name>
    <Comment>Band 6</Comment>
    <Color>918070</Color>
    <Tolerance>10</Tolerance>
  </Range>
  <Range>
    <Name>Band 7 - Pulses</Name>
    <Comment>Band 7</Comment>
    <Color>988775</Color>
    <Tolerance>10</Tolerance>
  </Range>
</RangeList>
"""

SEVEN_BAND_COLORS = ["606f55", "897966", "a59385", "5f6655", "515546", "918070", "988775"]

# township TO39R20W4: census and computed areas
TOWNSHIP_CENSUS = {"Wheat": 25.69, "Canola": 23.24, "Pulses": 2.13, "Pasture": 12.58}
TOWNSHIP_COMPUTED = {"Wheat": 24.03, "Canola": 21.05, "Pulses": 1.85, "Pasture": 14.71}

UNCL = 0xFFFE
NOD = 0xFFFF


def hand_tiff_1x1_rgba(pixel=(0x60, 0x6F, 0x55, 0xFF)) -> bytes:
    """A 1x1 uncompressed RGBA TIFF laid out byte by byte.

    0..7     header  II 42 ifd@8
    8..145   IFD     11 entries, next-IFD 0
    146..153 BitsPerSample values 8,8,8,8
    154..157 the pixel
    """
    entries = [
        (256, 3, 1, 1),        # ImageWidth
        (257, 3, 1, 1),        # ImageLength
        (258, 3, 4, 146),      # BitsPerSample -> offset
        (259, 3, 1, 1),        # Compression none
        (262, 3, 1, 2),        # RGB
        (273, 4, 1, 154),      # StripOffsets
        (277, 3, 1, 4),        # SamplesPerPixel
        (278, 4, 1, 1),        # RowsPerStrip
        (279, 4, 1, 4),        # StripByteCounts
        (284, 3, 1, 1),        # PlanarConfiguration chunky
        (338, 3, 1, 2),        # ExtraSamples unassociated alpha
    ]
    out = b"II" + struct.pack("<HI", 42, 8)
    out += struct.pack("<H", len(entries))
    for tag, typ, count, value in entries:
        if typ == 3 and count == 1:
            out += struct.pack("<HHIHH", tag, typ, count, value, 0)
        else:
            out += struct.pack("<HHII", tag, typ, count, value)
    out += struct.pack("<I", 0)
    assert len(out) == 146
    out += struct.pack("<4H", 8, 8, 8, 8)
    out += bytes(pixel)
    return out


def hand_shapefile(rings_per_record, shape_type=5) -> bytes:
    """Assemble a .shp main file from explicit record layouts."""
    records = b""
    xs = [x for rings in rings_per_record for r in rings or [] for x, _ in r] or [0.0]
    ys = [y for rings in rings_per_record for r in rings or [] for _, y in r] or [0.0]
    for recno, rings in enumerate(rings_per_record, start=1):
        if rings is None:
            content = struct.pack("<i", 0)
        else:
            pts = [p for r in rings for p in r]
            parts, k = [], 0
            for r in rings:
                parts.append(k)
                k += len(r)
            rx = [p[0] for p in pts]
            ry = [p[1] for p in pts]
            content = struct.pack("<i4d", shape_type, min(rx), min(ry), max(rx), max(ry))
            content += struct.pack("<ii", len(rings), len(pts))
            content += struct.pack(f"<{len(parts)}i", *parts)
            for x, y in pts:
                content += struct.pack("<2d", x, y)
        records += struct.pack(">ii", recno, len(content) // 2) + content
    length_words = (100 + len(records)) // 2
    header = struct.pack(">7i", 9994, 0, 0, 0, 0, 0, length_words)
    header += struct.pack("<ii", 1000, shape_type)
    header += struct.pack("<8d", min(xs), min(ys), max(xs), max(ys), 0, 0, 0, 0)
    assert len(header) == 100
    return header + records


def naive_classify(pixel, bands):
    """All in-tolerance bands sorted by (distance, index); first one wins."""
    if pixel[3] < 128:
        return NOD
    matches = []
    for i, (color, tol) in enumerate(bands):
        d = max(abs(pixel[0] - color[0]), abs(pixel[1] - color[1]), abs(pixel[2] - color[2]))
        if d <= tol:
            matches.append((d, i))
    return min(matches)[1] if matches else UNCL


def brute_majority(labels, factor):
    h, w = len(labels), len(labels[0])
    out = []
    for r0 in range(0, h, factor):
        row = []
        for c0 in range(0, w, factor):
            cnt = Counter(labels[r][c] for r in range(r0, min(r0 + factor, h))
                          for c in range(c0, min(c0 + factor, w)) if labels[r][c] != NOD)
            if not cnt:
                row.append(NOD)
            else:
                top = max(cnt.values())
                row.append(min(k for k, v in cnt.items() if v == top))
        out.append(row)
    return out


def brute_central(labels, factor):
    h, w = len(labels), len(labels[0])
    return [[labels[min(r0 + factor // 2, h - 1)][min(c0 + factor // 2, w - 1)]
             for c0 in range(0, w, factor)] for r0 in range(0, h, factor)]


def vertical_ray_inside(p, rings):
    """Even-odd parity using a ray cast towards +y (independent of the +x cast)."""
    px, py = p
    inside = False
    for ring in rings:
        for (x1, y1), (x2, y2) in zip(ring, ring[1:]):
            if (x1 > px) != (x2 > px):
                y_at = y1 + (px - x1) * (y2 - y1) / (x2 - x1)
                if y_at > py:
                    inside = not inside
    return inside


def segment_distance(p, a, b):
    px, py = p
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    L = dx * dx + dy * dy
    t = 0.0 if L == 0 else max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / L))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def star_ring(rng, cx, cy, r_min, r_max, n):
    """Closed star-shaped (hence simple) ring around (cx, cy)."""
    angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(n))
    pts = []
    for a in angles:
        r = rng.uniform(r_min, r_max)
        pts.append((cx + r * math.cos(a), cy + r * math.sin(a)))
    pts.append(pts[0])
    return pts


def synthetic_single_band(seed=0, center=(120, 90, 60)):
    """10x10 RGBA scene: 60 pixels within L-inf 5 of ``center``, 40 far away.

    At least one in-class pixel sits at distance exactly 5.
    """
    rng = np.random.default_rng(seed)
    c = np.array(center)
    near = c + rng.integers(-5, 6, (60, 3))
    near[0] = c + np.array([5, -5, 0])
    far = c + rng.choice([-1, 1], (40, 3)) * rng.integers(60, 100, (40, 3))
    far = np.clip(far, 0, 255)
    rgb = np.vstack([near, far])[rng.permutation(100)].reshape(10, 10, 3)
    px = np.concatenate([rgb, np.full((10, 10, 1), 255)], axis=2).astype(np.uint8)
    return px


def exhaustive_single_band(pixels, center, census_km2, pixel_km2):
    """Objective for every tolerance 0..255 by direct distance counting."""
    d = np.abs(pixels[..., :3].astype(int) - np.array(center)).max(axis=2)
    d = d[pixels[..., 3] >= 128]
    return [abs(int((d <= t).sum()) * pixel_km2 - census_km2) for t in range(256)]
