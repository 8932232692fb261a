"""Minimal GeoTIFF codec.

Reads baseline TIFF 6.0 images that are uncompressed, strip-based,
chunky, 8 bits per sample, with 3 (RGB) or 4 (RGBA) samples per pixel.
Writes little-endian RGBA with ModelPixelScale, ModelTiepoint and a
small GeoKey directory.
"""
from __future__ import annotations

import struct

import numpy as np

from lulc.errors import BadMagic, Truncated, UnsupportedFeature
from lulc.geoformats.model import GeoTransform, RasterImage

# baseline tags
IMAGE_WIDTH = 256
IMAGE_LENGTH = 257
BITS_PER_SAMPLE = 258
COMPRESSION = 259
PHOTOMETRIC = 262
STRIP_OFFSETS = 273
SAMPLES_PER_PIXEL = 277
ROWS_PER_STRIP = 278
STRIP_BYTE_COUNTS = 279
PLANAR_CONFIG = 284
EXTRA_SAMPLES = 338
SAMPLE_FORMAT = 339
TILE_WIDTH = 322
TILE_OFFSETS = 324
# GeoTIFF tags
MODEL_PIXEL_SCALE = 33550
MODEL_TIEPOINT = 33922
GEO_KEY_DIRECTORY = 34735

GT_MODEL_TYPE = 1024
GT_RASTER_TYPE = 1025
GEOGRAPHIC_TYPE = 2048
PROJECTED_CS_TYPE = 3072

BYTE, ASCII, SHORT, LONG, RATIONAL = 1, 2, 3, 4, 5
SBYTE, UNDEFINED, SSHORT, SLONG, SRATIONAL, FLOAT, DOUBLE = 6, 7, 8, 9, 10, 11, 12

# type code -> (struct char, size)
_TYPES = {
    BYTE: ("B", 1), ASCII: ("B", 1), SHORT: ("H", 2), LONG: ("I", 4),
    RATIONAL: ("II", 8), SBYTE: ("b", 1), UNDEFINED: ("B", 1),
    SSHORT: ("h", 2), SLONG: ("i", 4), SRATIONAL: ("ii", 8),
    FLOAT: ("f", 4), DOUBLE: ("d", 8),
}

STRIP_TARGET_BYTES = 64 * 1024


def _is_geographic(crs_code: int) -> bool:
    return 4000 <= crs_code < 5000


class _Reader:
    def __init__(self, buf: bytes):
        self.buf = memoryview(buf)
        if len(buf) < 8:
            if len(buf) >= 2 and bytes(buf[:2]) not in (b"II", b"MM"):
                raise BadMagic("not a TIFF stream")
            raise Truncated("TIFF header: need 8 bytes")
        order = bytes(buf[:2])
        if order == b"II":
            self.bo = "<"
        elif order == b"MM":
            self.bo = ">"
        else:
            raise BadMagic(f"not a TIFF stream (starts with {bytes(buf[:4])!r})")
        magic = self.unpack("H", 2)[0]
        if magic == 43:
            raise UnsupportedFeature("BigTIFF is not supported")
        if magic != 42:
            raise BadMagic(f"bad TIFF magic number {magic}")

    def unpack(self, fmt: str, offset: int, what: str = "TIFF data"):
        size = struct.calcsize(self.bo + fmt)
        if offset < 0 or offset + size > len(self.buf):
            raise Truncated(f"{what}: offset {offset}+{size} beyond {len(self.buf)} bytes")
        return struct.unpack_from(self.bo + fmt, self.buf, offset)

    def ifd(self, offset: int) -> dict[int, tuple]:
        (count,) = self.unpack("H", offset, "IFD entry count")
        tags: dict[int, tuple] = {}
        for i in range(count):
            pos = offset + 2 + 12 * i
            tag, typ, n = self.unpack("HHI", pos, "IFD entry")
            if typ not in _TYPES:
                continue  # unknown types are skipped, as TIFF readers must
            ch, size = _TYPES[typ]
            nbytes = size * n
            if nbytes <= 4:
                data_at = pos + 8
            else:
                (data_at,) = self.unpack("I", pos + 8, "IFD value offset")
            fmt = f"{n * len(ch)}{ch[0]}" if len(ch) == 2 else f"{n}{ch}"
            values = self.unpack(fmt, data_at, f"tag {tag} values")
            if typ in (RATIONAL, SRATIONAL):
                values = tuple(values[k] / values[k + 1] if values[k + 1] else float("nan")
                               for k in range(0, len(values), 2))
            tags[tag] = values
        return tags


def _one(tags, tag, default=None):
    v = tags.get(tag)
    if not v:
        if default is None:
            raise UnsupportedFeature(f"required TIFF tag {tag} missing")
        return default
    return v[0]


def read_geotiff(data: bytes) -> RasterImage:
    """Decode the first image of a TIFF stream.

    Raises
    ------
    BadMagic
        Not a TIFF byte stream.
    UnsupportedFeature
        Compression, tiling, planar layout or bit depth outside the subset.
    Truncated
        Any structure or strip lies beyond the end of ``data``.
    """
    r = _Reader(bytes(data))
    (ifd_off,) = r.unpack("I", 4, "IFD offset")
    tags = r.ifd(ifd_off)

    if TILE_WIDTH in tags or TILE_OFFSETS in tags:
        raise UnsupportedFeature("tiled TIFF layout is not supported")
    compression = _one(tags, COMPRESSION, 1)
    if compression != 1:
        raise UnsupportedFeature(f"compression {compression} is not supported")
    width = _one(tags, IMAGE_WIDTH)
    height = _one(tags, IMAGE_LENGTH)
    if width < 1 or height < 1:
        raise UnsupportedFeature(f"empty image {width}x{height}")
    spp = _one(tags, SAMPLES_PER_PIXEL, 1)
    if spp not in (3, 4):
        raise UnsupportedFeature(f"{spp} samples per pixel; need 3 or 4")
    bits = tags.get(BITS_PER_SAMPLE) or (1,)
    if any(b != 8 for b in bits):
        raise UnsupportedFeature(f"bits per sample {bits}; need 8")
    if spp > 1 and _one(tags, PLANAR_CONFIG, 1) != 1:
        raise UnsupportedFeature("planar configuration 2 is not supported")
    if any(f != 1 for f in tags.get(SAMPLE_FORMAT, (1,))):
        raise UnsupportedFeature("only unsigned integer samples are supported")
    photometric = _one(tags, PHOTOMETRIC, 2)
    if photometric != 2:
        raise UnsupportedFeature(f"photometric interpretation {photometric}; need RGB")

    offsets = tags.get(STRIP_OFFSETS)
    counts = tags.get(STRIP_BYTE_COUNTS)
    if offsets is None or counts is None:
        raise UnsupportedFeature("strip offsets/byte counts missing")
    if len(offsets) != len(counts):
        raise UnsupportedFeature("strip offset and byte count arrays differ in length")
    rows_per_strip = min(_one(tags, ROWS_PER_STRIP, 0xFFFFFFFF), height)
    if rows_per_strip < 1:
        raise UnsupportedFeature("RowsPerStrip must be positive")
    row_bytes = width * spp
    if height * row_bytes > len(r.buf):
        raise Truncated(f"{width}x{height} image needs {height * row_bytes} sample bytes, "
                        f"stream has {len(r.buf)}")
    n_strips = -(-height // rows_per_strip)
    if len(offsets) < n_strips:
        raise Truncated(f"{len(offsets)} strips listed, {n_strips} needed")

    out = np.empty(height * row_bytes, dtype=np.uint8)
    pos = 0
    buf = r.buf
    for s in range(n_strips):
        rows = min(rows_per_strip, height - s * rows_per_strip)
        need = rows * row_bytes
        off, cnt = offsets[s], counts[s]
        if cnt < need:
            raise Truncated(f"strip {s}: {cnt} bytes, need {need}")
        if off + need > len(buf):
            raise Truncated(f"strip {s}: offset {off}+{need} beyond {len(buf)} bytes")
        out[pos:pos + need] = np.frombuffer(buf, np.uint8, need, off)
        pos += need

    samples = out.reshape(height, width, spp)
    if spp == 4:
        pixels = samples.copy()
    else:
        pixels = np.empty((height, width, 4), dtype=np.uint8)
        pixels[..., :3] = samples
        pixels[..., 3] = 255

    transform, georef = _read_transform(tags)
    return RasterImage(pixels, transform, georeferenced=georef)


def _read_transform(tags) -> tuple[GeoTransform, bool]:
    crs = 4326
    keys = tags.get(GEO_KEY_DIRECTORY)
    if keys and len(keys) >= 4:
        n = keys[3]
        for k in range(n):
            entry = keys[4 + 4 * k: 8 + 4 * k]
            if len(entry) < 4:
                break
            key_id, location, _count, value = entry
            if location == 0 and key_id in (GEOGRAPHIC_TYPE, PROJECTED_CS_TYPE) \
                    and 0 < value < 32767:
                crs = value
    scale = tags.get(MODEL_PIXEL_SCALE)
    tie = tags.get(MODEL_TIEPOINT)
    if scale is None or tie is None or len(scale) < 2 or len(tie) < 6:
        return GeoTransform(crs_code=crs), False
    sx, sy = scale[0], scale[1]
    i, j, _k, x, y, _z = tie[:6]
    try:
        t = GeoTransform(x - i * sx, y + j * sy, sx, sy, crs)
    except ValueError as exc:
        raise UnsupportedFeature(f"unusable georeferencing: {exc}") from None
    return t, True


def write_geotiff(img: RasterImage) -> bytes:
    """Encode ``img`` as a little-endian, uncompressed RGBA GeoTIFF."""
    return _encode(img, "<")


def _encode(img: RasterImage, bo: str) -> bytes:
    w, h = img.width, img.height
    t = img.transform
    row_bytes = w * 4
    rps = max(1, min(h, STRIP_TARGET_BYTES // row_bytes))
    n_strips = -(-h // rps)
    counts = [min(rps, h - s * rps) * row_bytes for s in range(n_strips)]

    if _is_geographic(t.crs_code):
        geokeys = [1, 1, 0, 3,
                   GT_MODEL_TYPE, 0, 1, 2,
                   GT_RASTER_TYPE, 0, 1, 1,
                   GEOGRAPHIC_TYPE, 0, 1, t.crs_code]
    else:
        geokeys = [1, 1, 0, 3,
                   GT_MODEL_TYPE, 0, 1, 1,
                   GT_RASTER_TYPE, 0, 1, 1,
                   PROJECTED_CS_TYPE, 0, 1, t.crs_code]

    # (tag, type, values); strip offsets are patched in once the layout is known
    entries = [
        (IMAGE_WIDTH, LONG, [w]),
        (IMAGE_LENGTH, LONG, [h]),
        (BITS_PER_SAMPLE, SHORT, [8, 8, 8, 8]),
        (COMPRESSION, SHORT, [1]),
        (PHOTOMETRIC, SHORT, [2]),
        (STRIP_OFFSETS, LONG, [0] * n_strips),
        (SAMPLES_PER_PIXEL, SHORT, [4]),
        (ROWS_PER_STRIP, LONG, [rps]),
        (STRIP_BYTE_COUNTS, LONG, counts),
        (PLANAR_CONFIG, SHORT, [1]),
        (EXTRA_SAMPLES, SHORT, [2]),
        (MODEL_PIXEL_SCALE, DOUBLE, [t.scale_x, t.scale_y, 0.0]),
        (MODEL_TIEPOINT, DOUBLE, [0.0, 0.0, 0.0, t.origin_x, t.origin_y, 0.0]),
        (GEO_KEY_DIRECTORY, SHORT, geokeys),
    ]

    ifd_size = 2 + 12 * len(entries) + 4
    cursor = 8 + ifd_size
    value_offsets = {}
    for tag, typ, vals in entries:
        nbytes = _TYPES[typ][1] * len(vals)
        if nbytes > 4:
            cursor += cursor & 1  # word alignment
            value_offsets[tag] = cursor
            cursor += nbytes
    cursor += cursor & 1
    data_start = cursor
    offsets = []
    for c in counts:
        offsets.append(cursor)
        cursor += c
    entries[5] = (STRIP_OFFSETS, LONG, offsets)
    if cursor > 0xFFFFFFFF:
        raise ValueError("image too large for a classic TIFF")

    out = bytearray(data_start)
    out[0:8] = (b"II" if bo == "<" else b"MM") + struct.pack(bo + "HI", 42, 8)
    pos = 8
    struct.pack_into(bo + "H", out, pos, len(entries))
    pos += 2
    for tag, typ, vals in entries:
        ch, size = _TYPES[typ]
        nbytes = size * len(vals)
        packed = struct.pack(f"{bo}{len(vals)}{ch}", *vals)
        if nbytes <= 4:
            struct.pack_into(bo + "HHI", out, pos, tag, typ, len(vals))
            out[pos + 8:pos + 8 + nbytes] = packed
        else:
            struct.pack_into(bo + "HHII", out, pos, tag, typ, len(vals), value_offsets[tag])
            out[value_offsets[tag]:value_offsets[tag] + nbytes] = packed
        pos += 12
    struct.pack_into(bo + "I", out, pos, 0)
    return bytes(out) + img.pixels.tobytes()
