"""WMS GetMap requests with a content-addressed disk cache."""
from __future__ import annotations

import hashlib
import math
import socket
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import quote

from lulc._io import atomic_write
from lulc.errors import BadBbox, BadSize, HttpStatus, NetworkError, Timeout

VERSIONS = ("1.1.1", "1.3.0")
MAX_REDIRECTS = 3


@dataclass(frozen=True)
class WmsRequest:
    endpoint: str
    layer: str
    bbox: tuple
    width: int
    height: int
    version: str = "1.1.1"
    crs_code: int = 4326
    format: str = "image/tiff"


def _num(v) -> str:
    f = float(v)
    return str(int(f)) if f.is_integer() else repr(f)


def _enc(value: str) -> str:
    # commas separate WMS list items (LAYERS, BBOX) and stay literal
    return quote(str(value), safe=",")


def build_getmap_url(req: WmsRequest) -> str:
    """Deterministic GetMap URL with a fixed parameter order.

    For WMS 1.3.0 with EPSG:4326 the BBOX is written in latitude/longitude
    axis order, as that version requires.
    """
    if req.version not in VERSIONS:
        raise ValueError(f"unsupported WMS version {req.version!r}")
    if len(req.bbox) != 4 or not all(math.isfinite(float(v)) for v in req.bbox):
        raise BadBbox(f"bbox must be four finite numbers, got {req.bbox!r}")
    min_x, min_y, max_x, max_y = req.bbox
    if not (min_x < max_x and min_y < max_y):
        raise BadBbox(f"degenerate bbox {req.bbox!r}")
    if req.width < 1 or req.height < 1:
        raise BadSize(f"image size {req.width}x{req.height} must be at least 1x1")

    crs = f"EPSG:{req.crs_code}"
    if req.version == "1.3.0" and req.crs_code == 4326:
        axes = (min_y, min_x, max_y, max_x)
    else:
        axes = (min_x, min_y, max_x, max_y)
    params = [
        ("SERVICE", "WMS"),
        ("VERSION", req.version),
        ("REQUEST", "GetMap"),
        ("LAYERS", req.layer),
        ("STYLES", ""),
        ("SRS" if req.version == "1.1.1" else "CRS", crs),
        ("BBOX", ",".join(_num(v) for v in axes)),
        ("WIDTH", str(int(req.width))),
        ("HEIGHT", str(int(req.height))),
        ("FORMAT", req.format),
    ]
    query = "&".join(f"{k}={_enc(v)}" for k, v in params)
    sep = "&" if "?" in req.endpoint else "?"
    if req.endpoint.endswith(("?", "&")):
        sep = ""
    return f"{req.endpoint}{sep}{query}"


def cache_path(url: str, cache_dir) -> Path:
    return Path(cache_dir) / (hashlib.sha256(url.encode("utf-8")).hexdigest() + ".bin")


class _LimitedRedirects(urllib.request.HTTPRedirectHandler):
    max_redirections = MAX_REDIRECTS


_opener = urllib.request.build_opener(_LimitedRedirects)


def fetch_map(url: str, cache_dir, timeout: float = 30.0) -> bytes:
    """Return the body for ``url``, from cache when present.

    On a miss, performs one HTTP GET (no retries) and caches a 200 body.

    Raises
    ------
    HttpStatus
        The server answered with anything other than 200.
    Timeout
        No answer within ``timeout`` seconds.
    NetworkError
        Connection-level failure.
    """
    path = cache_path(url, cache_dir)
    try:
        return path.read_bytes()
    except FileNotFoundError:
        pass
    try:
        with _opener.open(url, timeout=timeout) as resp:
            status = resp.status
            body = resp.read()
    except urllib.error.HTTPError as exc:
        raise HttpStatus(exc.code, url) from None
    except urllib.error.URLError as exc:
        if isinstance(exc.reason, (socket.timeout, TimeoutError)):
            raise Timeout(f"timed out fetching {url}") from None
        raise NetworkError(f"cannot fetch {url}: {exc.reason}") from None
    except (socket.timeout, TimeoutError):
        raise Timeout(f"timed out fetching {url}") from None
    except OSError as exc:
        raise NetworkError(f"cannot fetch {url}: {exc}") from None
    if status != 200:
        raise HttpStatus(status, url)
    path.parent.mkdir(parents=True, exist_ok=True)
    atomic_write(path, body)
    return body
