"""Binary PPM (P6) quick-view output."""
import numpy as np

from lulc.geoformats.model import RasterImage


def write_ppm(img: RasterImage) -> bytes:
    """Encode ``img`` as P6 with alpha composited over white."""
    px = img.pixels.astype(np.uint32)
    alpha = px[..., 3:4]
    rgb = (px[..., :3] * alpha + 255 * (255 - alpha) + 127) // 255
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + rgb.astype(np.uint8).tobytes()
