import numpy as np

from lulc.geoformats import RasterImage, write_ppm


def test_opaque_red():
    assert write_ppm(RasterImage.filled(1, 1, (255, 0, 0, 255))) == b"P6\n1 1\n255\n\xff\x00\x00"


def test_transparent_is_white():
    assert write_ppm(RasterImage.filled(1, 1, (10, 20, 30, 0)))[-3:] == b"\xff\xff\xff"


def test_half_alpha_blend():
    # 0*128/255 + 255*127/255 = 127.0 -> 127
    assert write_ppm(RasterImage.filled(1, 1, (0, 0, 0, 128)))[-3:] == bytes([127] * 3)


def test_pixel_order():
    px = np.array([[[1, 2, 3, 255], [4, 5, 6, 255]]], np.uint8)
    data = write_ppm(RasterImage(px))
    assert data == b"P6\n2 1\n255\n" + bytes([1, 2, 3, 4, 5, 6])
