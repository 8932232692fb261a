# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled raster kernels; same contracts as :mod:`lulc._pykernels`."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free, qsort
from libc.string cimport memset

cnp.import_array()

cdef enum:
    UNCLASSIFIED = 0xFFFE
    NODATA = 0xFFFF
    ALPHA_THRESHOLD = 128


def classify_rgba(const cnp.uint8_t[:, :, ::1] pixels,
                  const cnp.int32_t[:, ::1] colors,
                  const cnp.int32_t[::1] tolerances,
                  mask=None):
    cdef Py_ssize_t h = pixels.shape[0], w = pixels.shape[1]
    cdef Py_ssize_t n = tolerances.shape[0]
    cdef Py_ssize_t r, c, i
    cdef int d, dr, dg, db, best_d
    cdef cnp.uint16_t best
    cdef const cnp.uint8_t[:, ::1] m
    cdef bint has_mask = mask is not None
    if has_mask:
        m = np.ascontiguousarray(mask, dtype=np.uint8)
    out_arr = np.empty((h, w), dtype=np.uint16)
    cdef cnp.uint16_t[:, ::1] out = out_arr
    with nogil:
        for r in range(h):
            for c in range(w):
                if pixels[r, c, 3] < ALPHA_THRESHOLD or (has_mask and not m[r, c]):
                    out[r, c] = NODATA
                    continue
                best = UNCLASSIFIED
                best_d = 256
                for i in range(n):
                    dr = <int>pixels[r, c, 0] - colors[i, 0]
                    dg = <int>pixels[r, c, 1] - colors[i, 1]
                    db = <int>pixels[r, c, 2] - colors[i, 2]
                    if dr < 0:
                        dr = -dr
                    if dg < 0:
                        dg = -dg
                    if db < 0:
                        db = -db
                    d = dr
                    if dg > d:
                        d = dg
                    if db > d:
                        d = db
                    if d <= tolerances[i] and d < best_d:
                        best_d = d
                        best = <cnp.uint16_t>i
                out[r, c] = best
    return out_arr


cdef int _cmp_double(const void* a, const void* b) noexcept nogil:
    cdef double x = (<const double*>a)[0], y = (<const double*>b)[0]
    return (x > y) - (x < y)


def rasterize_even_odd(rings, double origin_x, double origin_y,
                       double scale_x, double scale_y,
                       Py_ssize_t width, Py_ssize_t height):
    out_arr = np.zeros((height, width), dtype=bool)
    parts = [np.ascontiguousarray(r, dtype=np.float64) for r in rings]
    cdef Py_ssize_t ne = sum(max(p.shape[0] - 1, 0) for p in parts)
    if ne == 0:
        return out_arr
    edges_arr = np.empty((ne, 4), dtype=np.float64)
    k = 0
    for p in parts:
        m = p.shape[0] - 1
        if m > 0:
            edges_arr[k:k + m, 0] = p[:-1, 0]
            edges_arr[k:k + m, 1] = p[:-1, 1]
            edges_arr[k:k + m, 2] = p[1:, 0]
            edges_arr[k:k + m, 3] = p[1:, 1]
            k += m
    cdef const double[:, ::1] e = edges_arr
    cdef cnp.uint8_t[:, ::1] out = out_arr.view(np.uint8)
    cdef double* xs = <double*>malloc(ne * sizeof(double))
    if xs == NULL:
        raise MemoryError()
    cdef Py_ssize_t row, col, j, nx, le
    cdef double py, px, x1, y1, x2, y2
    try:
        with nogil:
            for row in range(height):
                py = origin_y - (row + 0.5) * scale_y
                nx = 0
                for j in range(ne):
                    x1 = e[j, 0]
                    y1 = e[j, 1]
                    x2 = e[j, 2]
                    y2 = e[j, 3]
                    if (y1 > py) != (y2 > py):
                        xs[nx] = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
                        nx += 1
                if nx == 0:
                    continue
                qsort(xs, nx, sizeof(double), _cmp_double)
                le = 0
                for col in range(width):
                    px = origin_x + (col + 0.5) * scale_x
                    while le < nx and xs[le] <= px:
                        le += 1
                    out[row, col] = (nx - le) & 1
    finally:
        free(xs)
    return out_arr


def aggregate_majority(const cnp.uint16_t[:, ::1] labels, Py_ssize_t factor):
    cdef Py_ssize_t h = labels.shape[0], w = labels.shape[1]
    cdef Py_ssize_t oh = (h + factor - 1) // factor, ow = (w + factor - 1) // factor
    out_arr = np.empty((oh, ow), dtype=np.uint16)
    cdef cnp.uint16_t[:, ::1] out = out_arr
    cdef int* counts = <int*>malloc(65536 * sizeof(int))
    cdef cnp.uint16_t* seen = <cnp.uint16_t*>malloc(factor * factor * sizeof(cnp.uint16_t))
    if counts == NULL or seen == NULL:
        free(counts)
        free(seen)
        raise MemoryError()
    memset(counts, 0, 65536 * sizeof(int))
    cdef Py_ssize_t br, bc, r, c, ns, k
    cdef cnp.uint16_t v, best
    cdef int best_n
    try:
        with nogil:
            for br in range(oh):
                for bc in range(ow):
                    ns = 0
                    for r in range(br * factor, min(br * factor + factor, h)):
                        for c in range(bc * factor, min(bc * factor + factor, w)):
                            v = labels[r, c]
                            if v == NODATA:
                                continue
                            if counts[v] == 0:
                                seen[ns] = v
                                ns += 1
                            counts[v] += 1
                    best = NODATA
                    best_n = 0
                    for k in range(ns):
                        v = seen[k]
                        if counts[v] > best_n or (counts[v] == best_n and v < best):
                            best_n = counts[v]
                            best = v
                        counts[v] = 0
                    out[br, bc] = best
    finally:
        free(counts)
        free(seen)
    return out_arr


def aggregate_central(const cnp.uint16_t[:, ::1] labels, Py_ssize_t factor):
    cdef Py_ssize_t h = labels.shape[0], w = labels.shape[1]
    cdef Py_ssize_t oh = (h + factor - 1) // factor, ow = (w + factor - 1) // factor
    out_arr = np.empty((oh, ow), dtype=np.uint16)
    cdef cnp.uint16_t[:, ::1] out = out_arr
    cdef Py_ssize_t br, bc
    with nogil:
        for br in range(oh):
            for bc in range(ow):
                out[br, bc] = labels[min(br * factor + factor // 2, h - 1),
                                     min(bc * factor + factor // 2, w - 1)]
    return out_arr
