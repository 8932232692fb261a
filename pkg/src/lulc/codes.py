"""Label codes shared by the classifier, the kernels and the reports.

Band indices occupy ``0 .. N-1``. The two sentinels sit at the top of the
``uint16`` range so that "lowest code wins" tie-breaks prefer real bands.
"""
import numpy as np

LABEL_DTYPE = np.uint16
UNCLASSIFIED = 0xFFFE
NODATA = 0xFFFF
MAX_BANDS = UNCLASSIFIED

#: pixels with alpha below this are NODATA
ALPHA_THRESHOLD = 128


def code_name(code: int, bands=None) -> str:
    if code == UNCLASSIFIED:
        return "UNCLASSIFIED"
    if code == NODATA:
        return "NODATA"
    if bands is not None and code < len(bands):
        return bands[code].name
    return f"band{code}"
