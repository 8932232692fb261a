import pytest

from lulc import kernels
from lulc.geoformats import parse_rangelist_xml

from helpers import SEVEN_BAND_XML

BACKENDS = kernels.available_backends()


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    """Each importable kernel backend in turn."""
    return BACKENDS[request.param]


@pytest.fixture
def seven_bands():
    return parse_rangelist_xml(SEVEN_BAND_XML)


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
