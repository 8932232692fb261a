"""Readers and writers for every file format the pipeline touches."""
from lulc.geoformats.geojson import read_geojson_polygons
from lulc.geoformats.geotiff import read_geotiff, write_geotiff
from lulc.geoformats.model import (
    DEFAULT_HIERARCHY,
    BandSet,
    CensusRecord,
    CensusTable,
    ColorBand,
    GeoTransform,
    RasterImage,
    Region,
    class_label_from_name,
)
from lulc.geoformats.ppm import write_ppm
from lulc.geoformats.rangelist import parse_rangelist_xml, serialize_rangelist_xml
from lulc.geoformats.shapefile import read_shapefile_polygons
from lulc.geoformats.tables import dump_hierarchy_csv, load_census_csv, load_hierarchy_csv

__all__ = [
    "DEFAULT_HIERARCHY", "BandSet", "CensusRecord", "CensusTable", "ColorBand",
    "GeoTransform", "RasterImage", "Region", "class_label_from_name",
    "read_geojson_polygons", "read_geotiff", "write_geotiff", "write_ppm",
    "parse_rangelist_xml", "serialize_rangelist_xml", "read_shapefile_polygons",
    "load_census_csv", "load_hierarchy_csv", "dump_hierarchy_csv",
]
