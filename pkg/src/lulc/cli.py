"""Command-line entry point: ``lulc <command> [options]``.

Exit codes: 0 ok, 2 unreadable/unparsable input, 3 bad configuration,
4 calibration did not converge, 5 network failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from pathlib import Path

from lulc import __version__
from lulc._io import atomic_write
from lulc.calibrate import CalibrationConfig, calibrate_tolerances
from lulc.classify import LabelField, classify_raster, render_labels
from lulc.codes import NODATA, UNCLASSIFIED
from lulc.errors import (DimensionMismatch, FormatError, LulcError, MissingFixedValue,
                         NetworkError, NoBands)
from lulc.geoformats import (
    BandSet,
    CensusTable,
    load_census_csv,
    load_hierarchy_csv,
    parse_rangelist_xml,
    read_geojson_polygons,
    read_geotiff,
    read_shapefile_polygons,
    serialize_rangelist_xml,
    write_geotiff,
    write_ppm,
)
from lulc.wms import WmsRequest, build_getmap_url, fetch_map
from lulc.zonal import (AreaMode, AreaReport, aggregate_categorical, aggregate_transform,
                        area_report, compare, rasterize_region)

log = logging.getLogger("lulc")

EXIT_OK, EXIT_PARSE, EXIT_CONFIG, EXIT_NOT_CONVERGED, EXIT_NETWORK = 0, 2, 3, 4, 5
DEFAULT_CACHE = Path.home() / ".cache" / "lulc-wms"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read(path, what: str, text: bool = False):
    if not path:
        raise CliError(EXIT_CONFIG, f"--{what} is required")
    try:
        return Path(path).read_text("utf-8") if text else Path(path).read_bytes()
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(EXIT_PARSE, f"cannot read {what} file {path}: {exc}") from None


def _parse(fn, data, what: str, path):
    try:
        return fn(data)
    except FormatError as exc:
        raise CliError(EXIT_PARSE, f"{what} {path}: {type(exc).__name__}: {exc}") from None


def load_raster(path):
    return _parse(read_geotiff, _read(path, "raster"), "raster", path)


def load_bands(args) -> BandSet:
    text = _read(args.ranges, "ranges", text=True)
    hierarchy = None
    if getattr(args, "hierarchy", None):
        hierarchy = _parse(load_hierarchy_csv, _read(args.hierarchy, "hierarchy", text=True),
                           "hierarchy", args.hierarchy)
    return _parse(lambda t: parse_rangelist_xml(t, hierarchy), text, "ranges", args.ranges)


def load_census(path) -> CensusTable:
    return _parse(load_census_csv, _read(path, "census", text=True), "census", path)


def resolve_area_mode(args) -> AreaMode:
    mode = args.area_mode
    if args.pixel_area is not None:
        if mode not in (None, "fixed"):
            raise CliError(EXIT_CONFIG, "--pixel-area only applies to --area-mode fixed")
        mode = "fixed"
    if mode is None:
        raise CliError(EXIT_CONFIG, "give --pixel-area <km2> or --area-mode")
    try:
        return AreaMode(mode, args.pixel_area)
    except (MissingFixedValue, ValueError) as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from None


def resolve_region(args, img):
    """Return ``(region_id, mask)`` from the boundary flags."""
    if not args.boundary:
        if args.region_index is not None:
            raise CliError(EXIT_CONFIG, "--region-index needs --boundary")
        return args.region_id or "", None
    data = _read(args.boundary, "boundary")
    if args.boundary.lower().endswith(".shp"):
        regions = _parse(read_shapefile_polygons, data, "boundary", args.boundary)
    else:
        regions = _parse(read_geojson_polygons, data, "boundary", args.boundary)
    if args.region_index is not None:
        if not 0 <= args.region_index < len(regions):
            raise CliError(EXIT_CONFIG, f"--region-index {args.region_index} out of range "
                                        f"({len(regions)} regions)")
        region = regions[args.region_index]
        region_id = args.region_id or region.id
    elif args.region_id is not None:
        matches = [r for r in regions if r.id == args.region_id]
        if not matches:
            raise CliError(EXIT_CONFIG, f"no region with id {args.region_id!r} in "
                                        f"{args.boundary}")
        region, region_id = matches[0], args.region_id
    elif len(regions) == 1:
        region, region_id = regions[0], regions[0].id
    else:
        raise CliError(EXIT_CONFIG, f"{args.boundary} has {len(regions)} regions; "
                                    "select one with --region-id or --region-index")
    return region_id, rasterize_region(region, img.transform, img.width, img.height)


def _census_region(region_id: str, census: CensusTable) -> str:
    """Default to the census's only region; refuse regions it does not cover."""
    if not region_id and len(census.region_ids) == 1:
        return census.region_ids[0]
    if census.records and region_id not in census.region_ids:
        raise CliError(EXIT_CONFIG, f"census has no rows for region {region_id!r} "
                                    f"(regions: {', '.join(census.region_ids)})")
    return region_id


def _out_dir(args) -> Path:
    out = Path(args.out_dir or ".")
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(EXIT_CONFIG, f"cannot create output directory {out}: {exc}") from None
    return out


def histogram_csv(field: LabelField, bands: BandSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["code", "name", "class", "pixels"])
    for i, band in enumerate(bands):
        w.writerow([i, band.name, band.class_label, field.count(i)])
    w.writerow([UNCLASSIFIED, "UNCLASSIFIED", "", field.count(UNCLASSIFIED)])
    w.writerow([NODATA, "NODATA", "", field.count(NODATA)])
    return buf.getvalue()


def _classified(args):
    img = load_raster(args.raster)
    bands = load_bands(args)
    region_id, mask = resolve_region(args, img)
    return img, bands, region_id, mask, classify_raster(img, bands, mask)


def _write_labels(out: Path, stem: str, field, bands, transform):
    rendered = render_labels(field, bands, transform=transform)
    atomic_write(out / f"{stem}.tif", write_geotiff(rendered))
    atomic_write(out / f"{stem}.ppm", write_ppm(rendered))
    atomic_write(out / f"{stem}_histogram.csv", histogram_csv(field, bands))


def cmd_info(args) -> int:
    img = load_raster(args.raster)
    t = img.transform
    print(f"size: {img.width} x {img.height}")
    print("bands: RGBA, 8 bits per sample")
    if img.georeferenced:
        print(f"origin: ({t.origin_x!r}, {t.origin_y!r})")
        print(f"pixel size: {t.scale_x!r} x {t.scale_y!r}")
        print(f"crs: EPSG:{t.crs_code}")
        print(f"extent: x {t.origin_x!r} .. {t.origin_x + img.width * t.scale_x!r}, "
              f"y {t.origin_y - img.height * t.scale_y!r} .. {t.origin_y!r}")
    else:
        print("georeferencing: ungeoreferenced (identity transform assumed)")
    return EXIT_OK


def cmd_classify(args) -> int:
    img, bands, _region_id, _mask, field = _classified(args)
    out = _out_dir(args)
    _write_labels(out, "labels", field, bands, img.transform)
    sys.stdout.write(histogram_csv(field, bands))
    return EXIT_OK


def _report(args):
    img, bands, region_id, _mask, field = _classified(args)
    return area_report(field, bands, img.transform, resolve_area_mode(args), region_id)


def cmd_zonal(args) -> int:
    report = _report(args)
    out = _out_dir(args)
    atomic_write(out / "area_report.json", report.to_json())
    atomic_write(out / "area_report.csv", report.to_csv())
    sys.stdout.write(report.to_csv())
    return EXIT_OK


def cmd_compare(args) -> int:
    census = load_census(args.census)
    if args.report:
        text = _read(args.report, "report", text=True)
        try:
            report = AreaReport.from_json(text)
        except (ValueError, TypeError, KeyError) as exc:
            raise CliError(EXIT_PARSE, f"report {args.report}: {exc}") from None
        region_id = args.region_id or report.region_id
    else:
        report = _report(args)
        region_id = report.region_id
    region_id = _census_region(region_id, census)
    comparison = compare(report, census, region_id)
    out = _out_dir(args)
    atomic_write(out / "comparison.csv", comparison.to_csv())
    atomic_write(out / "comparison.json", comparison.to_json())
    sys.stdout.write(comparison.to_csv())
    print(f"objective_km2,{comparison.objective_km2:.2f}")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    img, bands, region_id, mask, _field = _classified(args)
    census = load_census(args.census)
    region_id = _census_region(region_id, census)
    try:
        cfg = CalibrationConfig(epsilon_rel=args.epsilon, max_passes=args.max_passes,
                                step_schedule=tuple(args.steps), recenter=args.recenter)
        result = calibrate_tolerances(img, mask, bands, census, region_id,
                                      resolve_area_mode(args), cfg)
    except (NoBands, ValueError) as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from None
    out = _out_dir(args)
    atomic_write(out / "calibrated_ranges.xml", serialize_rangelist_xml(result.bands))
    atomic_write(out / "trace.csv", result.trace_csv())
    atomic_write(out / "comparison.csv", result.final_report.to_csv())
    atomic_write(out / "comparison.json", result.final_report.to_json())
    sys.stdout.write(result.final_report.to_csv())
    print(f"objective_km2,{result.final_report.objective_km2:.2f}")
    print(f"converged,{str(result.converged).lower()}")
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_aggregate(args) -> int:
    img, bands, _region_id, _mask, field = _classified(args)
    try:
        agg = aggregate_categorical(field, args.factor, args.rule)
    except (LulcError, ValueError) as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from None
    out = _out_dir(args)
    _write_labels(out, f"labels_{args.rule}_x{args.factor}", agg, bands,
                  aggregate_transform(img.transform, args.factor))
    sys.stdout.write(histogram_csv(agg, bands))
    return EXIT_OK


def _bbox(text: str):
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad bbox {text!r}") from None
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("bbox needs four comma-separated numbers")
    return vals


def cmd_fetch(args) -> int:
    req = WmsRequest(args.endpoint, args.layer, args.bbox, args.width, args.height,
                     args.wms_version, args.crs, args.format)
    try:
        url = build_getmap_url(req)
    except (LulcError, ValueError) as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from None
    cache = args.cache_dir or os.environ.get("LULC_CACHE_DIR") or DEFAULT_CACHE
    log.info("GET %s", url)
    try:
        body = fetch_map(url, cache, args.timeout)
    except NetworkError as exc:
        raise CliError(EXIT_NETWORK, str(exc)) from None
    target = Path(args.out)
    target.parent.mkdir(parents=True, exist_ok=True)
    atomic_write(target, body)
    print(f"{len(body)} bytes -> {target}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--raster", help="input GeoTIFF")
    common.add_argument("--ranges", help="RangeList XML")
    common.add_argument("--hierarchy", help="category,member CSV overriding the default roll-up")
    common.add_argument("--census", help="region,class,area_km2 CSV")
    common.add_argument("--boundary", help="boundary polygons (.shp or GeoJSON)")
    common.add_argument("--region-id")
    common.add_argument("--region-index", type=int)
    common.add_argument("--pixel-area", type=float, help="fixed km² per pixel")
    common.add_argument("--area-mode", choices=("fixed", "projected", "geographic"))
    common.add_argument("--epsilon", type=float, default=0.10)
    common.add_argument("--out-dir", default=".")
    common.add_argument("--factor", type=int, default=2)
    common.add_argument("--rule", choices=("majority", "central"), default="majority")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="lulc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", parents=[common], help="describe a GeoTIFF")
    p.add_argument("path", nargs="?", help="GeoTIFF (alternative to --raster)")
    p.set_defaults(func=cmd_info)
    sub.add_parser("classify", parents=[common], help="classify a raster by colour ranges"
                   ).set_defaults(func=cmd_classify)
    sub.add_parser("zonal", parents=[common], help="per-class areas inside a region"
                   ).set_defaults(func=cmd_zonal)
    p = sub.add_parser("compare", parents=[common], help="compare areas with census data")
    p.add_argument("--report", help="area_report.json from 'zonal' instead of a raster")
    p.set_defaults(func=cmd_compare)
    p = sub.add_parser("calibrate", parents=[common], help="fit tolerances to census data")
    p.add_argument("--max-passes", type=int, default=50)
    p.add_argument("--steps", type=lambda s: [int(v) for v in s.split(",")],
                   default=[16, 8, 4, 2, 1], help="descending step schedule, e.g. 16,8,4,2,1")
    p.add_argument("--recenter", action="store_true", help="also move band centres to "
                   "the median colour of their pixels")
    p.set_defaults(func=cmd_calibrate)
    sub.add_parser("aggregate", parents=[common], help="downscale the label map"
                   ).set_defaults(func=cmd_aggregate)
    p = sub.add_parser("fetch", parents=[common], help="download a WMS GetMap image")
    p.add_argument("--endpoint", required=True)
    p.add_argument("--layer", required=True)
    p.add_argument("--bbox", type=_bbox, required=True, help="min_x,min_y,max_x,max_y")
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--height", type=int, default=256)
    p.add_argument("--wms-version", choices=("1.1.1", "1.3.0"), default="1.1.1")
    p.add_argument("--crs", type=int, default=4326)
    p.add_argument("--format", default="image/tiff")
    p.add_argument("--timeout", type=float, default=30.0)
    p.add_argument("--cache-dir", help="defaults to $LULC_CACHE_DIR or ~/.cache/lulc-wms")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fetch)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "info" and args.path and not args.raster:
        args.raster = args.path
    try:
        return args.func(args)
    except CliError as exc:
        print(f"lulc {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except DimensionMismatch as exc:
        print(f"lulc {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FormatError as exc:
        print(f"lulc {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
