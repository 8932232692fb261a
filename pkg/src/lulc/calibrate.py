"""Fit band tolerances so classified areas match census areas.

The objective (summed absolute area error over censused classes) is
piecewise constant in the integer tolerances, so the search is a cyclic
coordinate descent with a coarse-to-fine step schedule rather than anything
gradient based.
"""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from lulc.classify import classify_raster
from lulc.errors import NoBands
from lulc.geoformats.model import BandSet, CensusTable, RasterImage
from lulc.zonal import AreaMode, ComparisonReport, area_report, compare

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CalibrationConfig:
    epsilon_rel: float = 0.10
    max_passes: int = 50
    step_schedule: tuple = (16, 8, 4, 2, 1)
    recenter: bool = False
    tolerance_bounds: tuple = (0, 255)

    def __post_init__(self):
        if not 0 < self.epsilon_rel < 1:
            raise ValueError("epsilon_rel must lie in (0, 1)")
        if self.max_passes < 0:
            raise ValueError("max_passes must be >= 0")
        steps = tuple(int(s) for s in self.step_schedule)
        if not steps or any(s <= 0 for s in steps) or any(
                a <= b for a, b in zip(steps, steps[1:])):
            raise ValueError("step_schedule must be positive and strictly descending")
        object.__setattr__(self, "step_schedule", steps)
        lo, hi = self.tolerance_bounds
        if not 0 <= lo <= hi <= 255:
            raise ValueError("tolerance_bounds must satisfy 0 <= lo <= hi <= 255")


@dataclass(frozen=True)
class TraceEntry:
    pass_index: int
    band: int
    old_tol: int
    new_tol: int
    objective_km2: float


@dataclass
class CalibrationResult:
    bands: BandSet
    trace: list = field(default_factory=list)
    converged: bool = False
    final_report: Optional[ComparisonReport] = None
    passes: int = 0

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["pass", "band", "old_tol", "new_tol", "objective_km2"])
        for e in self.trace:
            w.writerow([e.pass_index, e.band, e.old_tol, e.new_tol, repr(e.objective_km2)])
        return buf.getvalue()


def evaluate(bands: BandSet, img: RasterImage, mask, census: CensusTable,
             region_id: str, area_mode: AreaMode) -> ComparisonReport:
    labels = classify_raster(img, bands, mask)
    report = area_report(labels, bands, img.transform, area_mode, region_id)
    return compare(report, census, region_id)


def objective(bands: BandSet, img: RasterImage, mask, census: CensusTable,
              region_id: str, area_mode: AreaMode) -> float:
    """Sum of ``|computed - census|`` km² over the censused classes."""
    return evaluate(bands, img, mask, census, region_id, area_mode).objective_km2


def _median_color(img: RasterImage, labels: np.ndarray, band: int):
    sel = img.pixels[labels == band][:, :3]
    if sel.shape[0] == 0:
        return None
    srt = np.sort(sel, axis=0)
    # lower median keeps the centre on an observed integer value
    return tuple(int(v) for v in srt[(sel.shape[0] - 1) // 2])


def calibrate_tolerances(img: RasterImage, mask, bands: BandSet, census: CensusTable,
                         region_id: str, area_mode: AreaMode,
                         cfg: CalibrationConfig = CalibrationConfig()) -> CalibrationResult:
    """Coordinate descent on band tolerances against the census table.

    Each pass visits bands in order; for each step ``s`` of the schedule it
    tries ``tol - s`` and ``tol + s`` (clamped) and keeps whichever lowers
    the objective the most, if either does. The search ends when the
    classes are all within ``cfg.epsilon_rel`` at a pass boundary, when a
    full pass changes nothing, or after ``cfg.max_passes`` passes.
    """
    if len(bands) == 0:
        raise NoBands("calibration needs at least one band")
    lo, hi = cfg.tolerance_bounds

    def run(b):
        return evaluate(b, img, mask, census, region_id, area_mode)

    current = bands
    report = run(current)
    best = report.objective_km2
    trace: list[TraceEntry] = []
    passes = 0
    while not report.converged(cfg.epsilon_rel) and passes < cfg.max_passes:
        changed = False
        for i in range(len(current)):
            for step in cfg.step_schedule:
                tol = current[i].tolerance
                choice = None
                for cand in (max(lo, tol - step), min(hi, tol + step)):
                    if cand == tol:
                        continue
                    trial_bands = current.with_band(i, tolerance=cand)
                    trial = run(trial_bands)
                    if trial.objective_km2 < best and (
                            choice is None or trial.objective_km2 < choice[2].objective_km2):
                        choice = (cand, trial_bands, trial)
                if choice is not None:
                    cand, current, report = choice
                    best = report.objective_km2
                    trace.append(TraceEntry(passes, i, tol, cand, best))
                    log.debug("pass %d band %d tol %d -> %d objective %.6f",
                              passes, i, tol, cand, best)
                    changed = True
        if cfg.recenter:
            labels = classify_raster(img, current, mask).labels
            moved = current
            for i in range(len(current)):
                center = _median_color(img, labels, i)
                if center is not None and center != current[i].color:
                    moved = moved.with_band(i, color=center)
            if moved is not current:
                trial = run(moved)
                if trial.objective_km2 <= best:
                    changed = changed or trial.objective_km2 < best
                    current, report, best = moved, trial, trial.objective_km2
        passes += 1
        if not changed:
            break
    return CalibrationResult(current, trace, report.converged(cfg.epsilon_rel), report, passes)

