"""External annual series (e.g. GDP per capita) aligned with topic prevalence by year."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

NORMALIZATIONS = ("min-max", "z-score", "none")


class AlignError(ValueError):
    pass


@dataclass
class ExternalSeries:
    name: str
    unit: str
    points: list[tuple[int, float]]

    def __post_init__(self):
        years = [y for y, _ in self.points]
        if any(b <= a for a, b in zip(years, years[1:])):
            raise AlignError(f"series {self.name!r}: years must be strictly increasing")
        if not all(math.isfinite(v) for _, v in self.points):
            raise AlignError(f"series {self.name!r}: non-finite value")


@dataclass
class AlignedOverlay:
    years: list[int]
    topic_values: np.ndarray
    external_values: np.ndarray
    interpolated: list[bool]
    normalization: str


def load_series(
    path,
    year_col: str = "year",
    value_col: str = "gdppc",
    country_col: str | None = None,
    country: str | None = None,
    name: str = "",
    unit: str = "",
) -> ExternalSeries:
    """Read a comma- or tab-separated file with a header row.

    Rows with an empty value cell are skipped (historical series have gaps);
    anything else that fails to parse is an error citing the row number.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        sample = fh.read(4096)
        fh.seek(0)
        delim = "\t" if sample.count("\t") > sample.count(",") else ","
        reader = csv.DictReader(fh, delimiter=delim)
        header = reader.fieldnames or []
        for col in [year_col, value_col] + ([country_col] if country_col else []):
            if col not in header:
                raise AlignError(f"{path}: missing column {col!r}")
        rows = []
        for rowno, row in enumerate(reader, start=2):
            if country_col and row[country_col] != country:
                continue
            raw_year, raw_val = (row[year_col] or "").strip(), (row[value_col] or "").strip()
            if raw_val == "":
                continue
            try:
                year = int(float(raw_year))
                val = float(raw_val)
            except ValueError:
                raise AlignError(f"{path}: row {rowno}: cannot parse year/value {raw_year!r}, {raw_val!r}") from None
            rows.append((year, val))
    rows.sort(key=lambda r: r[0])
    years = [y for y, _ in rows]
    dup = {y for y in years if years.count(y) > 1}
    if dup:
        raise AlignError(f"{path}: duplicate years {sorted(dup)}")
    return ExternalSeries(name or value_col, unit, rows)


def _normalize(values: np.ndarray, method: str) -> np.ndarray:
    if method == "none":
        return values.copy()
    if method == "min-max":
        lo, hi = values.min(), values.max()
        if hi == lo:
            log.warning("constant series under min-max normalization; mapped to 0")
            return np.zeros_like(values)
        out = (values - lo) / (hi - lo)
        # pin the extremes exactly
        out[values == lo] = 0.0
        out[values == hi] = 1.0
        return out
    if method == "z-score":
        sd = values.std()
        if sd == 0:
            log.warning("constant series under z-score normalization; mapped to 0")
            return np.zeros_like(values)
        return (values - values.mean()) / sd
    raise AlignError(f"unknown normalization {method!r}; choose from {NORMALIZATIONS}")


def align(topic_series, external: ExternalSeries, normalization: str = "min-max", interpolate: bool = False) -> AlignedOverlay:
    """Join topic prevalence and an external series on year.

    By default only years present in both are kept. With `interpolate`, topic
    years falling strictly between two external observations get a linearly
    interpolated external value and are flagged.
    """
    if normalization not in NORMALIZATIONS:
        raise AlignError(f"unknown normalization {normalization!r}; choose from {NORMALIZATIONS}")
    ext = dict(external.points)
    ext_years = np.array([y for y, _ in external.points], dtype=np.float64)
    ext_vals = np.array([v for _, v in external.points], dtype=np.float64)
    years, tv, ev, flags = [], [], [], []
    for year, value in topic_series:
        if year in ext:
            years.append(year)
            tv.append(value)
            ev.append(ext[year])
            flags.append(False)
        elif interpolate and ext_years.size >= 2 and ext_years[0] < year < ext_years[-1]:
            years.append(year)
            tv.append(value)
            ev.append(float(np.interp(year, ext_years, ext_vals)))
            flags.append(True)
    if not years:
        raise AlignError(f"no overlapping years between topic series and {external.name!r}")
    return AlignedOverlay(
        years,
        _normalize(np.array(tv), normalization),
        _normalize(np.array(ev), normalization),
        flags,
        normalization,
    )
