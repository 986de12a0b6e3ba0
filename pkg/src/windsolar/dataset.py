"""Hourly weather records: CSV ingestion, validation and climatology."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .errors import DataFormatError, DataQualityError, ValidationError
from .scenarios import HourlyMoments

COLUMNS = ("timestamp", "wind_ms", "ghi_kwm2", "precip_mmh")
MAX_DROPPED_FRACTION = 0.10
HOUR = np.timedelta64(1, "h")


@dataclass(frozen=True)
class WeatherRecord:
    timestamp: datetime
    wind_ms: float
    ghi_kwm2: float
    precip_mmh: float


@dataclass(frozen=True)
class WeatherDataset:
    """Column-oriented hourly observations (UTC, strictly increasing)."""

    timestamps: np.ndarray  # datetime64[s]
    wind_ms: np.ndarray
    ghi_kwm2: np.ndarray
    precip_mmh: np.ndarray
    source: str = ""
    n_dropped: int = 0
    gaps: tuple = ()  # (timestamp before the gap, missing hours)

    def __len__(self):
        return self.timestamps.size

    @property
    def records(self):
        return [
            WeatherRecord(
                self.timestamps[i].astype(datetime).replace(tzinfo=timezone.utc),
                float(self.wind_ms[i]),
                float(self.ghi_kwm2[i]),
                float(self.precip_mmh[i]),
            )
            for i in range(len(self))
        ]

    def window(self, start=None, end=None):
        """Rows with ``start <= timestamp < end``; bounds are ISO strings or None."""
        keep = np.ones(len(self), dtype=bool)
        if start is not None:
            keep &= self.timestamps >= np.datetime64(_parse_time(start), "s")
        if end is not None:
            keep &= self.timestamps < np.datetime64(_parse_time(end), "s")
        return WeatherDataset(
            self.timestamps[keep],
            self.wind_ms[keep],
            self.ghi_kwm2[keep],
            self.precip_mmh[keep],
            source=self.source,
            n_dropped=self.n_dropped,
            gaps=_find_gaps(self.timestamps[keep]),
        )

    def summary(self):
        return {
            "source": self.source,
            "n_records": int(len(self)),
            "n_dropped": int(self.n_dropped),
            "first": str(self.timestamps[0]) if len(self) else None,
            "last": str(self.timestamps[-1]) if len(self) else None,
            "gaps": [[str(t), int(h)] for t, h in self.gaps],
            "wet_hours": int(np.sum(self.precip_mmh > 0)),
        }

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for t, a, b, c in zip(self.timestamps, self.wind_ms, self.ghi_kwm2, self.precip_mmh):
            w.writerow([str(t) + "Z", repr(float(a)), repr(float(b)), repr(float(c))])
        return buf.getvalue()


def _parse_time(text):
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    t = datetime.fromisoformat(text)
    if t.tzinfo is not None:
        t = t.astimezone(timezone.utc).replace(tzinfo=None)
    return t


def _find_gaps(ts):
    if ts.size < 2:
        return ()
    steps = np.diff(ts) // HOUR
    idx = np.flatnonzero(steps > 1)
    return tuple((ts[i], int(steps[i] - 1)) for i in idx)


def _parse_float(text):
    v = float(text)
    if not math.isfinite(v):
        raise ValueError("non-finite")
    return v


def ingest_text(text, source="<memory>"):
    """Parse CSV text with columns timestamp, wind_ms, ghi_kwm2, precip_mmh.

    Rows with a missing or unparseable field are dropped and counted;
    more than 10% dropped raises :class:`DataQualityError`. Negative
    values, duplicate or decreasing timestamps and off-the-hour stamps
    raise :class:`ValidationError` naming the line.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DataFormatError(f"{source}: file is empty") from None
    if any(c not in header for c in COLUMNS):
        raise DataFormatError(f"{source}: header must contain {', '.join(COLUMNS)}; got {header}")
    col = {c: header.index(c) for c in COLUMNS}
    times, rows = [], []
    dropped = total = 0
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not f.strip() for f in row):
            continue
        total += 1
        try:
            t = _parse_time(row[col["timestamp"]])
            vals = [_parse_float(row[col[c]]) for c in COLUMNS[1:]]
        except (ValueError, IndexError):
            dropped += 1
            continue
        if min(vals) < 0:
            raise ValidationError(f"{source}:{lineno}: negative value in {row}")
        if t.minute or t.second or t.microsecond:
            raise ValidationError(f"{source}:{lineno}: timestamp {t} is not on the hour")
        if times:
            if t == times[-1][0]:
                raise ValidationError(f"{source}:{lineno}: duplicate timestamp {t}")
            if t < times[-1][0]:
                raise ValidationError(f"{source}:{lineno}: timestamp {t} is out of order")
        times.append((t, lineno))
        rows.append(vals)
    if total == 0 or not rows:
        raise DataQualityError(f"{source}: no usable data rows")
    if dropped / total > MAX_DROPPED_FRACTION:
        raise DataQualityError(f"{source}: {dropped} of {total} rows dropped (> 10%)")
    ts = np.array([t for t, _ in times], dtype="datetime64[s]")
    arr = np.array(rows, dtype=float)
    return WeatherDataset(ts, arr[:, 0], arr[:, 1], arr[:, 2], source=source, n_dropped=dropped, gaps=_find_gaps(ts))


def ingest(path):
    with open(path, newline="", encoding="utf-8") as fh:
        text = fh.read()
    return ingest_text(text, source=str(path))


def hourly_moments(dataset):
    """Hour-of-day (UTC) means of wind and irradiance plus irradiance std."""
    hours = (dataset.timestamps.astype("datetime64[h]").astype(np.int64)) % 24
    wm, gm, gs = np.zeros(24), np.zeros(24), np.zeros(24)
    for h in range(24):
        sel = hours == h
        if not sel.any():
            raise ValidationError(f"no observations for hour of day {h}")
        wm[h] = dataset.wind_ms[sel].mean()
        gm[h] = dataset.ghi_kwm2[sel].mean()
        gs[h] = dataset.ghi_kwm2[sel].std()
    return HourlyMoments(wm, gm, gs)
