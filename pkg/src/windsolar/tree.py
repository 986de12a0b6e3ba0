"""Precipitation-level x wind-level scenario tree for anomalous weather.

Level intervals are stored as partition edges: level ``i`` covers
``[edge_i, edge_{i+1})`` and the last level also includes its upper
edge. The standard level tables leave small gaps between consecutive levels
(e.g. 1.0416 / 1.0417 mm/h); extending each interval up to the next lower
bound closes those gaps so every point in the anomalous box has exactly
one cell.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .copula import rectangle_probability
from .errors import ConfigurationError, DataFormatError, DegenerateRegionError

PRECIP_TABLE = (
    ("moderate", 0.4126, 1.0416),
    ("heavy", 1.0417, 2.0832),
    ("rainstorm", 2.0833, 4.1666),
    ("torrential", 4.1666, 10.4166),
)
WIND_TABLE = (
    ("8", 17.2, 20.7),
    ("9", 20.8, 24.4),
    ("10", 24.5, 28.4),
    ("11", 28.5, 32.6),
)

CSV_COLUMNS = ("scenario_id", "precip_level", "wind_level", "probability_percent", "probability")


def _edges(table):
    lows = [lo for _, lo, _ in table]
    return np.array(lows + [table[-1][2]], dtype=float)


@dataclass(frozen=True)
class LevelBounds:
    """Labelled (name, lower, upper) intervals for both variables (mm/h, m/s)."""

    precip: tuple = PRECIP_TABLE
    wind: tuple = WIND_TABLE

    def __post_init__(self):
        for name, table in (("precipitation", self.precip), ("wind", self.wind)):
            if len(table) < 1:
                raise ConfigurationError(f"{name} levels are empty")
            prev_hi = -np.inf
            for label, lo, hi in table:
                if not lo < hi:
                    raise ConfigurationError(f"{name} level {label!r} has lower >= upper")
                if lo < prev_hi:
                    raise ConfigurationError(f"{name} levels overlap or are out of order at {label!r}")
                prev_hi = hi

    @property
    def precip_edges(self):
        return _edges(self.precip)

    @property
    def wind_edges(self):
        return _edges(self.wind)

    @property
    def precip_labels(self):
        return tuple(str(t[0]) for t in self.precip)

    @property
    def wind_labels(self):
        return tuple(str(t[0]) for t in self.wind)

    def scaled(self, wind_factor=1.0, precip_factor=1.0):
        """Bounds with every edge multiplied by the given factors."""
        return LevelBounds(
            precip=tuple((n, lo * precip_factor, hi * precip_factor) for n, lo, hi in self.precip),
            wind=tuple((n, lo * wind_factor, hi * wind_factor) for n, lo, hi in self.wind),
        )

    def to_dict(self):
        return {
            "precip": [list(t) for t in self.precip],
            "wind": [list(t) for t in self.wind],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            precip=tuple((str(n), float(lo), float(hi)) for n, lo, hi in d["precip"]),
            wind=tuple((str(n), float(lo), float(hi)) for n, lo, hi in d["wind"]),
        )


def _locate(x, edges, labels):
    x = np.asarray(x, dtype=float)
    idx = np.searchsorted(edges, x, side="right") - 1
    # the top edge belongs to the last level
    idx = np.where(x == edges[-1], len(labels) - 1, idx)
    valid = (idx >= 0) & (idx < len(labels))
    return np.where(valid, idx, -1)


def level_index(wind, precip, bounds):
    """Vectorized cell indices; -1 marks values outside every level."""
    wi = _locate(wind, bounds.wind_edges, bounds.wind_labels)
    pi = _locate(precip, bounds.precip_edges, bounds.precip_labels)
    return wi, pi


def classify(wind, precip, bounds=LevelBounds()):
    """Return ``(wind_level, precip_level)``; either may be None."""
    wi, pi = level_index(float(wind), float(precip), bounds)
    wl = bounds.wind_labels[int(wi)] if wi >= 0 else None
    pl = bounds.precip_labels[int(pi)] if pi >= 0 else None
    return wl, pl


@dataclass(frozen=True)
class ScenarioCell:
    scenario_id: int
    precip_level: str
    wind_level: str
    probability: float
    # (u1, u2, v1, v2) of the cell in copula space; not serialized to CSV
    rectangle: tuple = field(default=(), compare=False, repr=False)
    # (wind_lo, wind_hi, precip_lo, precip_hi) in physical units
    box: tuple = field(default=(), compare=False, repr=False)


@dataclass(frozen=True)
class ScenarioTree:
    cells: tuple
    anomalous_mass: float

    def __iter__(self):
        return iter(self.cells)

    def __len__(self):
        return len(self.cells)

    def cell(self, scenario_id):
        return self.cells[scenario_id - 1]

    @property
    def probabilities(self):
        return np.array([c.probability for c in self.cells])


def build_tree(theta, wind_marginal, precip_marginal, bounds=LevelBounds()):
    """Cell probabilities from the copula and the two marginal CDFs.

    Each cell gets the copula mass of its rectangle; the cells are then
    normalized to sum to one, i.e. probabilities are conditional on the
    weather being anomalous. The unconditional mass is kept as
    ``anomalous_mass``. Cells are ordered precipitation-major.
    """
    we, pe = bounds.wind_edges, bounds.precip_edges
    uw = np.asarray(wind_marginal.cdf(we), dtype=float)
    vp = np.asarray(precip_marginal.cdf(pe), dtype=float)
    raw = []
    for i in range(len(pe) - 1):
        for j in range(len(we) - 1):
            p = float(rectangle_probability(theta, uw[j], uw[j + 1], vp[i], vp[i + 1]))
            raw.append(max(p, 0.0))
    total = float(sum(raw))
    if not total >= 1e-10:
        raise DegenerateRegionError(f"anomalous region has negligible mass ({total!r})")
    cells = []
    k = 0
    for i, pl in enumerate(bounds.precip_labels):
        for j, wl in enumerate(bounds.wind_labels):
            cells.append(
                ScenarioCell(
                    scenario_id=k + 1,
                    precip_level=pl,
                    wind_level=wl,
                    probability=raw[k] / total,
                    rectangle=(float(uw[j]), float(uw[j + 1]), float(vp[i]), float(vp[i + 1])),
                    box=(float(we[j]), float(we[j + 1]), float(pe[i]), float(pe[i + 1])),
                )
            )
            k += 1
    return ScenarioTree(cells=tuple(cells), anomalous_mass=total)


def tree_csv(tree):
    """CSV text; ``probability`` carries the exact value for round-trips."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for c in tree.cells:
        w.writerow([c.scenario_id, c.precip_level, c.wind_level, f"{100.0 * c.probability:.3f}", repr(c.probability)])
    return buf.getvalue()


def tree_text(tree):
    """Human-readable table with percentages to three decimals."""
    lines = [f"{'Scenario':<12}{'Precipitation':<16}{'Wind level':<12}{'Probability (%)':>16}"]
    for c in tree.cells:
        lines.append(
            f"{'Scenario ' + str(c.scenario_id):<12}{c.precip_level:<16}{c.wind_level:<12}"
            f"{100.0 * c.probability:>16.3f}"
        )
    lines.append(f"{'Total':<40}{100.0 * float(np.sum(tree.probabilities)):>16.3f}")
    lines.append(f"unconditional anomalous-event mass: {tree.anomalous_mass:.6g}")
    return "\n".join(lines) + "\n"


def tree_report(tree):
    """Return ``(csv_text, human_text)`` for the tree."""
    return tree_csv(tree), tree_text(tree)


def read_tree_csv(text, anomalous_mass=float("nan")):
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows or set(CSV_COLUMNS) - set(rows[0]):
        raise DataFormatError("tree CSV lacks the expected columns")
    cells = tuple(
        ScenarioCell(
            scenario_id=int(r["scenario_id"]),
            precip_level=r["precip_level"],
            wind_level=r["wind_level"],
            probability=float(r["probability"]),
        )
        for r in rows
    )
    return ScenarioTree(cells=cells, anomalous_mass=anomalous_mass)
