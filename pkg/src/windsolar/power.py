"""Meteorology-to-power conversion for the wind turbine and the PV array."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ParameterDomainError

PRECIP_LEVELS = ("moderate", "heavy", "rainstorm", "torrential")


@dataclass(frozen=True)
class TurbineSpec:
    """Piecewise-linear turbine curve.

    The speed thresholds default to 3 / 12 / 25 m/s; these are generic
    defaults for a 2 MW machine, not measured values. Rated power defaults
    to 2000 kW.
    """

    v_cut_in: float = 3.0
    v_rated: float = 12.0
    v_cut_out: float = 25.0
    rated_kw: float = 2000.0

    def __post_init__(self):
        if not (0 < self.v_cut_in < self.v_rated < self.v_cut_out):
            raise ParameterDomainError(
                "turbine speeds must satisfy 0 < cut-in < rated < cut-out, got "
                f"{self.v_cut_in}, {self.v_rated}, {self.v_cut_out}"
            )
        if not self.rated_kw > 0:
            raise ParameterDomainError("rated power must be > 0")


@dataclass(frozen=True)
class PvSpec:
    """PV array: area (m^2), conversion efficiency and inverter cap (kW)."""

    area_m2: float = 11500.0
    efficiency: float = 0.18
    capacity_kw: float = 2000.0

    def __post_init__(self):
        if not self.area_m2 > 0:
            raise ParameterDomainError("PV area must be > 0")
        if not (0 < self.efficiency <= 1):
            raise ParameterDomainError("PV efficiency must lie in (0, 1]")
        if not self.capacity_kw > 0:
            raise ParameterDomainError("PV capacity must be > 0")


def _default_multipliers():
    return {"moderate": 0.50, "heavy": 0.20, "rainstorm": 0.15, "torrential": 0.10}


@dataclass(frozen=True)
class DeratingTable:
    """PV output multiplier per precipitation level.

    Multipliers must lie in (0, 1] and be nonincreasing with severity: PV
    output drops under rain but does not vanish while there is daylight.
    """

    multipliers: dict = field(default_factory=_default_multipliers)

    def __post_init__(self):
        missing = set(PRECIP_LEVELS) - set(self.multipliers)
        if missing:
            raise ConfigurationError(f"derating table lacks levels {sorted(missing)}")
        vals = [self.multipliers[k] for k in PRECIP_LEVELS]
        if any(not (0 < m <= 1) for m in vals):
            raise ConfigurationError("derating multipliers must lie in (0, 1]")
        if any(b > a for a, b in zip(vals, vals[1:])):
            raise ConfigurationError("derating multipliers must not increase with severity")

    def multiplier(self, level):
        if level is None:
            return 1.0
        try:
            return float(self.multipliers[level])
        except KeyError:
            raise ConfigurationError(f"unknown precipitation level {level!r}") from None


def wind_power(v_wind, spec):
    """Turbine output (kW) for hub wind speed ``v_wind`` (m/s).

    Zero below cut-in, linear ramp to rated power, flat at rated power and
    zero again from the cut-out speed on (protective shutdown).
    """
    v = np.asarray(v_wind, dtype=float)
    ramp = spec.rated_kw * (v - spec.v_cut_in) / (spec.v_rated - spec.v_cut_in)
    out = np.where(v < spec.v_cut_in, 0.0, np.where(v < spec.v_rated, ramp, spec.rated_kw))
    out = np.where(v >= spec.v_cut_out, 0.0, out)
    return out[()] if out.ndim == 0 else out


def pv_power(s, spec):
    """PV output (kW) for irradiance ``s`` (kW/m^2), clamped to [0, capacity]."""
    s = np.asarray(s, dtype=float)
    out = np.clip(spec.efficiency * s * spec.area_m2, 0.0, spec.capacity_kw)
    return out[()] if out.ndim == 0 else out


def pv_power_derated(s, spec, level, table):
    """PV output scaled by the multiplier of precipitation ``level`` (None = dry)."""
    return pv_power(s, spec) * table.multiplier(level)
