"""End-to-end commands: fit, tree, generate, ut and validate.

Each ``cmd_*`` function computes its results in memory and returns them;
the ``write_*`` helpers turn results into files. File emission goes
through :func:`write_files`, which stages every file before renaming any
of them so a failing command leaves no partial output.
"""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import marginals as M
from .copula import FrankCopula, fit_theta
from .dataset import hourly_moments
from .errors import ConfigurationError, DependencyError, ValidationError
from .power import DeratingTable, PvSpec, TurbineSpec, pv_power, wind_power
from .rng import stream
from .scenarios import (
    HourlyMoments,
    combine,
    generate_anomalous,
    generate_normal,
    read_scenarios,
    reduce,
    scenarios_csv,
    scenarios_sidecar,
)
from .tree import LevelBounds, build_tree, tree_report
from .unscented import InputMoments, propagate_power
from .validation import (
    density_overlay_csv,
    ecdf_csv,
    gof_report,
    model_comparison,
    qq_data,
)

MODES = ("normal", "anomalous", "per-cell")


@dataclass(frozen=True)
class PipelineConfig:
    turbine: TurbineSpec = field(default_factory=TurbineSpec)
    pv: PvSpec = field(default_factory=PvSpec)
    derating: DeratingTable = field(default_factory=DeratingTable)
    bounds: LevelBounds = field(default_factory=LevelBounds)
    w0: float = 1.0 / 3.0
    seed: int | None = None
    n_scenarios: int = 2000
    n_reduced_normal: int = 5
    n_per_cell: int = 200
    per_cell_target: int = 5
    splice_quantile: float = 0.95
    horizon: int = 24
    irradiance_ref: float = 1.0
    reduce_components: tuple = ("wind", "pv")
    alpha: float = 0.05
    qq_points: int = 100
    # operation and maintenance costs (CNY/kW); carried as metadata only
    om_cost: dict = field(default_factory=lambda: {"pv": 0.0235, "wind": 0.0196})

    def __post_init__(self):
        if not (0 <= self.w0 < 1):
            raise ConfigurationError("w0 must lie in [0, 1)")
        for name in ("n_scenarios", "n_reduced_normal", "n_per_cell", "per_cell_target", "horizon", "qq_points"):
            if int(getattr(self, name)) < 1:
                raise ConfigurationError(f"{name} must be >= 1")
        if self.n_reduced_normal > self.n_scenarios:
            raise ConfigurationError("n_reduced_normal exceeds n_scenarios")
        if self.per_cell_target > self.n_per_cell:
            raise ConfigurationError("per_cell_target exceeds n_per_cell")
        if not (0.8 <= self.splice_quantile <= 0.99):
            raise ConfigurationError("splice_quantile must lie in [0.8, 0.99]")
        if not self.irradiance_ref > 0:
            raise ConfigurationError("irradiance_ref must be > 0")
        if not set(self.reduce_components) <= {"wind", "pv"} or not self.reduce_components:
            raise ConfigurationError("reduce_components must be a subset of ('wind', 'pv')")
        if self.seed is not None and not (0 <= int(self.seed) < 2**64):
            raise ConfigurationError("seed must be an unsigned 64-bit integer")

    def require_seed(self):
        if self.seed is None:
            raise ConfigurationError("a seed is required for sampling commands (--seed or config 'seed')")
        return int(self.seed)

    def to_dict(self):
        return {
            "turbine": vars(self.turbine).copy(),
            "pv": vars(self.pv).copy(),
            "derating": dict(self.derating.multipliers),
            "bounds": self.bounds.to_dict(),
            "w0": self.w0,
            "seed": self.seed,
            "n_scenarios": self.n_scenarios,
            "n_reduced_normal": self.n_reduced_normal,
            "n_per_cell": self.n_per_cell,
            "per_cell_target": self.per_cell_target,
            "splice_quantile": self.splice_quantile,
            "horizon": self.horizon,
            "irradiance_ref": self.irradiance_ref,
            "reduce_components": list(self.reduce_components),
            "alpha": self.alpha,
            "qq_points": self.qq_points,
            "om_cost": dict(self.om_cost),
        }

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown configuration keys: {sorted(unknown)}")
        kw = {}
        try:
            if "turbine" in d:
                kw["turbine"] = TurbineSpec(**d.pop("turbine"))
            if "pv" in d:
                kw["pv"] = PvSpec(**d.pop("pv"))
            if "derating" in d:
                kw["derating"] = DeratingTable(dict(d.pop("derating")))
            if "bounds" in d:
                kw["bounds"] = LevelBounds.from_dict(d.pop("bounds"))
        except TypeError as exc:
            raise ConfigurationError(f"bad configuration section: {exc}") from None
        if "reduce_components" in d:
            d["reduce_components"] = tuple(d["reduce_components"])
        kw.update(d)
        return cls(**kw)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config is not valid JSON: {exc}") from None


def load_config(path=None, seed=None):
    cfg = PipelineConfig()
    if path is not None:
        cfg = PipelineConfig.from_json(Path(path).read_text(encoding="utf-8"))
    if seed is not None:
        cfg = replace(cfg, seed=int(seed))
    return cfg


# --------------------------------------------------------------------------
# fitted bundle


@dataclass
class FittedBundle:
    wind: M.GevParams
    precip: M.GevGpSplice
    copula: FrankCopula
    hourly: HourlyMoments
    gof: dict = field(default_factory=dict)
    comparison: list = field(default_factory=list)

    def to_dict(self):
        return {
            "wind": M.model_to_dict(self.wind),
            "precip": M.model_to_dict(self.precip),
            "copula": {"theta": self.copula.theta, "report": self.copula.report},
            "hourly": self.hourly.to_dict(),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=1, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(
            wind=M.model_from_dict(d["wind"]),
            precip=M.model_from_dict(d["precip"]),
            copula=FrankCopula(d["copula"]["theta"], report=d["copula"]["report"]),
            hourly=HourlyMoments.from_dict(d["hourly"]),
        )


def load_bundle(path):
    p = Path(path)
    if not p.exists():
        raise DependencyError(f"fitted model file not found: {p}")
    return FittedBundle.from_json(p.read_text(encoding="utf-8"))


def cmd_fit(dataset, config):
    """Fit the wind GEV, the precipitation splice, the copula and hourly moments.

    Wind readings of exactly 0 m/s are treated as left-censored calm
    hours. Precipitation and the copula use wet hours only.
    """
    if len(dataset) < 24:
        raise ValidationError("fitting needs at least one day of hourly data")
    wind = M.gev_fit_mle(dataset.wind_ms, censor_below=0.0)
    wet = dataset.precip_mmh > 0
    precip = M.splice_fit(dataset.precip_mmh[wet], config.splice_quantile, wet_only=True)
    precip.meta["n_dry_excluded"] = int(np.sum(~wet))
    cop = fit_theta(dataset.wind_ms, dataset.precip_mmh, wet_only=True)
    hourly = hourly_moments(dataset)
    gof = {
        "wind": gof_report(dataset.wind_ms, wind, config.alpha),
        "precip": gof_report(dataset.precip_mmh[wet], precip, config.alpha),
    }
    comparison, excluded = model_comparison(
        dataset.precip_mmh[wet], ("gp", "gev_gp"), config.alpha, config.splice_quantile
    )
    bundle = FittedBundle(wind, precip, cop, hourly, gof, comparison)
    bundle.excluded = excluded
    return bundle


def fit_outputs(bundle):
    gof = {
        "marginals": {k: r.to_dict() for k, r in bundle.gof.items()},
        "precip_comparison": [r.to_dict() for r in bundle.comparison],
        "copula": bundle.copula.report,
    }
    return {
        "models.json": bundle.to_json(),
        "gof.json": json.dumps(gof, sort_keys=True, indent=1) + "\n",
    }


# --------------------------------------------------------------------------
# tree


def cmd_tree(bundle, config):
    return build_tree(bundle.copula.theta, bundle.wind, bundle.precip, config.bounds)


def tree_outputs(tree):
    csv_text, text = tree_report(tree)
    return {"tree.csv": csv_text, "tree.txt": text}


# --------------------------------------------------------------------------
# generate


def _energy_summary(sset):
    e = sset.energy()
    lines = ["scenario_id,tag,weight,energy_kwh"]
    for sid, tag, w, en in zip(sset.ids, sset.tags, sset.weights, e):
        lines.append(f"{int(sid)},{tag},{float(w)!r},{float(en)!r}")
    imax, imin = int(np.argmax(e)), int(np.argmin(e))
    extremes = {
        "max": {"scenario_id": int(sset.ids[imax]), "tag": sset.tags[imax], "energy_kwh": float(e[imax])},
        "min": {"scenario_id": int(sset.ids[imin]), "tag": sset.tags[imin], "energy_kwh": float(e[imin])},
    }
    return "\n".join(lines) + "\n", extremes


def generate_normal_sets(bundle, config):
    seed = config.require_seed()
    raw = generate_normal(
        bundle.hourly.take(config.horizon),
        config.turbine,
        config.pv,
        n=config.n_scenarios,
        rng=stream(seed, "normal"),
        irradiance_ref=config.irradiance_ref,
    )
    raw.metadata["seed"] = seed
    return raw, reduce(raw, config.n_reduced_normal, config.reduce_components)


def generate_cell_sets(bundle, config, tree=None):
    seed = config.require_seed()
    tree = tree or cmd_tree(bundle, config)
    out = []
    for cell in tree.cells:
        s = generate_anomalous(
            cell,
            bundle.copula.theta,
            bundle.wind,
            bundle.precip,
            bundle.hourly,
            config.turbine,
            config.pv,
            config.derating,
            n=config.n_per_cell,
            rng=stream(seed, "anomalous", cell.scenario_id),
            irradiance_ref=config.irradiance_ref,
            horizon=config.horizon,
        )
        out.append((cell, s))
    return tree, out


def anomalous_representatives(bundle, config, tree=None):
    """One reduced scenario per tree cell, weighted by the cell probability."""
    tree, cell_sets = generate_cell_sets(bundle, config, tree)
    reps = []
    sampling = {}
    for cell, s in cell_sets:
        r = reduce(s, 1, config.reduce_components)
        r.ids = np.array([cell.scenario_id])
        reps.append(r)
        sampling[str(cell.scenario_id)] = {
            "method": s.metadata["sampling"],
            "acceptance": s.metadata["acceptance"],
        }
    weights = [c.probability for c in tree.cells]
    return combine(
        reps,
        weights,
        {"kind": "anomalous", "seed": config.seed, "horizon": config.horizon, "cells": sampling},
    )


def cmd_generate(bundle, config, mode="normal"):
    """Return ``{name: ScenarioSet}`` for the requested mode."""
    if mode not in MODES:
        raise ConfigurationError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "normal":
        raw, reduced = generate_normal_sets(bundle, config)
        return {"normal_raw": raw, "normal_reduced": reduced}
    if mode == "anomalous":
        return {"anomalous": anomalous_representatives(bundle, config)}
    _, cell_sets = generate_cell_sets(bundle, config)
    return {
        f"cell_{cell.scenario_id:02d}": reduce(s, config.per_cell_target, config.reduce_components)
        for cell, s in cell_sets
    }


def generate_outputs(sets, seed, mode="normal"):
    files = {}
    extremes = {}
    for name, s in sets.items():
        files[f"{name}.csv"] = scenarios_csv(s)
        files[f"{name}.json"] = scenarios_sidecar(s, seed)
        summary, ext = _energy_summary(s)
        files[f"{name}_energy.csv"] = summary
        extremes[name] = ext
    files[f"energy_extremes_{mode}.json"] = json.dumps(extremes, sort_keys=True, indent=1) + "\n"
    return files


def load_scenarios(directory, name):
    d = Path(directory)
    c, j = d / f"{name}.csv", d / f"{name}.json"
    for p in (c, j):
        if not p.exists():
            raise DependencyError(f"scenario file not found: {p}")
    return read_scenarios(c.read_text(encoding="utf-8"), j.read_text(encoding="utf-8"))


# --------------------------------------------------------------------------
# ut


def cmd_ut(config, moments):
    if not isinstance(moments, InputMoments):
        moments = InputMoments(np.asarray(moments["mean"]), np.asarray(moments["cov"]))
    return propagate_power(moments, config.turbine, config.pv, config.w0)


# --------------------------------------------------------------------------
# validate


def cmd_validate(bundle, dataset, scenario_dir, config):
    """Goodness-of-fit, GP vs splice comparison and QQ checks.

    The generated raw normal-weather set is compared (QQ) against the
    historical record converted to power and against an independently
    seeded regeneration. Returns ``(report_dict, files)``.
    """
    raw = load_scenarios(scenario_dir, "normal_raw")
    seed = config.require_seed()
    wet = dataset.precip_mmh > 0
    gof = {
        "wind": gof_report(dataset.wind_ms, bundle.wind, config.alpha),
        "precip": gof_report(dataset.precip_mmh[wet], bundle.precip, config.alpha),
    }
    ranked, excluded = model_comparison(
        dataset.precip_mmh[wet], ("gp", "gev_gp"), config.alpha, config.splice_quantile
    )
    regen = generate_normal(
        bundle.hourly.take(raw.horizon),
        config.turbine,
        config.pv,
        n=len(raw),
        rng=stream(seed, "validate"),
        irradiance_ref=config.irradiance_ref,
    )
    hist_wind = wind_power(dataset.wind_ms, config.turbine)
    hist_pv = pv_power(dataset.ghi_kwm2, config.pv)
    k = config.qq_points
    qq = {
        "wind_vs_history": qq_data(hist_wind, raw.wind_kw, k),
        "pv_vs_history": qq_data(hist_pv, raw.pv_kw, k),
        "wind_regenerated": qq_data(regen.wind_kw, raw.wind_kw, k),
        "pv_regenerated": qq_data(regen.pv_kw, raw.pv_kw, k),
    }
    report = {
        "gof": {k_: r.to_dict() for k_, r in gof.items()},
        "precip_comparison": [r.to_dict() for r in ranked],
        "precip_comparison_excluded": excluded,
        "qq_r_squared": {name: q.r_squared for name, q in qq.items()},
    }
    files = {"validation.json": json.dumps(report, sort_keys=True, indent=1) + "\n"}
    for name, q in qq.items():
        files[f"qq_{name}.csv"] = q.to_csv()
    files["ecdf_wind.csv"] = ecdf_csv(dataset.wind_ms, bundle.wind)
    files["ecdf_precip.csv"] = ecdf_csv(dataset.precip_mmh[wet], bundle.precip)
    files["pdf_wind.csv"] = density_overlay_csv(dataset.wind_ms, bundle.wind)
    files["pdf_precip.csv"] = density_overlay_csv(dataset.precip_mmh[wet], bundle.precip)
    return report, files


# --------------------------------------------------------------------------
# file emission


def write_files(directory, files):
    """Atomically write ``{name: text}`` into ``directory``.

    All files are staged as temporaries first; only when every one has
    been written are they renamed into place.
    """
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    staged = []
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=d)
            staged.append((tmp, d / name))
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, target in staged:
        os.replace(tmp, target)
    return [str(t) for _, t in staged]
