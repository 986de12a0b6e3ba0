"""Wind and photovoltaic output scenarios under normal and anomalous weather.

Marginal laws for wind speed, irradiance and precipitation, a Frank copula
coupling wind with precipitation, a 16-cell scenario tree of consecutive
anomalous weather, Monte-Carlo generation with greedy scenario reduction,
unscented moment propagation and goodness-of-fit diagnostics.
"""
from .copula import FrankCopula, fit_theta, kendall_tau
from .dataset import WeatherDataset, hourly_moments, ingest, ingest_text
from .errors import (
    DependencyError,
    FitError,
    TailSparsityError,
    ValidationError,
    WindSolarError,
)
from .marginals import (
    BetaParams,
    GevGpSplice,
    GevParams,
    GpParams,
    WeibullParams,
    splice_fit,
)
from .pipeline import FittedBundle, PipelineConfig
from .power import DeratingTable, PvSpec, TurbineSpec, pv_power, wind_power
from .rng import stream
from .scenarios import HourlyMoments, ScenarioSet, generate_anomalous, generate_normal, reduce
from .tree import LevelBounds, ScenarioTree, build_tree
from .unscented import InputMoments, propagate, propagate_power
from .validation import gof_report, ks_test, model_comparison, qq_data

__version__ = "0.1.0"
