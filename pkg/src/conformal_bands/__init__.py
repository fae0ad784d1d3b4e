from .dataset import DataSet, read_dataset, write_dataset
from .interval import Interval, PredictionSet
from .quantiles import MiscoverageLevel, absolute_residuals, finite_sample_quantile
from .splitting import SplitConfig, split_indices
from .algorithm import CrossValidation, FittedModel, RegressionAlgorithm, fit
from .cross_validation import cross_validate
from .parametric import ParametricIntervals, parametric_interval
from .scores import ConformityScore
from .band import ConformalBand, MultiSplitBand, evaluate_band
from .split_conformal import multi_split_conformal, naive_band, split_conformal
from .jackknife import jackknife_band
from .roo import roo_relaxed, roo_split_conformal
from .full_conformal import FullConformalMethod, TrialGrid, full_conformal, full_conformal_contains
from .loco import ExcessErrorInterval, LocoReport, fit_loco_local, loco_global, loco_local
from .settings import SettingSpec, Truth, generate
from .oracles import OracleBand, oracle_bands
from .metrics import MetricRow, aggregate, evaluate
from .experiments import ExperimentResult, run_experiment

__all__ = [
    "DataSet",
    "read_dataset",
    "write_dataset",
    "Interval",
    "PredictionSet",
    "MiscoverageLevel",
    "absolute_residuals",
    "finite_sample_quantile",
    "SplitConfig",
    "split_indices",
    "CrossValidation",
    "FittedModel",
    "RegressionAlgorithm",
    "fit",
    "cross_validate",
    "ParametricIntervals",
    "parametric_interval",
    "ConformityScore",
    "ConformalBand",
    "MultiSplitBand",
    "evaluate_band",
    "naive_band",
    "split_conformal",
    "multi_split_conformal",
    "jackknife_band",
    "roo_split_conformal",
    "roo_relaxed",
    "FullConformalMethod",
    "TrialGrid",
    "full_conformal",
    "full_conformal_contains",
    "ExcessErrorInterval",
    "LocoReport",
    "fit_loco_local",
    "loco_global",
    "loco_local",
    "SettingSpec",
    "Truth",
    "generate",
    "OracleBand",
    "oracle_bands",
    "MetricRow",
    "aggregate",
    "evaluate",
    "ExperimentResult",
    "run_experiment",
]

__version__ = "0.1.0"
