"""Command-line front end: ``band``, ``loco`` and ``simulate`` subcommands.

Exit codes: 0 success, 2 input error, 3 numerical failure.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from .band import evaluate_band
from .config import BAND_VARIANTS, RunConfig, build_config, load_config_file, parse_estimator
from .dataset import DataSet, read_dataset, read_features
from .exceptions import NUMERICAL_ERRORS
from .experiments import EXPERIMENTS, run_experiment
from .full_conformal import FullConformalMethod, TrialGrid
from .jackknife import jackknife_band
from .loco import fit_loco_local, loco_global
from .roo import roo_relaxed, roo_split_conformal
from .scores import ABSOLUTE, LOCALLY_WEIGHTED, ConformityScore
from .split_conformal import multi_split_conformal, naive_band, split_conformal
from .splitting import SplitConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def _score(config: RunConfig, data: DataSet) -> ConformityScore:
    if config.score == ABSOLUTE:
        return ConformityScore()
    return ConformityScore(LOCALLY_WEIGHTED, mad_algorithm=parse_estimator(config.mad_estimator or config.estimator, data))


def _trial_grid(config: RunConfig, data: DataSet) -> TrialGrid:
    default = TrialGrid.default_for(data.y, config.grid_n)
    lo = default.lo if config.grid_lo is None else config.grid_lo
    hi = default.hi if config.grid_hi is None else config.grid_hi
    return TrialGrid(lo, hi, config.grid_n)


def build_method(config: RunConfig, data: DataSet):
    alg = parse_estimator(config.estimator, data)
    score = _score(config, data)
    cfg = SplitConfig(seed=config.seed, ratio=config.ratio)
    if config.variant == "naive":
        return naive_band(alg, data, config.alpha, score)
    if config.variant == "split":
        return split_conformal(alg, data, config.alpha, cfg, score)
    if config.variant == "jackknife":
        return jackknife_band(alg, data, config.alpha, score)
    if config.variant == "roo":
        return roo_split_conformal(alg, data, config.alpha, cfg, score)
    if config.variant == "roo_relaxed":
        return roo_relaxed(alg, data, config.alpha, cfg, score)
    if config.variant == "multi_split":
        return multi_split_conformal(alg, data, config.alpha, config.splits, ratio=config.ratio,
                                     master_seed=config.seed, score=score)
    return FullConformalMethod(alg, data, config.alpha, _trial_grid(config, data), score)


def cmd_band(config: RunConfig, train_path, query_path) -> pd.DataFrame:
    train = read_dataset(train_path)
    query = read_features(query_path, train.d)
    method = build_method(config, train)
    if config.variant in ("roo", "roo_relaxed"):
        intervals = [evaluate_band(method, point) for point in query]
        lo = np.array([iv.lo for iv in intervals])
        hi = np.array([iv.hi for iv in intervals])
    else:
        lo, hi = method.predict_interval(query)
    frame = pd.DataFrame(query, columns=train.feature_names())
    frame["lo"] = lo
    frame["hi"] = hi
    frame["variant"] = config.variant
    frame["alpha"] = config.alpha
    out = Path(config.out or "intervals.csv")
    frame.to_csv(out, index=False, float_format="%.10g", na_rep="nan")
    finite = np.isfinite(hi - lo)
    print(f"band: {len(frame)} intervals ({config.variant}, alpha={config.alpha}), "
          f"{int((~finite).sum())} unbounded or empty -> {out}")
    return frame


def _selection(text: str, d: int):
    text = text.strip()
    if text in ("all", "lasso_cv"):
        return text
    columns = []
    for item in filter(None, (part.strip() for part in text.split(","))):
        label = item[1:] if item.lower().startswith("x") else item
        if not label.isdigit():
            raise ValueError(f"bad covariate '{item}' in --select; use x1,x3 or 1,3")
        j = int(label) - 1
        if not 0 <= j < d:
            raise ValueError(f"covariate '{item}' out of range for d={d}")
        columns.append(j)
    if not columns:
        raise ValueError("--select names no covariates")
    return columns


def cmd_loco(config: RunConfig, data_path):
    """Global LOCO report (report.json, report.csv); with --local also local.csv of W_j rows."""
    data = read_dataset(data_path)
    alg = parse_estimator(config.estimator, data)
    cfg = SplitConfig(seed=config.seed, ratio=config.ratio)
    out = Path(config.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    report = loco_global(alg, data, config.alpha, cfg, _selection(config.select, data.d))
    (out / "report.json").write_text(report.to_json(indent=2) + "\n")
    report.to_csv(out / "report.csv")
    above = sum(1 for r in report.rows if r.wilcoxon_lo > 0)
    summary = (f"loco: {len(report.tested)} covariates tested at level alpha/|S| = {report.adjusted_alpha:.6g}, "
               f"{above} with Wilcoxon interval above 0 -> {out}")
    if config.local:
        columns = report.tested if config.select != "all" else None
        local = fit_loco_local(alg, data, config.alpha, cfg, columns).in_sample()
        frame = pd.DataFrame(
            [(w.j, f"x{w.j + 1}", w.index, w.w.lo, w.w.hi, w.unbounded) for w in local],
            columns=["j", "name", "index", "lo", "hi", "unbounded"],
        )
        frame.to_csv(out / "local.csv", index=False, float_format="%.10g")
        summary += f", {len(frame)} local rows"
    print(summary)
    return report


def cmd_simulate(config: RunConfig):
    result = run_experiment(config.experiment, config.reps, seed=config.seed, alpha=config.alpha,
                            scale=config.scale, jobs=config.jobs)
    paths = result.write(config.out or "results", timing=config.timing)
    print(f"simulate: {config.experiment} with {config.reps} reps, {len(result.rows)} metric rows "
          f"-> {paths['metrics']}")
    return result


def _common_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="flat key = value file; flags given here override it")
    parser.add_argument("--alpha", type=float, help="miscoverage level (default 0.1)")
    parser.add_argument("--estimator", help="kind[:key=value,...], e.g. lasso:folds=10 or ridge:lam=10,unscaled=1")
    parser.add_argument("--seed", type=int, help="master seed (default 0)")
    parser.add_argument("--ratio", type=float, help="fraction of rows in the fitting fold (default 0.5)")
    parser.add_argument("--out", help="output file (band) or directory (loco, simulate)")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="errors only")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conformal-bands", description="Distribution-free prediction bands")
    sub = parser.add_subparsers(dest="command", required=True)

    band = sub.add_parser("band", help="prediction intervals at query points")
    band.add_argument("train", help="training CSV with header x1,...,xd,y")
    band.add_argument("query", help="query CSV with header x1,...,xd")
    _common_flags(band)
    band.add_argument("--variant", choices=BAND_VARIANTS)
    band.add_argument("--score", choices=(ABSOLUTE, LOCALLY_WEIGHTED))
    band.add_argument("--mad-estimator", dest="mad_estimator", help="spread estimator for locally-weighted scores")
    band.add_argument("--splits", type=int, help="number of splits for multi_split")
    band.add_argument("--grid-lo", dest="grid_lo", type=float)
    band.add_argument("--grid-hi", dest="grid_hi", type=float)
    band.add_argument("--grid-n", dest="grid_n", type=int)

    loco = sub.add_parser("loco", help="leave-one-covariate-out importance")
    loco.add_argument("data", help="CSV with header x1,...,xd,y")
    _common_flags(loco)
    loco.add_argument("--select", help="all, lasso_cv, or covariates such as x1,x3")
    loco.add_argument("--local", action="store_const", const=True, help="also write per-point W_j intervals")

    simulate = sub.add_parser("simulate", help="reproduce a coverage/length experiment")
    _common_flags(simulate)
    simulate.add_argument("--experiment", choices=EXPERIMENTS)
    simulate.add_argument("--reps", type=int)
    simulate.add_argument("--scale", type=float, help="shrink n (and large d) by this factor")
    simulate.add_argument("--jobs", type=int, help="worker processes")
    simulate.add_argument("--timing", action="store_const", const=True, help="add wall-time columns")
    return parser


CONFIG_FLAGS = ("alpha", "estimator", "variant", "score", "mad_estimator", "seed", "ratio", "splits", "grid_lo",
                "grid_hi", "grid_n", "experiment", "reps", "scale", "jobs", "timing", "local", "select", "out")


def _configure_logging(args):
    level = logging.DEBUG if args.verbose else logging.ERROR if args.quiet else logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    try:
        file_values = load_config_file(args.config) if args.config else {}
        overrides = {key: getattr(args, key, None) for key in CONFIG_FLAGS}
        config = build_config(args.command, file_values, overrides)
        if args.command == "band":
            cmd_band(config, args.train, args.query)
        elif args.command == "loco":
            cmd_loco(config, args.data)
        else:
            cmd_simulate(config)
    except NUMERICAL_ERRORS as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
