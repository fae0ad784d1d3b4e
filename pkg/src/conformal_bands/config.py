"""Run configuration for the command line: flat key = value files plus flag overrides."""
import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional

from .algorithm import KINDS, CrossValidation, RegressionAlgorithm
from .constants import DEFAULT_ALPHA, DEFAULT_CV_FOLDS, DEFAULT_GRID_POINTS, DEFAULT_SEED, DEFAULT_SPLIT_RATIO
from .experiments import EXPERIMENTS
from .lasso import lambda_grid
from .scores import ABSOLUTE, LOCALLY_WEIGHTED

COMMANDS = ("band", "loco", "simulate")
BAND_VARIANTS = ("naive", "split", "jackknife", "roo", "roo_relaxed", "full", "multi_split")
ESTIMATOR_KEYS = ("lam", "mixing", "steps", "bandwidth", "df", "unscaled", "folds", "grid", "cv_seed")
TRUE_WORDS = ("1", "true", "yes", "on")
FALSE_WORDS = ("0", "false", "no", "off")


@dataclass(frozen=True)
class RunConfig:
    command: str
    alpha: float = DEFAULT_ALPHA
    estimator: str = "ols"
    variant: str = "split"
    score: str = ABSOLUTE
    mad_estimator: Optional[str] = None
    seed: int = DEFAULT_SEED
    ratio: float = DEFAULT_SPLIT_RATIO
    splits: int = 5
    grid_lo: Optional[float] = None
    grid_hi: Optional[float] = None
    grid_n: int = DEFAULT_GRID_POINTS
    experiment: Optional[str] = None
    reps: int = 50
    scale: float = 1.0
    jobs: int = 1
    timing: bool = False
    local: bool = False
    select: str = "all"
    out: Optional[str] = None

    def __post_init__(self):
        self._validate()

    def _validate(self):
        if self.command not in COMMANDS:
            raise ValueError(f"Unknown command '{self.command}'. Must be one of {', '.join(COMMANDS)}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.variant not in BAND_VARIANTS:
            raise ValueError(f"Unknown variant '{self.variant}'. Must be one of {', '.join(BAND_VARIANTS)}")
        if self.score not in (ABSOLUTE, LOCALLY_WEIGHTED):
            raise ValueError(f"score must be '{ABSOLUTE}' or '{LOCALLY_WEIGHTED}', got '{self.score}'")
        if not 0.0 < self.ratio < 1.0:
            raise ValueError(f"ratio must be in (0, 1), got {self.ratio}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        has_grid = self.grid_lo is not None or self.grid_hi is not None or self.grid_n != DEFAULT_GRID_POINTS
        if has_grid and self.variant != "full":
            raise ValueError("grid options apply only to the full conformal variant")
        if self.grid_n < 2:
            raise ValueError(f"grid_n must be >= 2, got {self.grid_n}")
        if self.splits < 1:
            raise ValueError(f"splits must be >= 1, got {self.splits}")
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")
        if not 0.0 < self.scale <= 1.0:
            raise ValueError(f"scale must be in (0, 1], got {self.scale}")
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")
        if self.command == "simulate":
            if self.experiment is None:
                raise ValueError("simulate needs --experiment")
            if self.experiment not in EXPERIMENTS:
                raise ValueError(f"Unknown experiment '{self.experiment}'. Must be one of {', '.join(EXPERIMENTS)}")


FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def parse_bool(text: str) -> bool:
    word = str(text).strip().lower()
    if word in TRUE_WORDS:
        return True
    if word in FALSE_WORDS:
        return False
    raise ValueError(f"expected a boolean, got '{text}'")


def _convert(key: str, text: str):
    kind = FIELD_TYPES[key]
    if kind is bool:
        return parse_bool(text)
    if kind is int:
        return int(text)
    if kind in (float, Optional[float]):
        return float(text)
    return text


def load_config_file(path) -> Dict[str, object]:
    """Read ``key = value`` lines; ``#`` starts a comment, keys may use - or _."""
    values = {}
    for number, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}: line {number}: expected 'key = value', got '{raw.strip()}'")
        key, text = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in FIELD_TYPES or key == "command":
            raise ValueError(f"{path}: line {number}: unknown configuration key '{key}'")
        try:
            values[key] = _convert(key, text)
        except ValueError as exc:
            raise ValueError(f"{path}: line {number}: bad value for '{key}': {exc}") from exc
    return values


def build_config(command: str, file_values: Optional[Dict] = None, overrides: Optional[Dict] = None) -> RunConfig:
    values = dict(file_values or {})
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return RunConfig(command=command, **values)


def parse_estimator(text: str, data=None) -> RegressionAlgorithm:
    """``kind[:key=value,...]`` to a RegressionAlgorithm.

    ``folds`` or ``grid`` (values separated by ``|``) switch on cross-validation;
    lasso and elastic net without a grid get the usual lambda path of ``data``.
    """
    kind, _, rest = text.strip().partition(":")
    kind = kind.strip()
    if kind not in KINDS:
        raise ValueError(f"Unknown estimator kind '{kind}'. Must be one of {', '.join(KINDS)}")
    options = {}
    for item in filter(None, (part.strip() for part in rest.split(","))):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in ESTIMATOR_KEYS:
            raise ValueError(f"bad estimator option '{item}'; keys are {', '.join(ESTIMATOR_KEYS)}")
        options[key] = value.strip()
    params = {}
    for key in ("lam", "mixing", "bandwidth"):
        if key in options:
            params[key] = float(options[key])
    for key in ("steps", "df"):
        if key in options:
            params[key] = int(options[key])
    if "unscaled" in options:
        params["unscaled"] = parse_bool(options["unscaled"])
    if "folds" in options or "grid" in options:
        folds = int(options.get("folds", DEFAULT_CV_FOLDS))
        seed = int(options.get("cv_seed", 0))
        if "grid" in options:
            grid = tuple(float(v) for v in options["grid"].split("|") if v.strip())
        elif kind in ("lasso", "elastic_net") and data is not None:
            grid = lambda_grid(data.x, data.y, params.get("mixing", 1.0))
        else:
            raise ValueError(f"cross-validated '{kind}' needs grid=v1|v2|...")
        params["tuning"] = CrossValidation(grid, folds=folds, seed=seed)
    elif "cv_seed" in options:
        raise ValueError("cv_seed needs folds or grid")
    return RegressionAlgorithm(kind, **params)
