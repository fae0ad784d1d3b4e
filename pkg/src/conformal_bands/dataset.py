from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import pandas as pd

from .exceptions import DataFormatError


def _frozen_array(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if ndim == 2 and arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DataSet:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen_array(self.x, 2))
        object.__setattr__(self, "y", _frozen_array(self.y, 1))
        self._validate()

    def _validate(self):
        if self.x.ndim != 2:
            raise ValueError(f"x must be a matrix, got array with {self.x.ndim} dimensions")
        if self.y.ndim != 1:
            raise ValueError(f"y must be a vector, got array with {self.y.ndim} dimensions")
        if self.x.shape[0] != self.y.shape[0]:
            raise ValueError(f"Row count of x ({self.x.shape[0]}) must equal length of y ({self.y.shape[0]})")
        if self.x.shape[0] < 1:
            raise ValueError("DataSet needs at least one row")
        if self.x.shape[1] < 1:
            raise ValueError("DataSet needs at least one feature column")
        if not np.all(np.isfinite(self.x)) or not np.all(np.isfinite(self.y)):
            raise ValueError("DataSet entries must be finite (no NaN or inf)")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    def subset(self, index: Union[Sequence[int], np.ndarray]) -> "DataSet":
        index = np.asarray(index)
        if index.dtype == bool:
            index = np.flatnonzero(index)
        index = index.astype(int)
        return DataSet(self.x[index], self.y[index])

    def augment(self, x_new: np.ndarray, y_new: float) -> "DataSet":
        x_new = np.asarray(x_new, dtype=float).reshape(1, -1)
        if x_new.shape[1] != self.d:
            raise ValueError(f"dimension mismatch: point has {x_new.shape[1]} features, data has {self.d}")
        return DataSet(np.vstack([self.x, x_new]), np.append(self.y, y_new))

    def drop_column(self, j: int) -> "DataSet":
        if not 0 <= j < self.d:
            raise ValueError(f"Column index must be in [0, {self.d}), got {j}")
        if self.d == 1:
            return DataSet(np.zeros((self.n, 1)), self.y)
        return DataSet(np.delete(self.x, j, axis=1), self.y)

    def feature_names(self):
        return [f"x{j + 1}" for j in range(self.d)]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.x, columns=self.feature_names())
        frame["y"] = self.y
        return frame

    def __repr__(self):
        return f"DataSet(n={self.n}, d={self.d})"


def _numeric_frame(frame: pd.DataFrame) -> np.ndarray:
    numeric = frame.apply(pd.to_numeric, errors="coerce")
    bad = numeric.isna().any(axis=1).to_numpy() | ~np.isfinite(numeric.to_numpy(dtype=float)).all(axis=1)
    if bad.any():
        row = int(np.argmax(bad))
        raise DataFormatError("non-numeric or non-finite value", line=row + 2)
    return numeric.to_numpy(dtype=float)


def _read_csv(path) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.ParserError as exc:
        raise DataFormatError(f"malformed CSV: {exc}") from exc
    except pd.errors.EmptyDataError as exc:
        raise DataFormatError("empty CSV file", line=1) from exc
    if frame.shape[0] == 0:
        raise DataFormatError("CSV file has a header but no rows", line=2)
    return frame


def _check_feature_header(columns, expected_d: int):
    expected = [f"x{j + 1}" for j in range(expected_d)]
    if list(columns) != expected:
        raise DataFormatError(f"header must be {','.join(expected)}, got {','.join(columns)}", line=1)


def read_dataset(path) -> DataSet:
    frame = _read_csv(path)
    columns = [c.strip() for c in frame.columns]
    if len(columns) < 2 or columns[-1] != "y":
        raise DataFormatError(f"header must be x1,...,xd,y, got {','.join(columns)}", line=1)
    _check_feature_header(columns[:-1], len(columns) - 1)
    values = _numeric_frame(frame)
    return DataSet(values[:, :-1], values[:, -1])


def read_features(path, d: int) -> np.ndarray:
    frame = _read_csv(path)
    columns = [c.strip() for c in frame.columns]
    if columns and columns[-1] == "y":
        columns = columns[:-1]
        frame = frame.iloc[:, :-1]
    _check_feature_header(columns, d)
    return _numeric_frame(frame)


def write_dataset(data: DataSet, path):
    data.to_frame().to_csv(path, index=False, float_format="%.17g")
