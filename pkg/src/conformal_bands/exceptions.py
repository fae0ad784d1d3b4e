from typing import Optional

import numpy as np


class DataFormatError(ValueError):

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RankDeficientError(np.linalg.LinAlgError):
    pass


class ConvergenceError(ArithmeticError):

    def __init__(self, message: str, gap: float):
        self.gap = gap
        super().__init__(f"{message} (duality gap {gap:.3e})")


class FitError(RuntimeError):

    def __init__(self, message: str, trial_value: Optional[float] = None):
        self.trial_value = trial_value
        super().__init__(message)


NUMERICAL_ERRORS = (np.linalg.LinAlgError, ConvergenceError, FitError, FloatingPointError)
