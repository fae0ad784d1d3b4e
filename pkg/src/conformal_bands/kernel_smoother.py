import numpy as np
from scipy.spatial.distance import cdist

from .algorithm import FittedModel


def nadaraya_watson(x_eval: np.ndarray, x_train: np.ndarray, y_train: np.ndarray, bandwidth: float) -> np.ndarray:
    sq_dist = cdist(x_eval, x_train, metric="sqeuclidean")
    # shift by the row minimum so the nearest training point always has weight 1
    logits = -(sq_dist - sq_dist.min(axis=1, keepdims=True)) / (2.0 * bandwidth ** 2)
    weights = np.exp(logits)
    return (weights @ y_train) / weights.sum(axis=1)


def fit_kernel_smoother(data, bandwidth: float) -> FittedModel:
    x_train = np.array(data.x)
    y_train = np.array(data.y)

    def predict(x):
        return nadaraya_watson(x, x_train, y_train, bandwidth)

    return FittedModel(
        kind="kernel_smoother",
        n_features=data.d,
        predictor=predict,
        intercept=float(y_train.mean()),
        params={"bandwidth": bandwidth},
    )
