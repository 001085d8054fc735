"""Minimal estimator base: sklearn-style get_params/set_params plus input
validation helpers, without pulling in sklearn itself."""

from __future__ import annotations

import inspect

import numpy as np

from .errors import DimensionMismatchError, NonFiniteInputError, SingleClassError


class BaseEstimator:
    """Constructor-argument introspection, matching the sklearn convention:
    every __init__ parameter is stored under the same attribute name."""

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return [name for name in sig.parameters if name != "self"]

    def get_params(self, deep=True):
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(f"invalid parameter {name!r} for {type(self).__name__}")
            setattr(self, name, value)
        return self

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"


def check_matrix(x, n_features=None) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionMismatchError(f"expected 2-d matrix, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise NonFiniteInputError("feature matrix contains non-finite values")
    if n_features is not None and x.shape[1] != n_features:
        raise DimensionMismatchError(
            f"expected {n_features} features, got {x.shape[1]}")
    return x


def check_fit_inputs(x, y, min_classes=2):
    x = check_matrix(x)
    y = np.asarray(y, dtype=np.int64)
    if y.shape != (x.shape[0],):
        raise DimensionMismatchError("X and y length mismatch")
    if len(np.unique(y)) < min_classes:
        raise SingleClassError("training data contains a single class")
    return x, y
