"""Concatenate motif counts with the projected text vector and standardize.

The raw fusion is plain concatenation (slots 1-16 motif, 17-32 message).
Standardization is layered on top because motif counts (small integers) and
projection activations live on different scales and the linear SVM is
scale-sensitive; the fitted scaler travels inside the model bundle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, EmptyTrainError, UnfittedScalerError


@dataclass(frozen=True)
class FeatureScaler:
    means: np.ndarray
    stds: np.ndarray  # zero stds already replaced by 1

    def to_dict(self) -> dict:
        return {"means": self.means.tolist(), "stds": self.stds.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureScaler":
        return cls(means=np.asarray(data["means"], dtype=np.float64),
                   stds=np.asarray(data["stds"], dtype=np.float64))


def fit_scaler(train: np.ndarray) -> FeatureScaler:
    """Per-coordinate population mean/std over the training rows; zero std -> 1."""
    train = np.asarray(train, dtype=np.float64)
    if train.ndim != 2 or train.shape[0] == 0:
        raise EmptyTrainError("scaler needs a non-empty 2-d training matrix")
    means = train.mean(axis=0)
    stds = train.std(axis=0)
    stds = np.where(stds == 0.0, 1.0, stds)
    return FeatureScaler(means=means, stds=stds)


def concat_features(v_ft: np.ndarray, v_mp: np.ndarray) -> np.ndarray:
    return np.concatenate([np.asarray(v_ft, dtype=np.float64),
                           np.asarray(v_mp, dtype=np.float64)])


def scale(scaler: FeatureScaler, raw: np.ndarray) -> np.ndarray:
    raw = np.asarray(raw, dtype=np.float64)
    if scaler is None:
        raise UnfittedScalerError("scaler has not been fitted")
    if raw.shape[-1] != scaler.means.shape[0]:
        raise DimensionMismatchError(
            f"expected width {scaler.means.shape[0]}, got {raw.shape[-1]}")
    return (raw - scaler.means) / scaler.stds


def unscale(scaler: FeatureScaler, scaled: np.ndarray) -> np.ndarray:
    return np.asarray(scaled, dtype=np.float64) * scaler.stds + scaler.means


def fuse(v_ft: np.ndarray, v_mp: np.ndarray, scaler: FeatureScaler) -> np.ndarray:
    """The complete 32-dim representation: scaled [motif | message] vector."""
    raw = concat_features(v_ft, v_mp)
    return scale(scaler, raw)
