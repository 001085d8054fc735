import numpy as np
import pytest

from xsema.errors import (DimensionMismatchError, EmptyTrainError,
                          UnfittedScalerError)
from xsema.fuse import (FeatureScaler, concat_features, fit_scaler, fuse,
                        scale, unscale)


def test_concat_order_motif_then_message():
    v_ft = np.arange(16, dtype=float)
    v_mp = np.arange(100, 116, dtype=float)
    out = concat_features(v_ft, v_mp)
    assert out.shape == (32,)
    assert np.array_equal(out[:16], v_ft)
    assert np.array_equal(out[16:], v_mp)


def test_fit_scaler_population_moments():
    train = np.array([[0.0, 1.0], [2.0, 1.0], [4.0, 1.0]])
    scaler = fit_scaler(train)
    assert np.allclose(scaler.means, [2.0, 1.0])
    # constant column gets std 1 so scaling is a no-op shift
    assert np.allclose(scaler.stds, [np.sqrt(8.0 / 3.0), 1.0])


def test_scaled_train_has_zero_mean_unit_std():
    rng = np.random.default_rng(0)
    train = rng.normal(3.0, 2.5, (200, 32))
    scaler = fit_scaler(train)
    z = scale(scaler, train)
    assert np.allclose(z.mean(axis=0), 0.0, atol=1e-12)
    assert np.allclose(z.std(axis=0), 1.0, atol=1e-12)


def test_unscale_inverts_scale():
    rng = np.random.default_rng(1)
    train = rng.normal(size=(50, 8))
    scaler = fit_scaler(train)
    row = rng.normal(size=8)
    assert np.allclose(unscale(scaler, scale(scaler, row)), row)


def test_fuse_end_to_end():
    rng = np.random.default_rng(2)
    raw = np.hstack([rng.integers(0, 5, (30, 16)).astype(float),
                     rng.normal(size=(30, 16))])
    scaler = fit_scaler(raw)
    fused = fuse(raw[0, :16], raw[0, 16:], scaler)
    assert fused.shape == (32,)
    assert np.allclose(fused, scale(scaler, raw[0]))


def test_empty_train_rejected():
    with pytest.raises(EmptyTrainError):
        fit_scaler(np.zeros((0, 4)))


def test_unfitted_scaler_rejected():
    with pytest.raises(UnfittedScalerError):
        scale(None, np.zeros(4))


def test_width_mismatch_rejected():
    scaler = fit_scaler(np.zeros((3, 4)) + np.arange(3)[:, None])
    with pytest.raises(DimensionMismatchError):
        scale(scaler, np.zeros(5))


def test_scaler_serialization_roundtrip():
    scaler = fit_scaler(np.random.default_rng(3).normal(size=(10, 6)))
    clone = FeatureScaler.from_dict(scaler.to_dict())
    assert np.array_equal(scaler.means, clone.means)
    assert np.array_equal(scaler.stds, clone.stds)
