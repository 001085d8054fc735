"""End-to-end model: featurize, fit, predict, and self-contained bundles.

XSemaModel is the estimator that composes the pieces: motif census over the
transfer graph, event-text embedding plus trained projection, per-coordinate
standardization, and a downstream classifier. Bundles serialize to a single
JSON document with a content checksum, so load(save(b)) reproduces
predictions bit-identically from raw metadata alone.
"""

from __future__ import annotations

import hashlib
import json
from typing import List, Sequence

import numpy as np

from .base import BaseEstimator
from .classify import ClassifierSpec, classifier_from_dict, make_classifier
from .core import CLASSES, TransactionMetadata
from .encoder import (HashingEncoderConfig, HashingProvider, ProjectionHead,
                      RemoteEncoderConfig, RemoteProvider, TrainingHyperparams,
                      train_projection)
from .errors import (ConfigError, CorruptBundleError, MissingClassError,
                     VersionMismatchError)
from .eventtext import DEFAULT_MAX_TOKENS, EVENT_SEPARATOR, build_event_text
from .fuse import FeatureScaler, fit_scaler, scale
from .graph import build_asset_graph
from .motif import census_fast, default_catalog

FEATURE_MODES = ("motif-only", "text-only", "fused")
BUNDLE_FORMAT_VERSION = "xsema-bundle-v1"


def provider_from_descriptor(desc: dict):
    kind = desc.get("kind")
    if kind == "hashing":
        return HashingProvider(HashingEncoderConfig(
            dimension=int(desc.get("dimension", 512)),
            seed=int(desc.get("seed", 0))))
    if kind == "remote":
        return RemoteProvider(RemoteEncoderConfig(
            base_url=desc["base_url"],
            batch_size=int(desc.get("batch_size", 32)),
            timeout=float(desc.get("timeout", 30.0))))
    raise ConfigError(f"unknown provider kind {kind!r}")


class XSemaModel(BaseEstimator):
    """fit on labeled transactions, predict labels from raw metadata."""

    def __init__(self, feature_mode="fused", classifier_spec=None,
                 provider=None, projection_hp=None,
                 max_tokens=DEFAULT_MAX_TOKENS, seed=0):
        self.feature_mode = feature_mode
        self.classifier_spec = classifier_spec
        self.provider = provider
        self.projection_hp = projection_hp
        self.max_tokens = max_tokens
        self.seed = seed

    # --- featurization ---

    def _motif_matrix(self, metadatas: Sequence[TransactionMetadata]) -> np.ndarray:
        catalog = default_catalog()
        rows = [census_fast(build_asset_graph(m), catalog) for m in metadatas]
        return np.asarray(rows, dtype=np.float64).reshape(len(rows), 16)

    def _event_texts(self, metadatas) -> List[str]:
        return [build_event_text(m, self.max_tokens).text for m in metadatas]

    def _text_matrix(self, metadatas, head: ProjectionHead) -> np.ndarray:
        texts = self._event_texts(metadatas)
        embeddings = self._provider.embed_batch(texts)
        return head.project_batch(embeddings)

    def _raw_features(self, metadatas) -> np.ndarray:
        parts = []
        if self.feature_mode in ("motif-only", "fused"):
            parts.append(self._motif_matrix(metadatas))
        if self.feature_mode in ("text-only", "fused"):
            parts.append(self._text_matrix(metadatas, self.projection_))
        return np.hstack(parts)

    # --- estimator API ---

    def fit(self, items):
        """items: sequence of LabeledTransaction (training split only)."""
        if self.feature_mode not in FEATURE_MODES:
            raise ConfigError(f"unknown feature mode {self.feature_mode!r}")
        spec = self.classifier_spec or ClassifierSpec(
            algorithm="random-forest", seed=self.seed)
        self._provider = self.provider or HashingProvider(
            HashingEncoderConfig(seed=self.seed))
        metadatas = [it.metadata for it in items]
        labels = [it.label for it in items]
        y = np.array([CLASSES.index(lab.value) for lab in labels])
        if len(set(y.tolist())) < len(CLASSES):
            raise MissingClassError("training split must contain NT, DT and WT")

        self.projection_ = None
        if self.feature_mode in ("text-only", "fused"):
            texts = self._event_texts(metadatas)
            embeddings = self._provider.embed_batch(texts)
            hp = self.projection_hp or TrainingHyperparams(seed=self.seed)
            self.projection_ = train_projection(embeddings, labels, hp)

        raw = self._raw_features(metadatas)
        self.scaler_ = fit_scaler(raw)
        self.classifier_spec_ = spec
        self.classifier_ = make_classifier(spec)
        self.classifier_.fit(scale(self.scaler_, raw), y)
        return self

    def transform(self, metadatas: Sequence[TransactionMetadata]) -> np.ndarray:
        """Scaled feature matrix for raw metadata records."""
        if not metadatas:
            return np.zeros((0, self.scaler_.means.shape[0]))
        return scale(self.scaler_, self._raw_features(list(metadatas)))

    def predict(self, metadatas: Sequence[TransactionMetadata]) -> List[str]:
        if not metadatas:
            return []
        idx = self.classifier_.predict(self.transform(metadatas))
        return [CLASSES[i] for i in idx]

    # --- bundle serialization ---

    def to_bundle(self) -> dict:
        payload = {
            "format_version": BUNDLE_FORMAT_VERSION,
            "catalog_version": default_catalog().catalog_version,
            "classes": list(CLASSES),
            "feature_mode": self.feature_mode,
            "text": {"max_tokens": self.max_tokens,
                     "separator": EVENT_SEPARATOR},
            "provider": self._provider.describe(),
            "projection": (self.projection_.to_dict()
                           if self.projection_ is not None else None),
            "scaler": self.scaler_.to_dict(),
            "classifier_spec": self.classifier_spec_.to_dict(),
            "classifier": self.classifier_.to_dict(),
        }
        payload["checksum"] = _checksum(payload)
        return payload

    @classmethod
    def from_bundle(cls, bundle: dict, provider=None) -> "XSemaModel":
        if bundle.get("format_version") != BUNDLE_FORMAT_VERSION:
            raise VersionMismatchError(
                f"bundle format {bundle.get('format_version')!r}, "
                f"expected {BUNDLE_FORMAT_VERSION!r}")
        stated = bundle.get("checksum")
        if stated != _checksum({k: v for k, v in bundle.items()
                                if k != "checksum"}):
            raise CorruptBundleError("checksum mismatch")
        model = cls(feature_mode=bundle["feature_mode"],
                    max_tokens=int(bundle["text"]["max_tokens"]))
        model._provider = provider or provider_from_descriptor(bundle["provider"])
        model.projection_ = (ProjectionHead.from_dict(bundle["projection"])
                             if bundle["projection"] is not None else None)
        model.scaler_ = FeatureScaler.from_dict(bundle["scaler"])
        model.classifier_spec_ = ClassifierSpec.from_dict(bundle["classifier_spec"])
        model.classifier_ = classifier_from_dict(model.classifier_spec_,
                                                 bundle["classifier"])
        return model


def _checksum(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def save_model(model: XSemaModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(model.to_bundle(), fh, sort_keys=True)


def load_model(path, provider=None) -> XSemaModel:
    try:
        with open(path) as fh:
            bundle = json.load(fh)
    except OSError as exc:
        raise CorruptBundleError(f"io-error: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CorruptBundleError(f"not valid JSON: {exc}") from exc
    return XSemaModel.from_bundle(bundle, provider=provider)
