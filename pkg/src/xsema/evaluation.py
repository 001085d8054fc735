"""Metrics and the two experimental protocols.

Metrics are micro-averaged precision/recall (which coincide with accuracy
for single-label multiclass, so the three columns of a result table are
equal by construction) plus macro-F1 with the zero convention for empty
denominators.

The generality protocol splits every (class, bridge) cell 80:20; the
generalizability protocol trains on a fixed bridge set and tests on all
remaining bridges, with ordinary transactions split 80:20.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .classify import ClassifierSpec
from .core import CLASSES
from .encoder import TrainingHyperparams
from .errors import BridgeOverlapError, ConfigError, SplitError
from .ingest import Dataset, load_labeled_jsonl
from .pipeline import FEATURE_MODES, XSemaModel, provider_from_descriptor

# the four highest-volume bridges, used as the default training side
DEFAULT_TRAIN_BRIDGES = ("Allbridge core", "Celer cbridge", "Multichain",
                         "Stargate")


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray  # (true, predicted) over CLASSES

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def one_vs_rest(self, class_index: int) -> Tuple[int, int, int, int]:
        """(TP, FP, FN, TN) for one class."""
        tp = int(self.counts[class_index, class_index])
        fp = int(self.counts[:, class_index].sum()) - tp
        fn = int(self.counts[class_index, :].sum()) - tp
        tn = self.total - tp - fp - fn
        return tp, fp, fn, tn

    def to_lists(self):
        return self.counts.tolist()


@dataclass(frozen=True)
class MetricsReport:
    micro_precision: float
    micro_recall: float
    accuracy: float
    f1_macro: float
    per_class: Dict[str, Dict[str, float]]
    confusion: ConfusionMatrix

    def to_dict(self) -> dict:
        return {"micro_precision": self.micro_precision,
                "micro_recall": self.micro_recall,
                "accuracy": self.accuracy,
                "f1_macro": self.f1_macro,
                "per_class": self.per_class,
                "confusion": self.confusion.to_lists()}


def _as_indices(labels) -> np.ndarray:
    out = []
    for lab in labels:
        value = lab.value if hasattr(lab, "value") else lab
        out.append(CLASSES.index(value))
    return np.asarray(out, dtype=np.int64)


def compute_metrics(y_true, y_pred) -> MetricsReport:
    t = _as_indices(y_true)
    p = _as_indices(y_pred)
    if len(t) != len(p):
        raise SplitError("length-mismatch between truth and prediction")
    if len(t) == 0:
        raise SplitError("empty-input")
    k = len(CLASSES)
    counts = np.zeros((k, k), dtype=np.int64)
    np.add.at(counts, (t, p), 1)
    cm = ConfusionMatrix(counts)
    tp_sum = fp_sum = fn_sum = 0
    per_class = {}
    f1s = []
    for i, name in enumerate(CLASSES):
        tp, fp, fn, _ = cm.one_vs_rest(i)
        tp_sum, fp_sum, fn_sum = tp_sum + tp, fp_sum + fp, fn_sum + fn
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = (2 * precision * recall / (precision + recall)
              if precision + recall else 0.0)
        per_class[name] = {"precision": precision, "recall": recall, "f1": f1}
        f1s.append(f1)
    accuracy = float(np.trace(counts)) / len(t)
    micro_p = tp_sum / (tp_sum + fp_sum) if tp_sum + fp_sum else 0.0
    micro_r = tp_sum / (tp_sum + fn_sum) if tp_sum + fn_sum else 0.0
    return MetricsReport(micro_precision=micro_p, micro_recall=micro_r,
                         accuracy=accuracy, f1_macro=float(np.mean(f1s)),
                         per_class=per_class, confusion=cm)


# --- split plans ---

@dataclass(frozen=True)
class SplitPlan:
    mode: str = "generality"
    test_fraction: float = 0.20
    train_bridges: Tuple[str, ...] = DEFAULT_TRAIN_BRIDGES
    test_bridges: Optional[Tuple[str, ...]] = None
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("generality", "generalizability"):
            raise ConfigError(f"unknown split mode {self.mode!r}")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError("test_fraction must be in (0, 1)")

    def to_dict(self) -> dict:
        return {"mode": self.mode, "test_fraction": self.test_fraction,
                "train_bridges": list(self.train_bridges),
                "test_bridges": (list(self.test_bridges)
                                 if self.test_bridges else None),
                "seed": self.seed}

    @classmethod
    def from_dict(cls, data: dict) -> "SplitPlan":
        return cls(mode=data.get("mode", "generality"),
                   test_fraction=float(data.get("test_fraction", 0.20)),
                   train_bridges=tuple(data.get("train_bridges",
                                                DEFAULT_TRAIN_BRIDGES)),
                   test_bridges=(tuple(data["test_bridges"])
                                 if data.get("test_bridges") else None),
                   seed=int(data.get("seed", 0)))


def _cell_test_size(n: int, fraction: float) -> int:
    if n < 2:
        return 0                       # singletons go entirely to train
    return max(1, int(n * fraction))


def split_generality(ds: Dataset, plan: SplitPlan) -> Tuple[Dataset, Dataset]:
    """Stratified 80:20 split per (class, bridge) cell, seeded shuffle."""
    if plan.mode != "generality":
        raise ConfigError("plan mode must be generality")
    if len(ds) == 0:
        raise SplitError("empty-dataset")
    cells: Dict[Tuple[str, str], List[int]] = {}
    for i, item in enumerate(ds.items):
        key = (item.label.value, item.label.bridge or "")
        cells.setdefault(key, []).append(i)
    rng = np.random.default_rng(plan.seed)
    train_idx: List[int] = []
    test_idx: List[int] = []
    for key in sorted(cells):
        members = cells[key]
        order = rng.permutation(len(members))
        n_test = _cell_test_size(len(members), plan.test_fraction)
        for pos, j in enumerate(order):
            (test_idx if pos < n_test else train_idx).append(members[j])
    train_idx.sort()
    test_idx.sort()
    return (_subset(ds, train_idx), _subset(ds, test_idx))


def split_generalizability(ds: Dataset, plan: SplitPlan) -> Tuple[Dataset, Dataset]:
    """Cross-chain items split by bridge membership; NT split 80:20."""
    if plan.mode != "generalizability":
        raise ConfigError("plan mode must be generalizability")
    if not plan.train_bridges:
        raise SplitError("empty-train-bridges")
    train_set = set(plan.train_bridges)
    if plan.test_bridges is not None:
        overlap = train_set & set(plan.test_bridges)
        if overlap:
            raise BridgeOverlapError(f"bridges on both sides: {sorted(overlap)}")
    train_idx: List[int] = []
    test_idx: List[int] = []
    nt_idx: List[int] = []
    for i, item in enumerate(ds.items):
        if item.label.value == "NT":
            nt_idx.append(i)
        elif item.label.bridge in train_set:
            train_idx.append(i)
        elif plan.test_bridges is None or item.label.bridge in plan.test_bridges:
            test_idx.append(i)
    rng = np.random.default_rng(plan.seed)
    order = rng.permutation(len(nt_idx))
    n_test = _cell_test_size(len(nt_idx), plan.test_fraction)
    for pos, j in enumerate(order):
        (test_idx if pos < n_test else train_idx).append(nt_idx[j])
    train_idx.sort()
    test_idx.sort()
    return (_subset(ds, train_idx), _subset(ds, test_idx))


def split_dataset(ds: Dataset, plan: SplitPlan) -> Tuple[Dataset, Dataset]:
    if plan.mode == "generality":
        return split_generality(ds, plan)
    return split_generalizability(ds, plan)


def _subset(ds: Dataset, indices: Sequence[int]) -> Dataset:
    return Dataset(items=tuple(ds.items[i] for i in indices),
                   source_manifest=dict(ds.source_manifest))


# --- experiment runner ---

@dataclass(frozen=True)
class ExperimentConfig:
    dataset_path: Optional[str] = None
    feature_mode: str = "fused"
    split: SplitPlan = field(default_factory=SplitPlan)
    classifier: ClassifierSpec = field(
        default_factory=lambda: ClassifierSpec(algorithm="random-forest"))
    provider: Dict[str, object] = field(
        default_factory=lambda: {"kind": "hashing", "dimension": 512, "seed": 0})
    projection: Optional[Dict[str, object]] = None
    seed: int = 0

    def __post_init__(self):
        if self.feature_mode not in FEATURE_MODES:
            raise ConfigError(f"unknown feature mode {self.feature_mode!r}")

    def to_dict(self) -> dict:
        return {"dataset_path": self.dataset_path,
                "feature_mode": self.feature_mode,
                "split": self.split.to_dict(),
                "classifier": self.classifier.to_dict(),
                "provider": dict(self.provider),
                "projection": dict(self.projection) if self.projection else None,
                "seed": self.seed}

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        return cls(
            dataset_path=data.get("dataset_path"),
            feature_mode=data.get("feature_mode", "fused"),
            split=SplitPlan.from_dict(data.get("split", {})),
            classifier=ClassifierSpec.from_dict(
                data.get("classifier", {"algorithm": "random-forest"})),
            provider=dict(data.get("provider",
                                   {"kind": "hashing", "dimension": 512,
                                    "seed": 0})),
            projection=(dict(data["projection"])
                        if data.get("projection") else None),
            seed=int(data.get("seed", 0)))


@dataclass(frozen=True)
class ExperimentReport:
    config: dict
    metrics: MetricsReport
    per_bridge: Dict[str, Dict[str, float]]
    n_train: int
    n_test: int
    seed: int
    elapsed_seconds: float

    def to_dict(self, include_timing: bool = True) -> dict:
        out = {"config": self.config,
               "metrics": self.metrics.to_dict(),
               "per_bridge": self.per_bridge,
               "n_train": self.n_train,
               "n_test": self.n_test,
               "seed": self.seed}
        if include_timing:
            out["elapsed_seconds"] = self.elapsed_seconds
        return out

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing=include_timing),
                          sort_keys=True, indent=2)

    def to_csv_row(self) -> str:
        """Flat CSV (header + one row) for table building."""
        m = self.metrics
        header = ("feature_mode,classifier,split_mode,seed,n_train,n_test,"
                  "precision,recall,accuracy,f1_macro")
        row = ",".join([
            self.config["feature_mode"],
            self.config["classifier"]["algorithm"],
            self.config["split"]["mode"],
            str(self.seed), str(self.n_train), str(self.n_test),
            f"{m.micro_precision:.6f}", f"{m.micro_recall:.6f}",
            f"{m.accuracy:.6f}", f"{m.f1_macro:.6f}"])
        return header + "\n" + row + "\n"


def run_experiment(cfg: ExperimentConfig,
                   dataset: Optional[Dataset] = None) -> ExperimentReport:
    """Featurize, train on the train split only, evaluate on the test split."""
    start = time.monotonic()
    if dataset is None:
        if not cfg.dataset_path:
            raise ConfigError("config-invalid: no dataset given")
        dataset = load_labeled_jsonl(cfg.dataset_path)
    train, test = split_dataset(dataset, cfg.split)
    hp = (TrainingHyperparams(**cfg.projection) if cfg.projection
          else TrainingHyperparams(learning_rate=0.05, epochs=40,
                                   seed=cfg.seed))
    model = XSemaModel(feature_mode=cfg.feature_mode,
                       classifier_spec=cfg.classifier,
                       provider=provider_from_descriptor(dict(cfg.provider)),
                       projection_hp=hp, seed=cfg.seed)
    model.fit(train.items)
    y_true = [it.label.value for it in test.items]
    y_pred = model.predict([it.metadata for it in test.items])
    metrics = compute_metrics(y_true, y_pred)
    per_bridge: Dict[str, Dict[str, float]] = {}
    for bridge in sorted({it.label.bridge for it in test.items
                          if it.label.bridge}):
        idx = [i for i, it in enumerate(test.items)
               if it.label.bridge == bridge]
        correct = sum(1 for i in idx if y_pred[i] == y_true[i])
        per_bridge[bridge] = {"n": len(idx), "accuracy": correct / len(idx)}
    elapsed = time.monotonic() - start
    return ExperimentReport(config=cfg.to_dict(), metrics=metrics,
                            per_bridge=per_bridge, n_train=len(train),
                            n_test=len(test), seed=cfg.seed,
                            elapsed_seconds=elapsed)
