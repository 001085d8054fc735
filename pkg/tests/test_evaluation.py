import numpy as np
import pytest

from xsema.classify import ClassifierSpec
from xsema.core import CLASSES
from xsema.errors import BridgeOverlapError, ConfigError, SplitError
from xsema.evaluation import (DEFAULT_TRAIN_BRIDGES, ExperimentConfig,
                              ExperimentReport, SplitPlan, compute_metrics,
                              run_experiment, split_dataset, split_generality,
                              split_generalizability)
from xsema.ingest import Dataset
from xsema.synth import SynthConfig, generate_synthetic

from conftest import make_item


class TestComputeMetrics:
    def test_perfect_prediction(self):
        y = ["NT", "DT", "WT", "NT"]
        m = compute_metrics(y, y)
        assert m.accuracy == 1.0 and m.f1_macro == 1.0
        assert m.micro_precision == m.micro_recall == 1.0

    def test_micro_averages_equal_accuracy(self):
        rng = np.random.default_rng(0)
        y_true = [CLASSES[i] for i in rng.integers(0, 3, 500)]
        y_pred = [CLASSES[i] for i in rng.integers(0, 3, 500)]
        m = compute_metrics(y_true, y_pred)
        assert m.micro_precision == pytest.approx(m.accuracy, abs=1e-15)
        assert m.micro_recall == pytest.approx(m.accuracy, abs=1e-15)

    def test_hand_worked_case(self):
        y_true = ["NT", "NT", "NT", "DT", "DT", "WT", "WT", "WT"]
        y_pred = ["NT", "NT", "DT", "DT", "WT", "WT", "WT", "NT"]
        m = compute_metrics(y_true, y_pred)
        assert m.accuracy == pytest.approx(5 / 8)
        # NT: P=2/3 R=2/3 F1=2/3; DT: P=1/2 R=1/2 F1=1/2; WT: P=2/3 R=2/3
        assert m.f1_macro == pytest.approx((2 / 3 + 1 / 2 + 2 / 3) / 3,
                                           abs=1e-12)
        assert m.confusion.counts.tolist() == [[2, 1, 0], [0, 1, 1], [1, 0, 2]]

    def test_absent_class_zero_convention(self):
        m = compute_metrics(["NT", "NT"], ["NT", "DT"])
        assert m.per_class["WT"]["f1"] == 0.0
        assert m.per_class["DT"]["precision"] == 0.0

    def test_empty_rejected(self):
        with pytest.raises(SplitError):
            compute_metrics([], [])

    def test_length_mismatch_rejected(self):
        with pytest.raises(SplitError):
            compute_metrics(["NT"], ["NT", "DT"])


def _mixed_dataset():
    items = []
    i = 0
    for bridge, n in [("Stargate", 10), ("Multichain", 5), ("Wormhole", 4)]:
        for _ in range(n):
            items.append(make_item(i, "DT", bridge)); i += 1
        for _ in range(n):
            items.append(make_item(i, "WT", bridge)); i += 1
    for _ in range(20):
        items.append(make_item(i, "NT")); i += 1
    return Dataset(items=tuple(items), source_manifest={})


class TestSplits:
    def test_generality_fractions(self):
        ds = _mixed_dataset()
        train, test = split_generality(ds, SplitPlan(mode="generality", seed=0))
        assert len(train) + len(test) == len(ds)
        # each 10-member cell contributes exactly 2 test items, 5->1, 4->1, 20->4
        assert len(test) == 2 + 2 + 1 + 1 + 1 + 1 + 4

    def test_generality_disjoint_and_deterministic(self):
        ds = _mixed_dataset()
        plan = SplitPlan(mode="generality", seed=3)
        a_train, a_test = split_generality(ds, plan)
        b_train, b_test = split_generality(ds, plan)
        hashes = lambda d: [it.metadata.hash for it in d.items]
        assert hashes(a_train) == hashes(b_train)
        assert set(hashes(a_train)).isdisjoint(hashes(a_test))

    def test_generality_singleton_cell_goes_to_train(self):
        items = (make_item(0, "DT", "Stargate"), make_item(1, "NT"),
                 make_item(2, "NT"))
        ds = Dataset(items=items, source_manifest={})
        train, test = split_generality(ds, SplitPlan())
        train_labels = [it.label.value for it in train.items]
        assert "DT" in train_labels
        assert all(it.label.value == "NT" for it in test.items)

    def test_generalizability_bridge_partition(self):
        ds = _mixed_dataset()
        plan = SplitPlan(mode="generalizability",
                         train_bridges=("Stargate", "Multichain"))
        train, test = split_generalizability(ds, plan)
        train_bridges = {it.label.bridge for it in train.items
                         if it.label.bridge}
        test_bridges = {it.label.bridge for it in test.items
                        if it.label.bridge}
        assert train_bridges == {"Stargate", "Multichain"}
        assert test_bridges == {"Wormhole"}
        # NT split 80:20
        n_test_nt = sum(1 for it in test.items if it.label.value == "NT")
        assert n_test_nt == 4

    def test_bridge_overlap_rejected(self):
        with pytest.raises(BridgeOverlapError):
            split_generalizability(_mixed_dataset(), SplitPlan(
                mode="generalizability", train_bridges=("Stargate",),
                test_bridges=("Stargate", "Wormhole")))

    def test_split_dataset_dispatch(self):
        ds = _mixed_dataset()
        train, test = split_dataset(ds, SplitPlan(mode="generalizability",
                                                  train_bridges=("Stargate",)))
        assert len(train) + len(test) == len(ds)

    def test_bad_plan_mode(self):
        with pytest.raises(ConfigError):
            SplitPlan(mode="random")
        with pytest.raises(ConfigError):
            SplitPlan(test_fraction=1.5)

    def test_plan_roundtrip(self):
        plan = SplitPlan(mode="generalizability", seed=9,
                         train_bridges=("Stargate",))
        assert SplitPlan.from_dict(plan.to_dict()) == plan

    def test_default_train_bridges(self):
        assert DEFAULT_TRAIN_BRIDGES == ("Allbridge core", "Celer cbridge",
                                         "Multichain", "Stargate")


@pytest.fixture(scope="module")
def synth_dataset():
    return generate_synthetic(SynthConfig(n_per_class=45, seed=0))


class TestRunExperiment:
    def test_generality_report(self, synth_dataset):
        cfg = ExperimentConfig(
            feature_mode="fused",
            split=SplitPlan(mode="generality", seed=0),
            classifier=ClassifierSpec("random-forest", {"n_trees": 20}),
            seed=0)
        report = run_experiment(cfg, dataset=synth_dataset)
        assert isinstance(report, ExperimentReport)
        assert report.n_train + report.n_test == len(synth_dataset)
        assert report.metrics.accuracy >= 0.85
        assert report.per_bridge  # bridge breakdown is populated

    def test_report_determinism_excluding_timing(self, synth_dataset):
        cfg = ExperimentConfig(
            split=SplitPlan(mode="generality", seed=1),
            classifier=ClassifierSpec("decision-tree"), seed=1)
        a = run_experiment(cfg, dataset=synth_dataset)
        b = run_experiment(cfg, dataset=synth_dataset)
        assert a.to_json(include_timing=False) == b.to_json(include_timing=False)

    def test_csv_row_shape(self, synth_dataset):
        cfg = ExperimentConfig(split=SplitPlan(seed=2),
                               classifier=ClassifierSpec("decision-tree"))
        report = run_experiment(cfg, dataset=synth_dataset)
        header, row, _ = report.to_csv_row().split("\n")
        assert len(header.split(",")) == len(row.split(","))

    def test_config_roundtrip(self):
        cfg = ExperimentConfig(feature_mode="motif-only",
                               classifier=ClassifierSpec("linear-svm"), seed=5)
        assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg

    def test_missing_dataset_rejected(self):
        with pytest.raises(ConfigError):
            run_experiment(ExperimentConfig())
