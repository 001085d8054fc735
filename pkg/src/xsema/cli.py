"""Command-line entry point.

Exit codes: 0 success, 1 usage error (usage text on stderr), 2 runtime
error (message names the failing component). Outputs are machine-readable
JSON/CSV; a short human summary goes to stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analyze import (export_motif_profile_csv, export_term_profile_json,
                      motif_profile, term_profile)
from .errors import XsemaError
from .evaluation import ExperimentConfig, run_experiment
from .eventtext import build_event_text
from .graph import build_asset_graph
from .ingest import (RpcProvider, RpcProviderConfig, load_labeled_jsonl,
                     merge_label_file, metadata_to_json, save_labeled_jsonl)
from .motif import census_fast, default_catalog, export_feature_rows
from .pipeline import XSemaModel, load_model, provider_from_descriptor, save_model
from .synth import SynthConfig, generate_synthetic


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage problems; the CLI contract wants 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="xsema",
                     description="Cross-chain transaction semantic extraction")
    parser.add_argument("--log-level", default="info",
                        choices=["debug", "info", "warning", "error"])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[], help="validate a dataset, optionally merge labels")
    p.add_argument("--input", required=True)
    p.add_argument("--labels")
    p.add_argument("--default-nt", action="store_true")
    p.add_argument("--output", required=True)

    p = sub.add_parser("fetch", help="fetch metadata for a file of tx hashes")
    p.add_argument("--hashes", required=True)
    p.add_argument("--fixtures")
    p.add_argument("--endpoint", default="")
    p.add_argument("--trace-strategy", default="fixture",
                   choices=["debug-trace", "indexer-api", "fixture"])
    p.add_argument("--output", required=True)

    p = sub.add_parser("synth", help="generate a synthetic labeled dataset")
    p.add_argument("--n", type=int, required=True, help="items per class")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bridges", nargs="*")
    p.add_argument("--output", required=True)

    p = sub.add_parser("featurize", help="export motif feature CSV (and texts)")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--text-output")

    p = sub.add_parser("train", help="train a model, write a bundle file")
    p.add_argument("--input", required=True)
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--output", required=True)

    p = sub.add_parser("evaluate", help="run a split/train/test experiment")
    p.add_argument("--input")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--output")
    p.add_argument("--csv")

    p = sub.add_parser("predict", help="label a dataset with a saved bundle")
    p.add_argument("--bundle", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)

    p = sub.add_parser("analyze", help="export motif and term profiles")
    p.add_argument("--input", required=True)
    p.add_argument("--motif-output", required=True)
    p.add_argument("--term-output", required=True)
    return parser


def _load_config(path, seed_override):
    data = {}
    if path:
        data = json.loads(Path(path).read_text())
    if seed_override is not None:
        data["seed"] = seed_override
        data.setdefault("split", {})["seed"] = seed_override
    return ExperimentConfig.from_dict(data)


def _cmd_ingest(args) -> int:
    ds = load_labeled_jsonl(args.input)
    if args.labels:
        ds = merge_label_file(ds, args.labels, default_nt=args.default_nt)
    save_labeled_jsonl(ds, args.output)
    print(f"ingest: wrote {len(ds)} items to {args.output}")
    return 0


def _cmd_fetch(args) -> int:
    cfg = RpcProviderConfig(endpoint_url=args.endpoint,
                            trace_strategy=args.trace_strategy,
                            fixture_dir=args.fixtures)
    provider = RpcProvider(cfg)
    hashes = [line.strip() for line in Path(args.hashes).read_text().splitlines()
              if line.strip()]
    with open(args.output, "w") as fh:
        for tx_hash in hashes:
            meta = provider.fetch(tx_hash)
            fh.write(json.dumps(metadata_to_json(meta), sort_keys=True) + "\n")
    print(f"fetch: wrote {len(hashes)} records to {args.output}")
    return 0


def _cmd_synth(args) -> int:
    cfg = SynthConfig(n_per_class=args.n, noise_rate=args.noise,
                      seed=args.seed,
                      **({"bridge_names": tuple(args.bridges)}
                         if args.bridges else {}))
    ds = generate_synthetic(cfg)
    save_labeled_jsonl(ds, args.output)
    print(f"synth: wrote {len(ds)} items to {args.output}")
    return 0


def _cmd_featurize(args) -> int:
    ds = load_labeled_jsonl(args.input)
    catalog = default_catalog()
    rows = []
    texts = []
    for item in ds.items:
        counts = census_fast(build_asset_graph(item.metadata), catalog)
        rows.append((item.metadata.hash, item.label.value, counts))
        texts.append((item.metadata.hash, build_event_text(item.metadata).text))
    Path(args.output).write_text(export_feature_rows(rows))
    if args.text_output:
        from .eventtext import export_text_rows
        Path(args.text_output).write_text(export_text_rows(texts))
    print(f"featurize: wrote {len(rows)} rows to {args.output}")
    return 0


def _cmd_train(args) -> int:
    cfg = _load_config(args.config, args.seed)
    ds = load_labeled_jsonl(args.input)
    model = XSemaModel(feature_mode=cfg.feature_mode,
                       classifier_spec=cfg.classifier,
                       provider=provider_from_descriptor(dict(cfg.provider)),
                       seed=cfg.seed)
    model.fit(ds.items)
    save_model(model, args.output)
    print(f"train: wrote bundle to {args.output}")
    return 0


def _cmd_evaluate(args) -> int:
    cfg = _load_config(args.config, args.seed)
    if args.input:
        cfg = ExperimentConfig.from_dict({**cfg.to_dict(),
                                          "dataset_path": args.input})
    report = run_experiment(cfg)
    if args.output:
        Path(args.output).write_text(report.to_json())
    if args.csv:
        Path(args.csv).write_text(report.to_csv_row())
    m = report.metrics
    print(f"evaluate: accuracy={m.accuracy:.4f} f1_macro={m.f1_macro:.4f} "
          f"(n_train={report.n_train}, n_test={report.n_test})")
    return 0


def _cmd_predict(args) -> int:
    model = load_model(args.bundle)
    ds = load_labeled_jsonl(args.input)
    labels = model.predict([it.metadata for it in ds.items])
    with open(args.output, "w") as fh:
        fh.write("hash,predicted\n")
        for item, label in zip(ds.items, labels):
            fh.write(f"{item.metadata.hash},{label}\n")
    print(f"predict: wrote {len(labels)} predictions to {args.output}")
    return 0


def _cmd_analyze(args) -> int:
    ds = load_labeled_jsonl(args.input)
    catalog = default_catalog()
    features = [(census_fast(build_asset_graph(it.metadata), catalog),
                 it.label.value) for it in ds.items]
    Path(args.motif_output).write_text(
        export_motif_profile_csv(motif_profile(features)))
    Path(args.term_output).write_text(
        export_term_profile_json(term_profile(ds)))
    print(f"analyze: wrote {args.motif_output} and {args.term_output}")
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "fetch": _cmd_fetch,
    "synth": _cmd_synth,
    "featurize": _cmd_featurize,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "predict": _cmd_predict,
    "analyze": _cmd_analyze,
}


def run_cli(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except XsemaError as exc:
        print(f"xsema {args.command}: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"xsema {args.command}: io-error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
