"""Dataset loading and transaction metadata retrieval.

Datasets are JSONL, one labeled transaction per line. Metadata retrieval
goes through a provider abstraction: live JSON-RPC (transaction, receipt,
and a configurable trace call) or a fixture directory keyed "<hash>.json"
holding wire-schema records, so tests run entirely offline.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import requests

from .core import (EventLogEntry, Label, LabeledTransaction,
                   TransactionMetadata, TransferEdgeRecord, normalize_tx_hash,
                   validate_metadata)
from .errors import (ConflictingLabelError, DatasetError, DuplicateHashError,
                     MetadataValidationError, MissingDefaultError, NetworkError,
                     ParseError, RateLimitedError, TraceUnsupportedError,
                     TxNotFoundError, XsemaError)

TRACE_STRATEGIES = ("debug-trace", "indexer-api", "fixture")


@dataclass(frozen=True)
class Dataset:
    items: Tuple[LabeledTransaction, ...]
    source_manifest: Dict[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.items)

    def bridges(self) -> List[str]:
        names = {it.label.bridge for it in self.items if it.label.bridge}
        return sorted(names)


@dataclass(frozen=True)
class RpcProviderConfig:
    endpoint_url: str = ""
    trace_strategy: str = "fixture"
    fixture_dir: Optional[str] = None
    timeout: float = 30.0
    max_retries: int = 2

    def __post_init__(self):
        if self.trace_strategy not in TRACE_STRATEGIES:
            raise XsemaError(f"unknown trace strategy {self.trace_strategy!r}")
        if self.timeout <= 0:
            raise XsemaError("timeout must be > 0")
        if self.max_retries < 0:
            raise XsemaError("max_retries must be >= 0")


# --- wire schema <-> domain types ---

def transfer_from_json(obj: dict, kind: str) -> TransferEdgeRecord:
    return TransferEdgeRecord(
        from_addr=obj["from"], to_addr=obj["to"], value=obj["value"],
        kind=kind, token=obj.get("token"),
        from_alias=obj.get("from_alias"), to_alias=obj.get("to_alias"))


def transfer_to_json(rec: TransferEdgeRecord) -> dict:
    out = {"from": rec.from_addr, "to": rec.to_addr, "value": rec.value,
           "token": rec.token}
    if rec.from_alias:
        out["from_alias"] = rec.from_alias
    if rec.to_alias:
        out["to_alias"] = rec.to_alias
    return out


def metadata_from_json(obj: dict) -> TransactionMetadata:
    for key in ("hash", "chain"):
        if key not in obj:
            raise MetadataValidationError(f"field-missing: {key}")
    kinds = (("et", "external"), ("it", "internal"),
             ("erc20", "erc20"), ("erc721", "erc721"))
    lists = {attr: tuple(transfer_from_json(t, kind)
                         for t in obj.get(attr, []))
             for attr, kind in kinds}
    el = tuple(EventLogEntry(name=e["name"],
                             params=tuple(tuple(p) for p in e.get("params", [])),
                             contract=e.get("contract"))
               for e in obj.get("el", []))
    meta = TransactionMetadata(hash=obj["hash"], chain=obj["chain"],
                               el=el, **lists)
    return validate_metadata(meta)


def metadata_to_json(m: TransactionMetadata) -> dict:
    return {
        "hash": m.hash,
        "chain": m.chain,
        "et": [transfer_to_json(t) for t in m.et],
        "it": [transfer_to_json(t) for t in m.it],
        "erc20": [transfer_to_json(t) for t in m.erc20],
        "erc721": [transfer_to_json(t) for t in m.erc721],
        "el": [{"name": e.name, "params": [list(p) for p in e.params]}
               for e in m.el],
    }


def item_from_json(obj: dict) -> LabeledTransaction:
    if "label" not in obj:
        raise MetadataValidationError("field-missing: label")
    label = Label(value=obj["label"], bridge=obj.get("bridge"))
    return LabeledTransaction(metadata=metadata_from_json(obj), label=label)


def item_to_json(item: LabeledTransaction) -> dict:
    out = metadata_to_json(item.metadata)
    out["label"] = item.label.value
    out["bridge"] = item.label.bridge
    return out


# --- JSONL dataset I/O ---

def load_labeled_jsonl(path) -> Dataset:
    """Load and validate a JSONL dataset; rejects duplicate hashes."""
    path = Path(path)
    try:
        raw = path.read_text()
    except OSError as exc:
        raise DatasetError(f"io-error reading {path}: {exc}") from exc
    items: List[LabeledTransaction] = []
    seen = set()
    for line_no, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(line_no, str(exc)) from exc
        try:
            item = item_from_json(obj)
        except (MetadataValidationError, KeyError, TypeError) as exc:
            raise ParseError(line_no, f"schema-violation: {exc}") from exc
        if item.metadata.hash in seen:
            raise DuplicateHashError(item.metadata.hash)
        seen.add(item.metadata.hash)
        items.append(item)
    return Dataset(items=tuple(items),
                   source_manifest={str(path): len(items)})


def save_labeled_jsonl(ds: Dataset, path) -> None:
    path = Path(path)
    with path.open("w") as fh:
        for item in ds.items:
            fh.write(json.dumps(item_to_json(item), sort_keys=True) + "\n")


def merge_label_file(ds: Dataset, labels_path, default_nt: bool = False) -> Dataset:
    """Relabel dataset items from a "hash,label,bridge" CSV.

    Unlabeled items keep their position but default to NT only when
    default_nt is set; unlabeled traffic is not NT in general, so silent
    defaulting is never done.
    """
    label_map: Dict[str, Label] = {}
    with open(labels_path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            tx_hash = normalize_tx_hash(row["hash"])
            bridge = row.get("bridge") or None
            label = Label(value=row["label"], bridge=bridge)
            if tx_hash in label_map and label_map[tx_hash] != label:
                raise ConflictingLabelError(tx_hash)
            label_map[tx_hash] = label
    items = []
    unmatched = dict(label_map)
    unlabeled = []
    for item in ds.items:
        tx_hash = item.metadata.hash
        if tx_hash in label_map:
            items.append(replace(item, label=label_map[tx_hash]))
            unmatched.pop(tx_hash, None)
        elif default_nt:
            items.append(replace(item, label=Label("NT")))
        else:
            unlabeled.append(tx_hash)
            items.append(item)
    if unlabeled and not default_nt:
        raise MissingDefaultError(
            f"{len(unlabeled)} items without label rows and no default-NT flag")
    merged = Dataset(items=tuple(items), source_manifest=dict(ds.source_manifest))
    if unmatched:
        merged = replace(merged, source_manifest={
            **merged.source_manifest,
            "unmatched_label_rows": len(unmatched)})
    return merged


# --- metadata retrieval ---

class RpcProvider:
    """Fetch transaction metadata over JSON-RPC, or replay fixtures.

    Shareable across workers: retry state is per-request, fixture reads are
    read-only.
    """

    # minimal builtin topic0 -> (name, params) table for live-mode decoding
    KNOWN_EVENTS = {
        "0xddf252ad1be2c89b69c2b068fc378daa952ba7f163c4a11628f55a4df523b3ef":
            ("Transfer", (("address", "from"), ("address", "to"),
                          ("uint256", "value"))),
        "0x8c5be1e5ebec7d5bd14f71427d1e84f3dd0314c0f7b2291e5b200ac8c7c3b925":
            ("Approval", (("address", "owner"), ("address", "spender"),
                          ("uint256", "value"))),
        "0xe1fffcc4923d04b559f4d29a8bfc6cda04eb5b0d3c460751c2402c5c5cc9109c":
            ("Deposit", (("address", "dst"), ("uint256", "wad"))),
        "0x7fcf532c15f0a6db0bd6d0e038bea71d30d808c7d98cb3bf7268a95bf5081b65":
            ("Withdrawal", (("address", "src"), ("uint256", "wad"))),
    }

    def __init__(self, cfg: RpcProviderConfig, session=None,
                 event_signatures: Optional[dict] = None):
        self.cfg = cfg
        self._session = session or requests.Session()
        self._signatures = dict(self.KNOWN_EVENTS)
        if event_signatures:
            self._signatures.update(event_signatures)

    def fetch(self, tx_hash: str) -> TransactionMetadata:
        tx_hash = normalize_tx_hash(tx_hash)
        if self.cfg.trace_strategy == "fixture":
            return self._fetch_fixture(tx_hash)
        return self._fetch_live(tx_hash)

    # fixture mode: "<hash>.json" files, bit-identical to the wire schema
    def _fetch_fixture(self, tx_hash: str) -> TransactionMetadata:
        if not self.cfg.fixture_dir:
            raise XsemaError("fixture mode requires fixture_dir")
        path = Path(self.cfg.fixture_dir) / f"{tx_hash}.json"
        if not path.exists():
            raise TxNotFoundError(tx_hash)
        return metadata_from_json(json.loads(path.read_text()))

    def _rpc(self, method: str, params: list):
        payload = {"jsonrpc": "2.0", "id": 1, "method": method,
                   "params": params}
        last_exc = None
        for _ in range(self.cfg.max_retries + 1):
            try:
                resp = self._session.post(self.cfg.endpoint_url, json=payload,
                                          timeout=self.cfg.timeout)
            except requests.RequestException as exc:
                last_exc = NetworkError(str(exc))
                continue
            if resp.status_code == 429:
                last_exc = RateLimitedError("rate limited")
                continue
            if resp.status_code != 200:
                last_exc = NetworkError(f"http {resp.status_code}")
                continue
            body = resp.json()
            if "error" in body:
                err = body["error"]
                if "not supported" in str(err.get("message", "")).lower():
                    raise TraceUnsupportedError(str(err))
                raise NetworkError(f"rpc error: {err}")
            return body.get("result")
        raise last_exc

    def _decode_log(self, log: dict) -> EventLogEntry:
        topics = log.get("topics") or []
        topic0 = topics[0].lower() if topics else ""
        if topic0 in self._signatures:
            name, params = self._signatures[topic0]
            return EventLogEntry(name=name, params=tuple(params),
                                 contract=log.get("address"))
        return EventLogEntry(name=f"Event_{topic0[2:10]}" if topic0 else "Event",
                             contract=log.get("address"))

    def _fetch_live(self, tx_hash: str) -> TransactionMetadata:
        tx = self._rpc("eth_getTransactionByHash", [tx_hash])
        if tx is None:
            raise TxNotFoundError(tx_hash)
        receipt = self._rpc("eth_getTransactionReceipt", [tx_hash]) or {}
        et = []
        if tx.get("to"):
            et.append(TransferEdgeRecord(
                from_addr=tx["from"], to_addr=tx["to"],
                value=str(int(tx.get("value", "0x0"), 16)), kind="external"))
        it = self._trace_internal(tx_hash)
        erc20, erc721 = [], []
        events = []
        transfer_topic = ("0xddf252ad1be2c89b69c2b068fc378daa"
                          "952ba7f163c4a11628f55a4df523b3ef")
        for log in receipt.get("logs", []):
            events.append(self._decode_log(log))
            topics = [t.lower() for t in (log.get("topics") or [])]
            if topics and topics[0] == transfer_topic and len(topics) >= 3:
                rec = TransferEdgeRecord(
                    from_addr="0x" + topics[1][-40:],
                    to_addr="0x" + topics[2][-40:],
                    value=str(int(log.get("data") or "0x0", 16))
                    if len(topics) == 3 else str(int(topics[3], 16)),
                    kind="erc20" if len(topics) == 3 else "erc721",
                    token=log.get("address"))
                (erc20 if len(topics) == 3 else erc721).append(rec)
        meta = TransactionMetadata(
            hash=tx_hash, chain=tx.get("chainId", "ethereum"),
            et=tuple(et), it=tuple(it),
            erc20=tuple(erc20), erc721=tuple(erc721), el=tuple(events))
        return validate_metadata(meta)

    def _trace_internal(self, tx_hash: str) -> List[TransferEdgeRecord]:
        if self.cfg.trace_strategy != "debug-trace":
            return []
        trace = self._rpc("debug_traceTransaction",
                          [tx_hash, {"tracer": "callTracer"}])
        records: List[TransferEdgeRecord] = []

        def walk(frame, top=True):
            if not isinstance(frame, dict):
                return
            value = int(frame.get("value", "0x0") or "0x0", 16)
            # the top frame duplicates the external transfer
            if not top and value > 0 and frame.get("from") and frame.get("to"):
                records.append(TransferEdgeRecord(
                    from_addr=frame["from"], to_addr=frame["to"],
                    value=str(value), kind="internal"))
            for call in frame.get("calls", []) or []:
                walk(call, top=False)

        walk(trace or {})
        return records


def fetch_transaction_metadata(cfg: RpcProviderConfig,
                               tx_hash: str) -> TransactionMetadata:
    return RpcProvider(cfg).fetch(tx_hash)
