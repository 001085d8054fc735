import json

import pytest

from xsema.errors import (ConflictingLabelError, DuplicateHashError,
                          MissingDefaultError, ParseError, RateLimitedError,
                          TraceUnsupportedError, TxNotFoundError, XsemaError)
from xsema.ingest import (Dataset, RpcProvider, RpcProviderConfig,
                          fetch_transaction_metadata, item_from_json,
                          item_to_json, load_labeled_jsonl, merge_label_file,
                          metadata_to_json, save_labeled_jsonl)

from conftest import make_hash, make_item, make_transfer


@pytest.fixture
def small_dataset():
    return Dataset(items=(make_item(1, "DT", "Stargate"),
                          make_item(2, "WT", "Wormhole"),
                          make_item(3, "NT")),
                   source_manifest={})


class TestJsonlRoundtrip:
    def test_save_load_identity(self, tmp_path, small_dataset):
        path = tmp_path / "ds.jsonl"
        save_labeled_jsonl(small_dataset, path)
        loaded = load_labeled_jsonl(path)
        assert loaded.items == small_dataset.items

    def test_item_json_roundtrip(self):
        item = make_item(4, "DT", "Multichain", et=[make_transfer(1, 2)])
        assert item_from_json(item_to_json(item)) == item

    def test_blank_lines_skipped(self, tmp_path, small_dataset):
        path = tmp_path / "ds.jsonl"
        save_labeled_jsonl(small_dataset, path)
        path.write_text(path.read_text().replace("\n", "\n\n"))
        assert len(load_labeled_jsonl(path)) == 3

    def test_parse_error_carries_line_number(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(json.dumps(item_to_json(make_item(1))) + "\n{broken\n")
        with pytest.raises(ParseError) as exc:
            load_labeled_jsonl(path)
        assert exc.value.line_number == 2

    def test_schema_violation_is_parse_error(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(json.dumps({"hash": make_hash(1)}) + "\n")
        with pytest.raises(ParseError):
            load_labeled_jsonl(path)

    def test_duplicate_hash_rejected(self, tmp_path):
        row = json.dumps(item_to_json(make_item(1)))
        path = tmp_path / "dup.jsonl"
        path.write_text(row + "\n" + row + "\n")
        with pytest.raises(DuplicateHashError):
            load_labeled_jsonl(path)


class TestMergeLabelFile:
    def _labels_csv(self, tmp_path, rows):
        path = tmp_path / "labels.csv"
        path.write_text("hash,label,bridge\n" +
                        "".join(",".join(r) + "\n" for r in rows))
        return path

    def test_relabels_matching_hashes(self, tmp_path, small_dataset):
        path = self._labels_csv(tmp_path, [
            (make_hash(1), "WT", "Stargate"),
            (make_hash(2), "WT", "Wormhole"),
            (make_hash(3), "NT", "")])
        merged = merge_label_file(small_dataset, path)
        assert merged.items[0].label.value == "WT"

    def test_missing_rows_require_default_flag(self, tmp_path, small_dataset):
        path = self._labels_csv(tmp_path, [(make_hash(1), "DT", "Stargate")])
        with pytest.raises(MissingDefaultError):
            merge_label_file(small_dataset, path)
        merged = merge_label_file(small_dataset, path, default_nt=True)
        assert merged.items[1].label.value == "NT"

    def test_conflicting_rows_rejected(self, tmp_path, small_dataset):
        path = self._labels_csv(tmp_path, [
            (make_hash(1), "DT", "Stargate"),
            (make_hash(1), "WT", "Stargate")])
        with pytest.raises(ConflictingLabelError):
            merge_label_file(small_dataset, path)

    def test_unmatched_rows_counted(self, tmp_path, small_dataset):
        path = self._labels_csv(tmp_path, [
            (make_hash(1), "DT", "Stargate"),
            (make_hash(2), "WT", "Wormhole"),
            (make_hash(3), "NT", ""),
            (make_hash(99), "DT", "Stargate")])
        merged = merge_label_file(small_dataset, path)
        assert merged.source_manifest["unmatched_label_rows"] == 1


class TestFixtureProvider:
    def test_fixture_fetch(self, tmp_path):
        meta = make_item(7, "NT").metadata
        (tmp_path / f"{meta.hash}.json").write_text(
            json.dumps(metadata_to_json(meta)))
        cfg = RpcProviderConfig(trace_strategy="fixture",
                                fixture_dir=str(tmp_path))
        fetched = fetch_transaction_metadata(cfg, meta.hash)
        assert fetched == meta

    def test_missing_fixture(self, tmp_path):
        cfg = RpcProviderConfig(trace_strategy="fixture",
                                fixture_dir=str(tmp_path))
        with pytest.raises(TxNotFoundError):
            fetch_transaction_metadata(cfg, make_hash(123))

    def test_fixture_dir_required(self):
        cfg = RpcProviderConfig(trace_strategy="fixture")
        with pytest.raises(XsemaError):
            RpcProvider(cfg).fetch(make_hash(1))

    def test_bad_strategy(self):
        with pytest.raises(XsemaError):
            RpcProviderConfig(trace_strategy="magic")


class _RpcResponse:
    def __init__(self, status_code, payload):
        self.status_code = status_code
        self._payload = payload

    def json(self):
        return self._payload


class _RpcSession:
    """Replays canned JSON-RPC results keyed by method name."""

    def __init__(self, results, statuses=None):
        self.results = results
        self.statuses = statuses or []
        self.calls = []

    def post(self, url, json=None, timeout=None):
        method = json["method"]
        self.calls.append(method)
        if self.statuses:
            status = self.statuses.pop(0)
            if status != 200:
                return _RpcResponse(status, {})
        result = self.results[method]
        if isinstance(result, dict) and "error" in result:
            return _RpcResponse(200, result)
        return _RpcResponse(200, {"jsonrpc": "2.0", "id": 1, "result": result})


TRANSFER_TOPIC = ("0xddf252ad1be2c89b69c2b068fc378daa"
                  "952ba7f163c4a11628f55a4df523b3ef")


def _live_results(tx_hash):
    a, b, c = ("0x" + format(i, "040x") for i in (0xa, 0xb, 0xc))
    return {
        "eth_getTransactionByHash": {
            "hash": tx_hash, "from": a, "to": b, "value": "0xde0b6b3a7640000",
            "chainId": "ethereum"},
        "eth_getTransactionReceipt": {
            "logs": [{"address": c,
                      "topics": [TRANSFER_TOPIC,
                                 "0x" + a[2:].rjust(64, "0"),
                                 "0x" + b[2:].rjust(64, "0")],
                      "data": "0x64"}]},
        "debug_traceTransaction": {
            "from": a, "to": b, "value": "0xde0b6b3a7640000",
            "calls": [{"from": b, "to": c, "value": "0x5", "calls": []}]},
    }


class TestLiveProvider:
    def _cfg(self):
        return RpcProviderConfig(endpoint_url="http://rpc",
                                 trace_strategy="debug-trace", max_retries=1)

    def test_live_fetch_builds_all_lists(self):
        tx_hash = make_hash(55)
        session = _RpcSession(_live_results(tx_hash))
        meta = RpcProvider(self._cfg(), session=session).fetch(tx_hash)
        assert len(meta.et) == 1 and meta.et[0].value == str(10 ** 18)
        assert len(meta.it) == 1 and meta.it[0].value == "5"
        assert len(meta.erc20) == 1 and meta.erc20[0].value == "100"
        assert meta.el[0].name == "Transfer"

    def test_top_trace_frame_not_duplicated(self):
        tx_hash = make_hash(56)
        session = _RpcSession(_live_results(tx_hash))
        meta = RpcProvider(self._cfg(), session=session).fetch(tx_hash)
        assert all(rec.value != str(10 ** 18) for rec in meta.it)

    def test_unknown_tx(self):
        session = _RpcSession({"eth_getTransactionByHash": None})
        with pytest.raises(TxNotFoundError):
            RpcProvider(self._cfg(), session=session).fetch(make_hash(57))

    def test_rate_limit_retries_then_raises(self):
        tx_hash = make_hash(58)
        session = _RpcSession(_live_results(tx_hash), statuses=[429, 429])
        with pytest.raises(RateLimitedError):
            RpcProvider(self._cfg(), session=session).fetch(tx_hash)

    def test_retry_then_success(self):
        tx_hash = make_hash(59)
        session = _RpcSession(_live_results(tx_hash),
                              statuses=[429, 200, 200, 200])
        meta = RpcProvider(self._cfg(), session=session).fetch(tx_hash)
        assert meta.hash == tx_hash

    def test_trace_unsupported(self):
        tx_hash = make_hash(60)
        results = _live_results(tx_hash)
        results["debug_traceTransaction"] = {
            "error": {"code": -32601, "message": "method not supported"}}
        session = _RpcSession(results)
        with pytest.raises(TraceUnsupportedError):
            RpcProvider(self._cfg(), session=session).fetch(tx_hash)

    def test_unknown_event_gets_placeholder_name(self):
        tx_hash = make_hash(61)
        results = _live_results(tx_hash)
        results["eth_getTransactionReceipt"] = {
            "logs": [{"address": "0x" + "c" * 40,
                      "topics": ["0x" + "ab" * 32], "data": "0x"}]}
        session = _RpcSession(results)
        meta = RpcProvider(self._cfg(), session=session).fetch(tx_hash)
        assert meta.el[0].name.startswith("Event_")
