"""Canonical domain types: transactions, transfers, event logs, labels.

All types are immutable after validation and safe to share across threads.
Token values stay decimal strings end to end; amounts routinely exceed 64-bit
integers and classification never looks at magnitudes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Optional

from .errors import MalformedAddressError, MetadataValidationError

TRANSFER_KINDS = ("external", "internal", "erc20", "erc721")
CLASSES = ("NT", "DT", "WT")

_HEX_ADDR_RE = re.compile(r"^0x[0-9a-fA-F]{40}$")
_HASH_RE = re.compile(r"^0x[0-9a-fA-F]{64}$")
_VALUE_RE = re.compile(r"^\d+(\.\d+)?$")


def normalize_address(raw: str) -> str:
    """Canonicalize a 0x-prefixed 40-hex-digit address to lowercase.

    Idempotent; raises MalformedAddressError on anything else.
    """
    if not isinstance(raw, str) or not _HEX_ADDR_RE.match(raw):
        raise MalformedAddressError(f"malformed address: {raw!r}")
    return raw.lower()


def normalize_tx_hash(raw: str) -> str:
    if not isinstance(raw, str) or not _HASH_RE.match(raw):
        raise MalformedAddressError(f"malformed transaction hash: {raw!r}")
    return raw.lower()


@dataclass(frozen=True)
class TransferEdgeRecord:
    """One asset movement: external, internal, ERC-20, or ERC-721."""

    from_addr: str
    to_addr: str
    value: str
    kind: str
    token: Optional[str] = None
    # display aliases (ENS-style names) are annotations only; identity is hex
    from_alias: Optional[str] = None
    to_alias: Optional[str] = None


@dataclass(frozen=True)
class EventLogEntry:
    """A decoded event: title plus ordered (param_type, param_name) pairs."""

    name: str
    params: tuple = ()
    contract: Optional[str] = None


@dataclass(frozen=True)
class TransactionMetadata:
    """Per-transaction record: four transfer lists plus event logs."""

    hash: str
    chain: str
    et: tuple = ()
    it: tuple = ()
    erc20: tuple = ()
    erc721: tuple = ()
    el: tuple = ()

    def transfer_lists(self):
        return (("external", self.et), ("internal", self.it),
                ("erc20", self.erc20), ("erc721", self.erc721))


@dataclass(frozen=True)
class Label:
    value: str
    bridge: Optional[str] = None

    def __post_init__(self):
        if self.value not in CLASSES:
            raise MetadataValidationError(f"unknown label {self.value!r}")
        if self.value == "NT" and self.bridge is not None:
            raise MetadataValidationError("NT labels carry no bridge name")
        if self.value != "NT" and not self.bridge:
            raise MetadataValidationError(
                f"{self.value} label requires a bridge name")


@dataclass(frozen=True)
class LabeledTransaction:
    metadata: TransactionMetadata
    label: Label


def _validate_transfer(rec: TransferEdgeRecord, expected_kind: str) -> TransferEdgeRecord:
    if rec.kind not in TRANSFER_KINDS:
        raise MetadataValidationError(f"unknown transfer kind {rec.kind!r}")
    if rec.kind != expected_kind:
        raise MetadataValidationError(
            f"kind-mismatch: record tagged {rec.kind!r} in {expected_kind!r} list")
    if not isinstance(rec.value, str) or not _VALUE_RE.match(rec.value):
        raise MetadataValidationError(f"malformed-value: {rec.value!r}")
    token = rec.token
    if rec.kind in ("erc20", "erc721") and token is not None:
        token = normalize_address(token)
    return replace(
        rec,
        from_addr=normalize_address(rec.from_addr),
        to_addr=normalize_address(rec.to_addr),
        token=token,
    )


def validate_metadata(m: TransactionMetadata) -> TransactionMetadata:
    """Canonicalize all addresses and check kind/list consistency.

    Never drops records: output list lengths equal input list lengths.
    """
    if not m.hash:
        raise MetadataValidationError("field-missing: hash")
    if not m.chain:
        raise MetadataValidationError("field-missing: chain")
    tx_hash = normalize_tx_hash(m.hash)
    lists = {}
    for attr, expected in (("et", "external"), ("it", "internal"),
                           ("erc20", "erc20"), ("erc721", "erc721")):
        lists[attr] = tuple(_validate_transfer(r, expected) for r in getattr(m, attr))
    for ev in m.el:
        if not ev.name:
            raise MetadataValidationError("field-missing: event name")
    el = tuple(
        replace(ev, params=tuple(tuple(p) for p in ev.params),
                contract=normalize_address(ev.contract) if ev.contract else None)
        for ev in m.el
    )
    return TransactionMetadata(hash=tx_hash, chain=m.chain, el=el, **lists)
