import pytest

# one "[PASS]/[FAIL] <criterion>" line per acceptance criterion, echoed in
# the terminal summary where pytest's output capture cannot swallow them
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)

from xsema.core import (EventLogEntry, Label, LabeledTransaction,
                        TransactionMetadata, TransferEdgeRecord,
                        validate_metadata)


def make_address(i: int) -> str:
    return "0x" + format(i, "040x")


def make_hash(i: int) -> str:
    return "0x" + format(i, "064x")


def make_transfer(u: int, v: int, kind: str = "external",
                  value: str = "1000") -> TransferEdgeRecord:
    token = make_address(900 + u) if kind in ("erc20", "erc721") else None
    return TransferEdgeRecord(from_addr=make_address(u), to_addr=make_address(v),
                              value=value, kind=kind, token=token)


def make_metadata(i: int, et=(), it=(), erc20=(), erc721=(), el=()):
    return validate_metadata(TransactionMetadata(
        hash=make_hash(i), chain="ethereum", et=tuple(et), it=tuple(it),
        erc20=tuple(erc20), erc721=tuple(erc721), el=tuple(el)))


def make_item(i: int, label="NT", bridge=None, **kwargs):
    return LabeledTransaction(metadata=make_metadata(i, **kwargs),
                              label=Label(label, bridge=bridge))


@pytest.fixture
def deposit_metadata():
    """A deposit-shaped transaction: external + internal transfer path,
    two bridge events."""
    return make_metadata(
        1,
        et=[make_transfer(1, 2, "external", "500000000000000000")],
        it=[make_transfer(2, 3, "internal", "500000000000000000")],
        el=[EventLogEntry("Deposit", (("address", "sender"),
                                      ("uint256", "amount"))),
            EventLogEntry("FundsDeposited", (("uint256", "amount"),
                                             ("uint256", "toChainId")))])
