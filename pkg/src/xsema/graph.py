"""Per-transaction asset transfer graph.

Senders and receivers become nodes, transfers become directed edges. The
graph is a simple digraph: parallel transfers collapse into one edge with
multiple annotations, self-transfers are kept as annotations but produce no
edge (the motif catalog is defined over simple directed patterns).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .core import TransactionMetadata


@dataclass(frozen=True)
class AssetTransferGraph:
    nodes: Tuple[str, ...]                       # first-appearance order
    edges: frozenset                             # {(from_index, to_index)}
    edge_annotations: Dict[Tuple[int, int], List[Tuple[str, str, object]]] = field(
        default_factory=dict)
    self_annotations: Dict[int, List[Tuple[str, str, object]]] = field(
        default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)


def build_asset_graph(m: TransactionMetadata) -> AssetTransferGraph:
    """Build the simple directed transfer graph for one transaction.

    Node order is deterministic: first appearance scanning et, it, erc20,
    erc721 in that sequence, from before to within a record.
    """
    index: Dict[str, int] = {}
    nodes: List[str] = []

    def node_id(addr: str) -> int:
        if addr not in index:
            index[addr] = len(nodes)
            nodes.append(addr)
        return index[addr]

    edges = set()
    edge_annotations: Dict[Tuple[int, int], list] = {}
    self_annotations: Dict[int, list] = {}
    for kind, records in m.transfer_lists():
        for rec in records:
            u = node_id(rec.from_addr)
            v = node_id(rec.to_addr)
            ann = (kind, rec.value, rec.token)
            if u == v:
                self_annotations.setdefault(u, []).append(ann)
                continue
            edges.add((u, v))
            edge_annotations.setdefault((u, v), []).append(ann)
    return AssetTransferGraph(
        nodes=tuple(nodes),
        edges=frozenset(edges),
        edge_annotations=edge_annotations,
        self_annotations=self_annotations,
    )


def export_edge_list(g: AssetTransferGraph) -> str:
    """Debug export: one "from_hex to_hex kind value" line per annotation."""
    lines = []
    for (u, v) in sorted(g.edges):
        for kind, value, _token in g.edge_annotations[(u, v)]:
            lines.append(f"{g.nodes[u]} {g.nodes[v]} {kind} {value}")
    return "\n".join(lines)
