"""16-slot directed motif census over asset transfer graphs.

Slots 1-2 are the two-node patterns, slots 3-15 the thirteen weakly
connected three-node directed patterns in the usual higher-order-organization
ordering, and slot 16 a four-node bi-fan. Counting is induced: each node
subset contributes to at most one slot of its size, so per-subset dyad
states (one-way, mutual, absent) fully determine the match.

Two implementations share the contract: a permutation-based brute force
(the oracle) and a closed-form adjacency-matrix path normalized by pattern
automorphism counts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import GraphTooLargeError, UnsupportedCatalogError
from .graph import AssetTransferGraph

DEFAULT_CATALOG_VERSION = "xsema-v1"
DEFAULT_NODE_CAP = 512


@dataclass(frozen=True)
class MotifPattern:
    name: str
    node_count: int
    edges: Tuple[Tuple[int, int], ...]


@dataclass(frozen=True)
class MotifCatalog:
    slots: Tuple[MotifPattern, ...]
    catalog_version: str

    def __len__(self) -> int:
        return len(self.slots)


# Slot layout (1-based): 1-2 two-node, 3-15 triads, 16 bi-fan.
_XSEMA_V1_PATTERNS = (
    MotifPattern("one-way-pair", 2, ((0, 1),)),
    MotifPattern("mutual-pair", 2, ((0, 1), (1, 0))),
    MotifPattern("three-cycle", 3, ((0, 1), (1, 2), (2, 0))),
    MotifPattern("cycle-with-mutual", 3, ((0, 1), (1, 0), (1, 2), (2, 0))),
    MotifPattern("two-mutual-plus-arc", 3,
                 ((0, 1), (1, 0), (1, 2), (2, 1), (2, 0))),
    MotifPattern("complete-mutual-triad", 3,
                 ((0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0))),
    MotifPattern("feed-forward", 3, ((0, 1), (0, 2), (1, 2))),
    MotifPattern("fan-into-mutual", 3, ((0, 1), (1, 0), (2, 0), (2, 1))),
    MotifPattern("fan-out-of-mutual", 3, ((0, 1), (1, 0), (0, 2), (1, 2))),
    MotifPattern("out-fan", 3, ((0, 1), (0, 2))),
    MotifPattern("two-path", 3, ((0, 1), (1, 2))),
    MotifPattern("in-fan", 3, ((1, 0), (2, 0))),
    MotifPattern("mutual-with-out-arc", 3, ((0, 1), (1, 0), (0, 2))),
    MotifPattern("mutual-with-in-arc", 3, ((0, 1), (1, 0), (2, 0))),
    MotifPattern("mutual-wedge", 3, ((0, 1), (1, 0), (0, 2), (2, 0))),
    MotifPattern("bi-fan", 4, ((0, 2), (0, 3), (1, 2), (1, 3))),
)


def default_catalog() -> MotifCatalog:
    """The fixed 16-slot catalog, version "xsema-v1"."""
    return MotifCatalog(slots=_XSEMA_V1_PATTERNS,
                        catalog_version=DEFAULT_CATALOG_VERSION)


def _adjacency(g: AssetTransferGraph) -> np.ndarray:
    n = g.n_nodes
    a = np.zeros((n, n), dtype=np.int64)
    for (u, v) in g.edges:
        a[u, v] = 1
    return a


def _pattern_matrix(p: MotifPattern) -> np.ndarray:
    a = np.zeros((p.node_count, p.node_count), dtype=np.int64)
    for (u, v) in p.edges:
        a[u, v] = 1
    return a


def _is_weakly_connected(sym: np.ndarray) -> bool:
    # sym: symmetrized adjacency of the induced subgraph
    n = sym.shape[0]
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        u = stack.pop()
        for v in np.flatnonzero(sym[u]):
            if not seen[v]:
                seen[v] = True
                stack.append(v)
    return bool(seen.all())


def isomorphic(a: np.ndarray, b: np.ndarray) -> bool:
    """Exact digraph isomorphism by permutation search (tiny graphs only)."""
    n = a.shape[0]
    if b.shape[0] != n or a.sum() != b.sum():
        return False
    idx = np.arange(n)
    for perm in itertools.permutations(range(n)):
        p = np.array(perm)
        if np.array_equal(a[np.ix_(p, p)], b[np.ix_(idx, idx)]):
            return True
    return False


def automorphism_count(p: MotifPattern) -> int:
    a = _pattern_matrix(p)
    count = 0
    for perm in itertools.permutations(range(p.node_count)):
        q = np.array(perm)
        if np.array_equal(a[np.ix_(q, q)], a):
            count += 1
    return count


def census_bruteforce(g: AssetTransferGraph, catalog: MotifCatalog | None = None,
                      node_cap: int = DEFAULT_NODE_CAP) -> np.ndarray:
    """Reference census: enumerate node subsets, match induced subgraphs.

    Each weakly connected k-subset is counted at most once per slot.
    Node-order independent by construction.
    """
    catalog = catalog or default_catalog()
    if g.n_nodes > node_cap:
        raise GraphTooLargeError(g.n_nodes, node_cap)
    a = _adjacency(g)
    sizes = sorted({p.node_count for p in catalog.slots})
    counts = np.zeros(len(catalog), dtype=np.int64)
    patterns = [(_pattern_matrix(p), i) for i, p in enumerate(catalog.slots)]
    for k in sizes:
        k_patterns = [(pm, i) for pm, i in patterns
                      if catalog.slots[i].node_count == k]
        for subset in itertools.combinations(range(g.n_nodes), k):
            sub = a[np.ix_(subset, subset)]
            if not _is_weakly_connected(sub | sub.T):
                continue
            for pm, i in k_patterns:
                if isomorphic(sub, pm):
                    counts[i] += 1
                    break
    return counts


def census_fast(g: AssetTransferGraph, catalog: MotifCatalog | None = None,
                node_cap: int = DEFAULT_NODE_CAP) -> np.ndarray:
    """Matrix-formula census; identical output to census_bruteforce.

    Decomposes adjacency A into the mutual part B and one-way part U; every
    dyad of a pattern is then pinned by the matrix used (B, U, U^T, or the
    no-edge indicator), so each closed form counts induced occurrences.
    Ordered-triple sums are normalized by the pattern automorphism count.
    """
    catalog = catalog or default_catalog()
    if catalog.catalog_version != DEFAULT_CATALOG_VERSION:
        raise UnsupportedCatalogError(catalog.catalog_version)
    if g.n_nodes > node_cap:
        raise GraphTooLargeError(g.n_nodes, node_cap)
    n = g.n_nodes
    counts = np.zeros(16, dtype=np.int64)
    if n == 0:
        return counts
    a = _adjacency(g)
    b = a & a.T
    u = a - b
    ut = u.T
    no_edge = (1 - a) & (1 - a.T)
    np.fill_diagonal(no_edge, 0)

    counts[0] = u.sum()
    counts[1] = b.sum() // 2

    def s(x, y, z):
        return int(((x @ y) * z).sum())

    counts[2] = s(u, u, ut) // 3           # three-cycle
    counts[3] = s(b, u, ut)                # cycle-with-mutual
    counts[4] = s(b, b, ut)                # two-mutual-plus-arc
    counts[5] = s(b, b, b) // 6            # complete-mutual-triad
    counts[6] = s(u, u, u)                 # feed-forward
    counts[7] = s(ut, u, b) // 2           # fan-into-mutual
    counts[8] = s(u, ut, b) // 2           # fan-out-of-mutual
    counts[9] = s(ut, u, no_edge) // 2     # out-fan
    counts[10] = s(u, u, no_edge)          # two-path
    counts[11] = s(u, ut, no_edge) // 2    # in-fan
    counts[12] = s(b, u, no_edge)          # mutual-with-out-arc
    counts[13] = s(b, ut, no_edge)         # mutual-with-in-arc
    counts[14] = s(b, b, no_edge) // 2     # mutual-wedge

    # bi-fan: unordered source pair with no internal edge, two common one-way
    # targets with no internal edge
    out_neigh = [np.flatnonzero(u[i]) for i in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        if not no_edge[i, j]:
            continue
        common = np.intersect1d(out_neigh[i], out_neigh[j], assume_unique=True)
        for c_idx in range(len(common)):
            for d_idx in range(c_idx + 1, len(common)):
                if no_edge[common[c_idx], common[d_idx]]:
                    counts[15] += 1
    return counts


def export_feature_rows(rows) -> str:
    """Feature export: "hash,label,m1..m16" CSV (header included)."""
    header = "hash,label," + ",".join(f"m{i}" for i in range(1, 17))
    out = [header]
    for tx_hash, label, counts in rows:
        out.append(f"{tx_hash},{label}," + ",".join(str(int(c)) for c in counts))
    return "\n".join(out) + "\n"
