import numpy as np

from xsema.graph import build_asset_graph, export_edge_list
from xsema.motif import census_bruteforce

from conftest import make_metadata, make_transfer


def test_deposit_path_has_three_nodes_two_edges(deposit_metadata):
    g = build_asset_graph(deposit_metadata)
    assert g.n_nodes == 3
    assert g.edges == frozenset({(0, 1), (1, 2)})


def test_empty_metadata_gives_empty_graph():
    g = build_asset_graph(make_metadata(1))
    assert g.n_nodes == 0
    assert g.edges == frozenset()


def test_parallel_transfers_collapse_with_annotations():
    meta = make_metadata(2,
                         et=[make_transfer(1, 2, "external")],
                         erc20=[make_transfer(1, 2, "erc20")])
    g = build_asset_graph(meta)
    assert len(g.edges) == 1
    assert len(g.edge_annotations[(0, 1)]) == 2


def test_self_transfer_produces_no_edge():
    meta = make_metadata(3, et=[make_transfer(1, 1)])
    g = build_asset_graph(meta)
    assert g.n_nodes == 1
    assert g.edges == frozenset()
    assert len(g.self_annotations[0]) == 1


def test_node_order_first_appearance():
    meta = make_metadata(4,
                         et=[make_transfer(5, 3)],
                         it=[make_transfer(3, 9, "internal")])
    g = build_asset_graph(meta)
    assert [n[-1] for n in g.nodes] == ["5", "3", "9"]


def test_annotation_count_equals_non_self_transfers():
    meta = make_metadata(5,
                         et=[make_transfer(1, 2), make_transfer(2, 1)],
                         erc20=[make_transfer(1, 2, "erc20"),
                                make_transfer(3, 3, "erc20")])
    g = build_asset_graph(meta)
    n_annotations = sum(len(v) for v in g.edge_annotations.values())
    assert n_annotations == 3


def test_census_is_permutation_stable():
    transfers = [make_transfer(1, 2), make_transfer(2, 3), make_transfer(3, 1)]
    meta_a = make_metadata(6, et=transfers)
    meta_b = make_metadata(7, et=list(reversed(transfers)))
    counts_a = census_bruteforce(build_asset_graph(meta_a))
    counts_b = census_bruteforce(build_asset_graph(meta_b))
    assert np.array_equal(counts_a, counts_b)


def test_edge_list_export(deposit_metadata):
    text = export_edge_list(build_asset_graph(deposit_metadata))
    lines = text.splitlines()
    assert len(lines) == 2
    assert all(len(line.split()) == 4 for line in lines)
