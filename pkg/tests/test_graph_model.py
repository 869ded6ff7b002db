import random
from fractions import Fraction as F

import pytest

from distblock.exact_linalg import ExactMatrix, cofactor_sum, determinant
from distblock.graph_model import (
    BlockPlacement,
    InvalidGraphError,
    MultiBlockGraph,
    MultipartiteSpec,
    attach_block,
    bfs_distances,
    block_path_distances,
    build_multipartite,
    graham_compose,
    graph_laplacian,
    parse_graph_spec,
    parse_spec,
    random_multiblock,
    single_block,
    star_of_blocks,
    tree_from_edges,
    validate,
)
from distblock.sweeps import compositions


def test_spec_validation():
    with pytest.raises(InvalidGraphError):
        MultipartiteSpec((3,))
    with pytest.raises(InvalidGraphError):
        MultipartiteSpec((2, 0))
    s = MultipartiteSpec((3, 1, 2))
    assert s.m == 3 and s.order == 6
    assert s.canonical().parts == (1, 2, 3)
    assert str(s) == "K_{3,1,2}"


@pytest.mark.parametrize(
    "text, parts",
    [("2,3", (2, 3)), ("(1,1,4)", (1, 1, 4)), ("K_{2,3}", (2, 3)), ("K4", (1, 1, 1, 1)), ("T7", (1, 1, 5))],
)
def test_parse_spec(text, parts):
    assert parse_spec(text).parts == parts


def test_parse_spec_rejects_garbage():
    with pytest.raises(InvalidGraphError):
        parse_spec("a,b")


def test_build_multipartite_small():
    assert build_multipartite((1, 1, 1)) == ExactMatrix([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    D = build_multipartite((2, 3))
    assert D == ExactMatrix(
        [
            [0, 2, 1, 1, 1],
            [2, 0, 1, 1, 1],
            [1, 1, 0, 2, 2],
            [1, 1, 2, 0, 2],
            [1, 1, 2, 2, 0],
        ]
    )


def test_build_multipartite_matches_bfs():
    for parts in compositions(9):
        assert build_multipartite(parts) == bfs_distances(single_block(parts))


def test_bfs_equals_block_path_on_random_graphs():
    rng = random.Random(7)
    for _ in range(60):
        g = random_multiblock(rng, max_vertices=30)
        D = bfs_distances(g)
        assert D == block_path_distances(g)
        assert D.is_symmetric() and all(D[i, i] == 0 for i in range(D.rows))


def test_graham_compose_examples():
    path3 = tree_from_edges([(0, 1), (1, 2)])
    assert graham_compose(path3)[0] == 4
    tri_pendant = attach_block(single_block((1, 1, 1)), (1, 1), at=0, part=0)
    assert graham_compose(tri_pendant) == (F(-7), F(-6))
    assert determinant(bfs_distances(tri_pendant)) == -7
    assert graham_compose(single_block((2, 3))) == (F(-16), F(-16))


def test_graham_compose_random():
    rng = random.Random(11)
    for _ in range(40):
        g = random_multiblock(rng, max_vertices=20)
        D = bfs_distances(g)
        assert graham_compose(g) == (determinant(D), cofactor_sum(D))


def test_validate_reports_violations():
    two_shared = MultiBlockGraph(
        3,
        (BlockPlacement.from_parts([[0], [1], [2]]), BlockPlacement.from_parts([[0], [1]])),
    )
    rep = validate(two_shared)
    assert not rep.ok and any("share 2" in v for v in rep.violations)

    disconnected = MultiBlockGraph(4, (BlockPlacement.from_parts([[0], [1]]), BlockPlacement.from_parts([[2], [3]])))
    assert any("disconnected" in v for v in validate(disconnected).violations)

    cycle = MultiBlockGraph(
        3,
        (
            BlockPlacement.from_parts([[0], [1]]),
            BlockPlacement.from_parts([[1], [2]]),
            BlockPlacement.from_parts([[2], [0]]),
        ),
    )
    assert any("cycle" in v for v in validate(cycle).violations)

    lonely = MultiBlockGraph(3, (BlockPlacement.from_parts([[0], [1]]),))
    assert any("no block" in v for v in validate(lonely).violations)


def test_validate_cut_vertices():
    g = star_of_blocks([(1, 1, 3), (1, 1)])
    rep = validate(g)
    assert rep.ok and rep.cut_vertices == [0]
    assert sorted(rep.block_tree) == [(0, 0), (1, 0)]


def test_laplacian_of_path():
    L = graph_laplacian(tree_from_edges([(0, 1), (1, 2)]))
    assert L == ExactMatrix([[1, -1, 0], [-1, 2, -1], [0, -1, 1]])


def test_parse_graph_spec_shortcuts(tmp_path):
    assert parse_graph_spec("tree:0-1,1-2").vertex_count == 3
    g = parse_graph_spec("star_of_blocks:1,1,5x3")
    assert g.vertex_count == 19 and g.b == 3
    assert parse_graph_spec("t6_tn:7,2").vertex_count == 6 + 2 * 6
    assert parse_graph_spec("2,3").b == 1
    f = tmp_path / "g.json"
    f.write_text('{"vertex_count": 3, "blocks": [{"parts": [[0], [1]]}, {"parts": [[1], [2]]}]}')
    assert parse_graph_spec(str(f)).b == 2
    with pytest.raises(InvalidGraphError):
        parse_graph_spec('{"vertex_count": 2, "blocks": [{"parts": [[0], [0]]}]}')


def test_json_roundtrip():
    g = random_multiblock(random.Random(3))
    assert MultiBlockGraph.from_json(g.to_json()) == g
