import random
from fractions import Fraction as F

import pytest

from distblock.exact_linalg import ExactMatrix, cofactor_sum, determinant, inverse
from distblock.graph_model import InvalidGraphError, distance_matrix, relabel, star_of_blocks, tn_spec
from distblock.t6_family import (
    T6TnSpec,
    as_multiblock_graph,
    build_D,
    build_R,
    build_t6_tn,
    c_block_form,
    det_t6_tn,
    full_check,
    inverse_t6_tn,
    match_t6_tn,
    to_graph_order,
    verify_steps,
)

GRID = [(n, b) for n in (3, 4, 5, 7, 8, 9, 10) for b in (1, 2, 3)]


def test_spec_guards():
    with pytest.raises(InvalidGraphError):
        T6TnSpec(6, 1)
    with pytest.raises(InvalidGraphError):
        T6TnSpec(7, 0)
    with pytest.raises(InvalidGraphError):
        T6TnSpec(2, 1)
    assert T6TnSpec(7, 2).order == 18


@pytest.mark.parametrize("n, b, det", [(7, 1, 256), (3, 1, -48), (5, 2, -256)])
def test_det_examples(n, b, det):
    s = T6TnSpec(n, b)
    assert det_t6_tn(s) == det
    assert determinant(build_D(s)) == det


def test_d_layout():
    s = T6TnSpec(7, 1)
    D = build_D(s)
    assert D.shape == (12, 12) and D.is_symmetric()
    c = s.center
    assert [D[c, j] for j in range(5)] == [1, 1, 2, 2, 2]
    assert [D[c, j] for j in range(5, 11)] == [1, 1, 2, 2, 2, 2]


def test_n3_degenerate_blocks():
    mats = build_t6_tn(T6TnSpec(3, 2))
    assert mats.blocks["D4"] == ExactMatrix([[0, 1], [1, 0]])
    assert mats.blocks["D5"] == ExactMatrix([[2, 2], [2, 2]])
    assert mats.blocks["d6"] == ExactMatrix([[1], [1]])
    assert mats.D.shape == (10, 10)


@pytest.mark.parametrize("n, b", GRID)
def test_grid(n, b):
    rep = full_check(T6TnSpec(n, b))
    assert rep.ok, {k: v for k, v in rep.checks.items() if not v}


def test_steps_report_names_ten_steps():
    rep = verify_steps(T6TnSpec(8, 2))
    assert len(rep.steps) == 10 and rep.ok


def test_printed_r2_sign_breaks_inverse():
    # with the minus sign kept in R2's lower-left piece, D C != I unless n = 3
    for n, b in [(7, 1), (4, 2), (10, 3)]:
        s = T6TnSpec(n, b)
        bad = (
            build_t6_tn(s).L.scale(F(-1, 2))
            + ExactMatrix.ones(s.order).scale(F(1, 2 * (b + 1)))
            + build_R(s, as_printed=True).scale(F(1, 2 * (b + 1) * (n - 6)))
        )
        assert build_D(s) @ bad != ExactMatrix.identity(s.order)
    s = T6TnSpec(3, 2)
    assert build_R(s, as_printed=True) == build_R(s)


def test_two_construction_paths_agree():
    for n, b in [(4, 1), (9, 3)]:
        s = T6TnSpec(n, b)
        assert inverse_t6_tn(s) == c_block_form(s)


def test_cof_zero_but_invertible():
    D = build_D(T6TnSpec(5, 2))
    assert cofactor_sum(D) == 0 and determinant(D) != 0


def test_match_any_labelling():
    rng = random.Random(2)
    for n, b in [(3, 2), (7, 1), (4, 3), (9, 2)]:
        g = as_multiblock_graph(T6TnSpec(n, b))
        perm = list(range(g.vertex_count))
        rng.shuffle(perm)
        h = relabel(g, perm)
        spec, order = match_t6_tn(h)
        assert spec == T6TnSpec(n, b)
        assert to_graph_order(inverse_t6_tn(spec), order) == inverse(distance_matrix(h))


def test_match_rejects_other_shapes():
    assert match_t6_tn(star_of_blocks([tn_spec(7), tn_spec(7)])) is None
    assert match_t6_tn(star_of_blocks([tn_spec(6), tn_spec(7), tn_spec(8)])) is None
    assert match_t6_tn(star_of_blocks([tn_spec(6), tn_spec(6)])) is None
    with pytest.raises(InvalidGraphError):
        match_t6_tn(star_of_blocks([tn_spec(6), tn_spec(7)], center_parts=[0, 2]))
