import random
from fractions import Fraction as F

import networkx as nx
import pytest

from distblock.closed_forms import invariants
from distblock.exact_linalg import DimensionError, ExactMatrix, SingularMatrixError, inverse
from distblock.graph_model import (
    attach_block,
    build_multipartite,
    distance_matrix,
    random_multiblock,
    single_block,
    star_of_blocks,
    tn_spec,
    tree_from_edges,
)
from distblock.singularity_lab import zero_lambda_multiblock
from distblock.spectral import (
    FormulaInapplicable,
    inverse_multiblock,
    inverse_single_block,
    lap_like_single,
    lapexp_check,
    mu_single,
    rank_one_inverse,
    rank_one_obstruction,
    spectral_multiblock,
    spectral_single,
    tree_inverse,
)
from distblock.sweeps import compositions
from distblock.t6_family import T6TnSpec, build_D


def test_k2_lap_like():
    half = F(1, 2)
    assert lap_like_single((1, 1)) == ExactMatrix([[half, -half], [-half, half]])


def test_mu_115():
    assert mu_single((1, 1, 5)) == (3, 3, -1, -1, -1, -1, -1)


def test_path3():
    data = spectral_multiblock(tree_from_edges([(0, 1), (1, 2)]))
    assert data.lam == 1
    assert data.mu == (F(1, 2), 0, F(1, 2))


def test_star_of_t7():
    assert spectral_multiblock(star_of_blocks([tn_spec(7)] * 3)).lam == -6


def test_bipartite_inverse_display():
    # the displayed bipartite inverse: diagonal blocks use 3 n_j - 4 over
    # 2(3 n1 n2 - 4(n1 + n2 - 1))
    n1, n2 = 2, 3
    den = 3 * n1 * n2 - 4 * (n1 + n2 - 1)
    Dt = inverse_single_block((n1, n2))
    assert Dt[0, 0] == F(3 * n2 - 4, 2 * den) - F(1, 2)
    assert Dt[0, 1] == F(3 * n2 - 4, 2 * den)
    assert Dt[2, 2] == F(3 * n1 - 4, 2 * den) - F(1, 2)
    assert Dt[0, 2] == F(-1, den)


def test_k2_inverse():
    assert inverse_single_block((1, 1)) == ExactMatrix([[0, 1], [1, 0]])


def test_single_block_identities():
    for parts in compositions(10):
        inv = invariants(parts)
        D = build_multipartite(parts)
        if inv.gamma != 0:
            data = spectral_single(parts)
            assert data.check_invariants()
            assert lapexp_check(D, data.lam, data.mu, data.lap_like).ok
        if inv.beta != 0:
            Dt = inverse_single_block(parts)
            assert Dt @ D == ExactMatrix.identity(D.rows)
            if inv.gamma != 0:
                assert rank_one_inverse(spectral_single(parts)) == Dt


def test_formula_guards():
    with pytest.raises(FormulaInapplicable):
        spectral_single((1, 1, 4))
    with pytest.raises(FormulaInapplicable):
        inverse_single_block((2, 2, 3))
    with pytest.raises(FormulaInapplicable):
        inverse_multiblock(zero_lambda_multiblock("ex4.7", b1=1, b2=0, b3=0, x=1))
    with pytest.raises(FormulaInapplicable):
        spectral_multiblock(star_of_blocks([tn_spec(6), tn_spec(7)]))
    with pytest.raises(DimensionError):
        lapexp_check(ExactMatrix.identity(2), 1, [1], ExactMatrix.identity(2))


def test_small_multiblock_inverses():
    path4 = tree_from_edges([(0, 1), (1, 2), (2, 3)])
    assert inverse_multiblock(path4) == inverse(distance_matrix(path4))
    tri = attach_block(single_block((1, 1, 1)), (1, 1), at=0, part=0)
    assert inverse_multiblock(tri) == inverse(distance_matrix(tri))


def test_random_multiblock_inverses():
    rng = random.Random(5)
    done = 0
    while done < 40:
        g = random_multiblock(rng, max_vertices=24, accept_spec=lambda s: invariants(s).gamma != 0)
        data = spectral_multiblock(g)
        D = distance_matrix(g)
        assert lapexp_check(D, data.lam, data.mu, data.lap_like).ok
        if data.lam != 0:
            assert inverse_multiblock(g) == inverse(D)
        done += 1


@pytest.mark.parametrize("n", range(2, 10))
def test_tree_inverse(n):
    for t in nx.nonisomorphic_trees(n):
        g = tree_from_edges(list(t.edges()), n)
        data = spectral_multiblock(g)
        assert data.lam == F(n - 1, 2)
        assert inverse_multiblock(g) == tree_inverse(g) == inverse(distance_matrix(g))


def test_obstruction():
    assert rank_one_obstruction(build_D(T6TnSpec(7, 1)))
    assert not rank_one_obstruction(distance_matrix(tree_from_edges([(0, 1), (1, 2)])))
    assert not rank_one_obstruction(build_multipartite((1, 1, 1)))
    with pytest.raises(SingularMatrixError):
        rank_one_obstruction(build_multipartite((2, 2, 3)))
