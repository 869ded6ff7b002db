"""lambda, mu and the Laplacian-like matrix; closed-form inverses.

For a block with cof D != 0 the triple (lambda, mu, Lap) satisfies

    mu^t 1 = 1,  Lap 1 = 0,  D mu = lambda 1,  Lap D + I = mu 1^t

and, when lambda != 0, ``D^{-1} = -Lap + (1/lambda) mu mu^t``.  For a
multi-block graph lambda adds up over blocks, mu adds up with a
``-(k - 1)`` correction at a vertex lying in k blocks, and Lap is the sum
of the zero-padded block matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Sequence

from .closed_forms import hat, invariants
from .exact_linalg import (
    DimensionError,
    ExactMatrix,
    block_assemble,
    cofactor_sum,
    inverse,
    outer,
)
from .graph_model import (
    MultiBlockGraph,
    MultipartiteSpec,
    as_spec,
    check,
    graph_laplacian,
)


class FormulaInapplicable(ArithmeticError):
    """The closed form needs a nonzero quantity that vanishes here."""


@dataclass(frozen=True)
class SpectralData:
    lam: Fraction
    mu: tuple[Fraction, ...]
    lap_like: ExactMatrix

    def check_invariants(self) -> bool:
        return (
            sum(self.mu) == 1
            and all(x == 0 for x in self.lap_like.row_sums())
            and self.lap_like.is_symmetric()
        )


def _gamma_or_raise(spec: MultipartiteSpec) -> int:
    g = invariants(spec).gamma
    if g == 0:
        raise FormulaInapplicable(f"cof D({spec}) = 0")
    return g


def lambda_block(spec) -> Fraction:
    s = as_spec(spec)
    inv = invariants(s)
    if inv.gamma == 0:
        raise FormulaInapplicable(f"cof D({s}) = 0, lambda undefined")
    return Fraction(inv.beta, inv.gamma)


def _part_weights(parts: Sequence[int]) -> list[int]:
    # prod_{j != i} (n_j - 2) for every part i
    return [prod(n - 2 for k, n in enumerate(parts) if k != i) for i in range(len(parts))]


def mu_single(spec) -> tuple[Fraction, ...]:
    """mu(v) = prod_{j != i}(n_j - 2) / gamma for v in part i (block-local order)."""
    s = as_spec(spec)
    g = _gamma_or_raise(s)
    w = _part_weights(s.parts)
    return tuple(Fraction(w[i], g) for i, n in enumerate(s.parts) for _ in range(n))


def lap_like_single(spec) -> ExactMatrix:
    s = as_spec(spec)
    g = _gamma_or_raise(s)
    parts = s.parts
    a, b = [], []
    for i, n in enumerate(parts):
        h = hat(parts, i)
        a.append(Fraction((n - 1) * h.beta - 2 * h.gamma, 2 * g))
        b.append(Fraction(-h.beta, 2 * g))
    part = s.part_of()
    m = s.m
    c = [[Fraction(prod(parts[l] - 2 for l in range(m) if l not in (i, j)), g) for j in range(m)] for i in range(m)]

    def entry(u, v):
        i, j = part[u], part[v]
        if u == v:
            return a[i]
        if i == j:
            return b[i]
        return c[i][j]

    return ExactMatrix.from_function(s.order, s.order, entry)


def spectral_single(spec) -> SpectralData:
    s = as_spec(spec)
    return SpectralData(lambda_block(s), mu_single(s), lap_like_single(s))


@dataclass(frozen=True)
class LapExpReport:
    left: dict[str, bool]
    right: dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.left.values()) and all(self.right.values())


def lapexp_check(D: ExactMatrix, lam, mu: Sequence, L: ExactMatrix) -> LapExpReport:
    """Left and right LapExp(lambda, mu, L) conditions for D, exactly."""
    n = D.rows
    if not (D.is_square and L.shape == D.shape and len(mu) == n):
        raise DimensionError("D, mu and L must be conformal")
    lam = Fraction(lam)
    mu_col = ExactMatrix.column(mu)
    ones = ExactMatrix.ones(n, 1)
    eye = ExactMatrix.identity(n)
    mu_sum_is_one = sum(mu_col.col(0)) == 1
    left = {
        "mu^t 1 = 1": mu_sum_is_one,
        "L 1 = 0": all(x == 0 for x in L.row_sums()),
        "mu^t D = lambda 1^t": mu_col.T @ D == ones.T.scale(lam),
        "L D + I = mu 1^t": L @ D + eye == mu_col @ ones.T,
    }
    right = {
        "1^t mu = 1": mu_sum_is_one,
        "1^t L = 0": all(x == 0 for x in L.col_sums()),
        "D mu = lambda 1": D @ mu_col == ones.scale(lam),
        "D L + I = 1 mu^t": D @ L + eye == ones @ mu_col.T,
    }
    return LapExpReport(left, right)


def spectral_multiblock(g: MultiBlockGraph) -> SpectralData:
    """lambda, mu, Lap for a multi-block graph whose blocks all have cof != 0."""
    check(g)
    n = g.vertex_count
    lam = Fraction(0)
    mu = [Fraction(0)] * n
    L = [[Fraction(0)] * n for _ in range(n)]
    for t, blk in enumerate(g.blocks):
        if invariants(blk.spec).gamma == 0:
            raise FormulaInapplicable(f"block {t} ({blk.spec}) has cof D = 0")
        lam += lambda_block(blk.spec)
        ids = blk.vertices
        for v, x in zip(ids, mu_single(blk.spec)):
            mu[v] += x
        Lb = lap_like_single(blk.spec)
        for i, u in enumerate(ids):
            row = Lb.row(i)
            Lu = L[u]
            for j, v in enumerate(ids):
                Lu[v] += row[j]
    for v in range(n):
        mu[v] -= g.block_count(v) - 1
    return SpectralData(lam, tuple(mu), ExactMatrix(L, cols=n))


def rank_one_inverse(data: SpectralData) -> ExactMatrix:
    """``-Lap + (1/lambda) mu mu^t``."""
    if data.lam == 0:
        raise FormulaInapplicable("lambda = 0: D is singular")
    return -data.lap_like + outer(data.mu, data.mu).scale(1 / data.lam)


def inverse_single_block(spec) -> ExactMatrix:
    """Block-form inverse of D(K_{n_1..n_m}); needs beta != 0."""
    s = as_spec(spec)
    parts = s.parts
    beta = invariants(parts).beta
    if beta == 0:
        raise FormulaInapplicable(f"det D({s}) = 0")
    m = s.m
    grid = []
    for i, ni in enumerate(parts):
        row = []
        for j, nj in enumerate(parts):
            if i == j:
                h = hat(parts, i)
                coef = Fraction(2 * h.beta - h.gamma, 2 * beta)
                row.append(ExactMatrix.ones(ni).scale(coef) - ExactMatrix.scalar(ni, Fraction(1, 2)))
            else:
                coef = -Fraction(prod(parts[l] - 2 for l in range(m) if l not in (i, j)), beta)
                row.append(ExactMatrix.ones(ni, nj).scale(coef))
        grid.append(row)
    return block_assemble(grid)


def inverse_multiblock(g: MultiBlockGraph) -> ExactMatrix:
    """``D(G)^{-1} = -Lap + (1/lambda_G) mu mu^t``; refuses if a block has
    cof = 0 (see :mod:`distblock.t6_family` for the supported such graph)."""
    data = spectral_multiblock(g)
    if data.lam == 0:
        raise FormulaInapplicable("lambda = 0: det D(G) = 0, no inverse")
    return rank_one_inverse(data)


def tree_inverse(g: MultiBlockGraph) -> ExactMatrix:
    """``-L/2 + tau tau^t / (2(n-1))`` with ``tau(v) = 2 - deg(v)``."""
    n = g.vertex_count
    L = graph_laplacian(g)
    tau = [2 - L[v, v] for v in range(n)]
    return L.scale(Fraction(-1, 2)) + outer(tau, tau).scale(Fraction(1, 2 * (n - 1)))


class ObstructionMismatch(AssertionError):
    pass


def rank_one_obstruction(D: ExactMatrix) -> bool:
    """True iff ``D^{-1}`` cannot be a rank-one update of a Laplacian-like
    matrix, i.e. ``cof D = 1^t D^{-1} 1 = 0``.  Both routes are computed."""
    Dinv = inverse(D)  # raises SingularMatrixError
    via_inverse = Dinv.entry_sum() == 0
    via_cof = cofactor_sum(D) == 0
    if via_inverse != via_cof:
        raise ObstructionMismatch("cofactor sum and 1^t D^-1 1 disagree on vanishing")
    return via_cof

