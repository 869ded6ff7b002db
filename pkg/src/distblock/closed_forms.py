"""Closed forms for the distance matrix of a complete multipartite graph.

For part sizes ``n_1..n_m`` write

    alpha = prod (n_i - 2)
    gamma = sum_i n_i prod_{j != i} (n_j - 2)
    beta  = gamma + alpha

Then ``cof D = (-2)^(|V|-m) gamma`` and ``det D = (-2)^(|V|-m) beta``.
The invariants are defined for any multiset of sizes, including the empty
one (``alpha = 1, gamma = 0, beta = 1``) and singletons
(``alpha = n - 2, gamma = n, beta = 2n - 2``); those values keep the
splitting recurrences valid all the way down.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import prod
from typing import Iterable, Sequence

from .exact_linalg import ExactMatrix, determinant
from .graph_model import MultipartiteSpec


def _sizes(x: MultipartiteSpec | Iterable[int]) -> tuple[int, ...]:
    return x.parts if isinstance(x, MultipartiteSpec) else tuple(int(v) for v in x)


@dataclass(frozen=True)
class AlgebraicInvariants:
    parts: tuple[int, ...]
    alpha: int
    beta: int
    gamma: int


def invariants(parts: MultipartiteSpec | Iterable[int]) -> AlgebraicInvariants:
    n = _sizes(parts)
    alpha = prod(x - 2 for x in n)
    gamma = sum(x * prod(y - 2 for k, y in enumerate(n) if k != i) for i, x in enumerate(n))
    return AlgebraicInvariants(n, alpha, gamma + alpha, gamma)


def deleted(parts: MultipartiteSpec | Iterable[int], *indices: int) -> tuple[int, ...]:
    """Sizes with the given positions removed (the "hatted" index set)."""
    n = _sizes(parts)
    drop = set(indices)
    return tuple(x for k, x in enumerate(n) if k not in drop)


def hat(parts, *indices: int) -> AlgebraicInvariants:
    return invariants(deleted(parts, *indices))


def _spec(x) -> MultipartiteSpec:
    return x if isinstance(x, MultipartiteSpec) else MultipartiteSpec(tuple(x))


def cof_closed(spec: MultipartiteSpec | Iterable[int]) -> Fraction:
    s = _spec(spec)
    return Fraction((-2) ** (s.order - s.m) * invariants(s).gamma)


def det_closed(spec: MultipartiteSpec | Iterable[int]) -> Fraction:
    s = _spec(spec)
    return Fraction((-2) ** (s.order - s.m) * invariants(s).beta)


def cm_matrix(n: Sequence[int]) -> ExactMatrix:
    """The m x m matrix whose determinant drives the cofactor formula."""
    m = len(n)

    def entry(i, j):
        if i == 0:
            return n[0] if j == 0 else 2 * (n[0] - 1)
        if j == i:
            return 2
        return n[i]

    return ExactMatrix.from_function(m, m, entry)


class ClosedFormMismatch(AssertionError):
    pass


def det_cm(n: Sequence[int]) -> Fraction:
    """``det C_m`` computed from the explicit matrix and cross-checked
    against ``(-1)^(m-1) * gamma``."""
    n = tuple(n)
    if not n:
        raise ValueError("C_m needs m >= 1")
    direct = determinant(cm_matrix(n))
    formula = Fraction((-1) ** (len(n) - 1) * invariants(n).gamma)
    if direct != formula:
        raise ClosedFormMismatch(f"det C_m for {n}: matrix gives {direct}, formula {formula}")
    return formula


def reciprocal_sum_solution(p: int, r: int) -> tuple[int, ...]:
    """Positive integers ``q_1..q_p`` with ``sum 1/q_i = r/2``, for ``1 <= r <= 2p``."""
    if p < 1 or not 1 <= r <= 2 * p:
        raise ValueError(f"need p >= 1 and 1 <= r <= 2p, got p={p}, r={r}")
    if r % 2 == 0:
        k = r // 2
        return (1,) * (k - 1) + (p + 1 - k,) * (p + 1 - k)
    if r == 1:
        return (2 * p,) * p
    k = (r - 1) // 2
    return (1,) * k + (2 * (p - k),) * (p - k)


@dataclass
class IdentityReport:
    checked: int
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def identity_suite(spec: MultipartiteSpec | Iterable[int], subset_cap: int | None = None) -> IdentityReport:
    """Check the beta/gamma recurrences and the three deletion identities used
    by the single-block inverse, for every index and index pair.

    ``subset_cap`` bounds the size of the split sets tried in the
    recurrences (all proper subsets by default).
    """
    n = _sizes(spec)
    m = len(n)
    if m < 2:
        raise ValueError("identity suite needs m >= 2")
    fails: list[str] = []
    checked = 0

    def expect(label, lhs, rhs):
        nonlocal checked
        checked += 1
        if lhs != rhs:
            fails.append(f"{label}: {lhs} != {rhs} for {n}")

    full = invariants(n)
    expect("beta = gamma + alpha", full.beta, full.gamma + full.alpha)

    cap = m - 1 if subset_cap is None else min(subset_cap, m - 1)
    for size in range(cap + 1):
        for J in combinations(range(m), size):
            inJ = invariants([n[k] for k in J])
            inC = invariants(deleted(n, *J))
            expect(f"gamma split {J}", full.gamma, inC.alpha * inJ.gamma + inJ.alpha * inC.gamma)
            expect(f"beta split {J}", full.beta, inC.alpha * inJ.beta + inJ.alpha * inC.gamma)

    for i in range(m):
        hi = hat(n, i)
        expect(f"(a) i={i}", n[i] * (hi.gamma + 2 * hi.alpha) - full.beta, 2 * hi.beta)
        for j in range(m):
            if j == i:
                continue
            hij = hat(n, i, j)
            hj = hat(n, j)
            expect(
                f"(b) i={i} j={j}",
                n[j] * (hij.gamma + 2 * hij.alpha) - hi.beta - 2 * hij.gamma,
                2 * hij.alpha,
            )
            expect(
                f"(c) i={i} j={j}",
                (hij.gamma + 2 * hij.alpha) * full.beta + 2 * n[i] * hij.alpha**2,
                (2 * hj.beta - hj.gamma) * hi.beta,
            )
    return IdentityReport(checked, fails)


def has_nonvanishing_deletion(spec: MultipartiteSpec | Iterable[int]) -> bool:
    """If beta != 0, some single deletion keeps beta nonzero (vacuous otherwise).

    Fails for (1, 1): beta = -1 while the one-part beta(1) = 2*1 - 2 = 0.
    """
    n = _sizes(spec)
    if invariants(n).beta == 0:
        return True
    return any(hat(n, i).beta != 0 for i in range(len(n)))
