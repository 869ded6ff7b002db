"""Where det D and cof D vanish, the sign of lambda, and the zero/negative families.

All classifiers work on the canonical (ascending) form of a spec, so a
spec is "l ones followed by parts > 2" exactly when it contains no 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Iterator

from .closed_forms import invariants
from .graph_model import (
    MultiBlockGraph,
    MultipartiteSpec,
    as_spec,
    complete,
    star_of_blocks,
    tn_spec,
)

NONSINGULAR = "nonsingular"
TWO_TWOS = "case-1 two-twos"
RECIPROCAL = "case-2 reciprocal-equality"


@dataclass(frozen=True)
class Witness:
    ones: int  # l
    tail: tuple[int, ...]  # the parts > 2


@dataclass(frozen=True)
class Verdict:
    zero: bool
    case: str
    witness: Witness | None = None


@dataclass(frozen=True)
class SingularityVerdict:
    spec: MultipartiteSpec
    det: Verdict
    cof: Verdict

    @property
    def det_zero(self) -> bool:
        return self.det.zero

    @property
    def cof_zero(self) -> bool:
        return self.cof.zero


class BoundViolation(AssertionError):
    """A reciprocal-equality witness fell outside its proven range for l."""


def _normal_form(spec: MultipartiteSpec) -> tuple[int, int, tuple[int, ...]]:
    """(number of 2s, number of 1s, parts > 2) of the canonical spec."""
    parts = spec.canonical().parts
    twos = parts.count(2)
    ones = parts.count(1)
    return twos, ones, tuple(p for p in parts if p > 2)


def _recip(tail: tuple[int, ...]) -> Fraction:
    return sum((Fraction(1, p - 2) for p in tail), Fraction(0))


def _classify(spec, shift: int) -> Verdict:
    # zero iff 2*sum 1/(n-2) == 2l - (m + shift), with (m+shift)/2 < l <= (3m+shift)/4
    s = as_spec(spec)
    twos, l, tail = _normal_form(s)
    if twos >= 2:
        return Verdict(True, TWO_TWOS)
    if twos == 1:
        return Verdict(False, NONSINGULAR)
    m = s.m
    if 2 * _recip(tail) == 2 * l - (m + shift):
        if not (Fraction(m + shift, 2) < l <= Fraction(3 * m + shift, 4)):
            raise BoundViolation(f"l={l} outside bound for {s}")
        return Verdict(True, RECIPROCAL, Witness(l, tail))
    return Verdict(False, NONSINGULAR)


def classify_det(spec) -> Verdict:
    """det D(K) = 0 iff two parts equal 2, or ones-then-(>2) with
    ``2 sum 1/(n_i - 2) = 2l - (m + 1)``."""
    return _classify(spec, 1)


def classify_cof(spec) -> Verdict:
    """cof D(K) = 0 iff two parts equal 2, or ones-then-(>2) with
    ``2 sum 1/(n_i - 2) = 2l - m``."""
    return _classify(spec, 0)


def classify(spec) -> SingularityVerdict:
    s = as_spec(spec)
    return SingularityVerdict(s, classify_det(s), classify_cof(s))


# ---------------------------------------------------------------------------
# lambda
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LambdaSignReport:
    spec: MultipartiteSpec
    lam: Fraction
    sign: str
    f_value: Fraction | None


class UndefinedLambda(ArithmeticError):
    pass


def _sign(x: Fraction) -> str:
    return "positive" if x > 0 else "negative" if x < 0 else "zero"


def lambda_single(spec) -> LambdaSignReport:
    """``lambda = det/cof = beta/gamma`` for one block, plus the f-value
    ``sum n_i/(n_i - 2)`` (with ``lambda = 1 + 1/f``) when no part is 2."""
    s = as_spec(spec)
    inv = invariants(s)
    if inv.gamma == 0:
        raise UndefinedLambda(f"cof D({s}) = 0, lambda undefined")
    if 2 in s.parts:
        # exactly one 2 (two 2s would force gamma = 0): alpha = 0 so beta = gamma
        return LambdaSignReport(s, Fraction(1), "positive", None)
    lam = Fraction(inv.beta, inv.gamma)
    f = sum((Fraction(n, n - 2) for n in s.parts), Fraction(0))
    if lam != 1 + 1 / f:
        raise AssertionError(f"lambda {lam} != 1 + 1/f for {s}")
    return LambdaSignReport(s, lam, _sign(lam), f)


def lambda_negative_by_inequality(spec) -> bool:
    """Sign test through the reciprocal-sum window, without forming beta/gamma.

    In normal form, lambda < 0 iff
    ``(2l - m - 1)/2 < sum 1/(n_i - 2) < (2l - m)/2``; the window is only
    nonempty for ``m/2 < l < (3m + 1)/4``.
    """
    s = as_spec(spec)
    twos, l, tail = _normal_form(s)
    if twos:
        return False
    m = s.m
    if not (Fraction(m, 2) < l < Fraction(3 * m + 1, 4)):
        return False
    S = _recip(tail)
    return Fraction(2 * l - m - 1, 2) < S < Fraction(2 * l - m, 2)


def canonical_specs(m: int, budget: int) -> Iterator[MultipartiteSpec]:
    """Every ascending spec with m parts of size at most ``budget``."""
    for parts in combinations_with_replacement(range(1, budget + 1), m):
        yield MultipartiteSpec(parts)


def negative_lambda_classifier(m: int, budget: int) -> list[MultipartiteSpec]:
    """Canonical specs (parts <= budget) with cof != 0 and lambda < 0."""
    if m < 2:
        raise ValueError("m >= 2 required")
    out = []
    for s in canonical_specs(m, budget):
        if s.parts.count(2) >= 2:
            continue  # cof = 0
        if classify_cof(s).zero:
            continue
        if lambda_negative_by_inequality(s):
            out.append(s)
    return out


def negative_lambda_brute(m: int, budget: int) -> list[MultipartiteSpec]:
    """Same set as the classifier, via the sign of beta/gamma."""
    out = []
    for s in canonical_specs(m, budget):
        inv = invariants(s)
        if inv.gamma != 0 and Fraction(inv.beta, inv.gamma) < 0:
            out.append(s)
    return out


# ---------------------------------------------------------------------------
# infinite negative-lambda families
# ---------------------------------------------------------------------------

def window_solution(kind: str, p: int, q: int, seed: int = 0) -> tuple[int, ...]:
    """Integers n_i > 2 (p + q of them) placing ``sum 1/(n_i - 2)`` in a window.

    ``kind="low"``:  ``p < sum < p + 1/2``   (needs q >= 1)
    ``kind="high"``: ``p + 1/2 < sum < p + 1`` (needs q >= 2)

    The first p sizes are 3.  For "low" the q tail sizes all equal
    ``2(q+1) + 1 + seed``; for "high" the tail is a 4 followed by q - 1
    copies of ``N(q-1) + 2`` with ``N = 3 + seed``.
    """
    if p < 0 or seed < 0:
        raise ValueError("p and seed must be non-negative")
    if kind == "low":
        if q < 1:
            raise ValueError("low window needs q >= 1")
        return (3,) * p + (2 * (q + 1) + 1 + seed,) * q
    if kind == "high":
        if q < 2:
            raise ValueError("high window needs q >= 2")
        N = 3 + seed
        return (3,) * p + (4,) + (N * (q - 1) + 2,) * (q - 1)
    raise ValueError(f"unknown window kind {kind!r}")


@dataclass(frozen=True)
class FamilyCase:
    m: int
    k: int
    ones: int  # l
    kind: str  # "low" | "high"
    p: int
    q: int


def family_case(m: int, k: int) -> FamilyCase:
    """Resolve ``(m, k)`` to the window problem, per residue of m mod 4.

    l = 2x + k ones; the remaining m - l parts must solve a low or high
    reciprocal window of integer offset p.
    """
    if m < 5:
        raise ValueError("negative-lambda families start at m = 5")
    x, r = divmod(m, 4)
    if r == 0:
        lo, hi, kind, p = 1, (2 * x - 1) // 2, "high", k - 1
    elif r == 1:
        lo, hi, kind, p = 1, x, "low", k - 1
    elif r == 2:
        lo, hi, kind, p = 2, x + 1, "high", k - 2
    else:
        lo, hi, kind, p = 2, x + 2, "low", k - 2
    if not lo <= k <= hi:
        raise ValueError(f"k={k} inadmissible for m={m} (need {lo} <= k <= {hi})")
    l = 2 * x + k
    q = (m - l) - p
    return FamilyCase(m, k, l, kind, p, q)


def admissible_ks(m: int) -> list[int]:
    out = []
    for k in range(0, m + 1):
        try:
            family_case(m, k)
        except ValueError:
            continue
        out.append(k)
    return out


def negative_lambda_family(m: int, k: int, seed: int = 0) -> MultipartiteSpec:
    """A concrete m-partite spec with cof != 0 and lambda < 0; distinct seeds
    give distinct specs."""
    case = family_case(m, k)
    tail = window_solution(case.kind, case.p, case.q, seed)
    spec = MultipartiteSpec((1,) * case.ones + tail).canonical()
    rep = lambda_single(spec)
    if rep.sign != "negative":
        raise AssertionError(f"family member {spec} has lambda {rep.lam}")
    return spec


# ---------------------------------------------------------------------------
# lambda = 0 multi-block families
# ---------------------------------------------------------------------------

def lambda_tn(n: int) -> Fraction:
    """Closed value ``-2/(n - 6)`` for T_n, n != 6."""
    if n == 6:
        raise UndefinedLambda("cof D(T_6) = 0")
    return Fraction(-2, n - 6)


def zero_lambda_multiblock(kind: str, **params) -> MultiBlockGraph:
    """Star-shaped multi-block graphs with lambda_G = 0 but every block cof != 0.

    ``kind="ex4.7"``: params ``b1, b2, b3`` (counts of T_3, T_4, T_5) and
    ``x, y, z``; each T_3 brings x blocks of T_{3x+6}, each T_4 brings y
    blocks of T_{2y+6}, each T_5 brings z blocks of T_{z+6}.

    ``kind="ex4.8"``: param ``m`` (m != 2); K_4, K_{m,m} and 9m - 4 blocks
    of T_{6+8m}.
    """
    if kind in ("ex4.7", "example-4.7"):
        b1, b2, b3 = (int(params.get(k, 0)) for k in ("b1", "b2", "b3"))
        x, y, z = (int(params.get(k, 1)) for k in ("x", "y", "z"))
        if min(b1, b2, b3) < 0 or b1 + b2 + b3 == 0:
            raise ValueError("need non-negative counts b1, b2, b3 with at least one block")
        if min(x, y, z) < 1:
            raise ValueError("x, y, z must be >= 1")
        specs = []
        for count, small, mult, big in ((b1, 3, x, 3 * x + 6), (b2, 4, y, 2 * y + 6), (b3, 5, z, z + 6)):
            for _ in range(count):
                specs.append(tn_spec(small))
                specs.extend([tn_spec(big)] * mult)
        return star_of_blocks(specs)
    if kind in ("ex4.8", "example-4.8"):
        m = int(params.get("m", 1))
        if m < 1 or m == 2:
            raise ValueError("m must be a positive integer other than 2")
        specs = [complete(4), MultipartiteSpec((m, m))] + [tn_spec(6 + 8 * m)] * (9 * m - 4)
        return star_of_blocks(specs)
    raise ValueError(f"unknown family {kind!r}")


def enumerate_specs(m: int, max_part: int, filt: str | None = None) -> Iterable[dict]:
    """Rows for the ``enumerate`` command: canonical specs matching ``filt``
    (``det0``, ``cof0``, ``lneg`` or None for all)."""
    for s in canonical_specs(m, max_part):
        v = classify(s)
        inv = invariants(s)
        lam = Fraction(inv.beta, inv.gamma) if inv.gamma else None
        if filt == "det0" and not v.det_zero:
            continue
        if filt == "cof0" and not v.cof_zero:
            continue
        if filt == "lneg" and not (lam is not None and lam < 0):
            continue
        yield {"spec": s, "verdict": v, "invariants": inv, "lambda": lam}
