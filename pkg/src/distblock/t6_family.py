"""One T_6 block and b copies of T_n glued at a central cut vertex.

The central vertex lies in the large part of every block, never at a base
vertex.  Since cof D(T_6) = 0 the rank-one inverse of :mod:`spectral` does
not apply; instead

    D^{-1} = -L/2 + J/(2(b+1)) + R/(2(b+1)(n-6))

for an explicit integer matrix R.  Everything here is laid out in a fixed
vertex order:

    T_6 base (2), T_6 large part minus the centre (3),
    then for every T_n block: base (2), large part minus the centre (n-3),
    and the centre last.

That is ``6 + b(n-1)`` vertices.  At n = 3 the (n-3)-sized pieces are
empty matrices and simply drop out.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exact_linalg import ExactMatrix, block_assemble, determinant
from .graph_model import (
    InvalidGraphError,
    MultiBlockGraph,
    bfs_distances,
    graph_laplacian,
    star_of_blocks,
    tn_spec,
)


def _J(r: int, c: int | None = None, k=1) -> ExactMatrix:
    return ExactMatrix.ones(r, r if c is None else c).scale(k)


def _I(r: int, k=1) -> ExactMatrix:
    return ExactMatrix.scalar(r, k)


def _O(r: int, c: int | None = None) -> ExactMatrix:
    return ExactMatrix.zeros(r, r if c is None else c)


def _col(*pieces) -> ExactMatrix:
    """Column vector from (value, length) pieces."""
    return ExactMatrix.column([v for v, size in pieces for _ in range(size)])


def _grid2(a, b, c, d) -> ExactMatrix:
    return block_assemble([[a, b], [c, d]])


@dataclass(frozen=True)
class T6TnSpec:
    n: int
    b: int

    def __post_init__(self):
        if self.n < 3:
            raise InvalidGraphError(f"T_n needs n >= 3, got n={self.n}")
        if self.n == 6:
            raise InvalidGraphError("n = 6 is excluded (the closed forms divide by n - 6)")
        if self.b < 1:
            raise InvalidGraphError(f"need at least one T_n block, got b={self.b}")

    @property
    def order(self) -> int:
        return 6 + self.b * (self.n - 1)

    @property
    def center(self) -> int:
        return self.order - 1


# ---------------------------------------------------------------------------
# the named blocks of D, L, R and C
# ---------------------------------------------------------------------------

def _d_blocks(n: int) -> dict[str, ExactMatrix]:
    k = n - 3
    return {
        "D1": _grid2(_J(2) - _I(2), _J(2, 3), _J(3, 2), (_J(3) - _I(3)).scale(2)),
        "D2": _grid2(_J(2, 2, 2), _J(2, k, 3), _J(3, 2, 3), _J(3, k, 4)),
        "d3": _col((1, 2), (2, 3)),
        "D4": _grid2(_J(2) - _I(2), _J(2, k), _J(k, 2), (_J(k) - _I(k)).scale(2)),
        "D5": _grid2(_J(2, 2, 2), _J(2, k, 3), _J(k, 2, 3), _J(k, k, 4)),
        "d6": _col((1, 2), (2, k)),
    }


def _l_blocks(n: int) -> dict[str, ExactMatrix]:
    k = n - 3
    return {
        "L1": _grid2(_I(2, 6) - _J(2), _J(2, 3, -1), _J(3, 2, -1), _I(3, 2)),
        "L2": _grid2(_I(2, n) - _J(2), _J(2, k, -1), _J(k, 2, -1), _I(k, 2)),
        "l1": _col((-1, 2), (0, 3)),
        "l2": _col((-1, 2), (0, k)),
    }


def _r_blocks(n: int, b: int, as_printed: bool = False) -> dict[str, ExactMatrix | Fraction]:
    # The lower-left piece of R2 is +((b+1)(n-4) - (n-6)); a leading minus
    # there breaks D C = I whenever n != 3.  as_printed=True keeps the minus.
    k = n - 3
    sgn = -1 if as_printed else 1
    e = n - 6
    bb = b * (b + 1)
    f = Fraction(e, b + 1)
    R3 = _grid2(
        _J(2, 2, n - 2 - f) + _I(2, (n - 2) * e),
        _J(2, k, -(n - 4 + f)),
        _J(k, 2, -(n - 4 + f)),
        _J(k, k, 1 - f) + _I(k, e),
    ).scale(b + 1)
    return {
        "R1": _grid2(
            _J(2, 2, 4 * bb - (3 * b + 4) * e) + _I(2, 4 * e * (b + 1)),
            _J(2, 3, -(2 * bb + e)),
            _J(3, 2, -(2 * bb + e)),
            _J(3, 3, bb - e) + _I(3, (b + 1) * e),
        ),
        "R2": _grid2(
            _J(2, 2, -(2 * (b + 1) * (n - 4) + e)),
            _J(2, k, 2 * (b + 1) - e),
            _J(3, 2, sgn * ((b + 1) * (n - 4) - e)),
            _J(3, k, -((b + 1) + e)),
        ),
        "R3": R3,
        "R4": _J(n - 1, n - 1, -e),
        "r1": _col((e * (2 * bb - 1), 2), (-e * (bb + 1), 3)),
        "r2": _col((-e, n - 1)),
        "r3": Fraction(-b * b * e),
    }


def _c_blocks(n: int, b: int) -> dict[str, ExactMatrix | Fraction]:
    """Blocks of ``2(n-6) C``."""
    k = n - 3
    e = n - 6
    g = 2 * b - e
    return {
        "C1": _grid2(_J(2, 2, 2 * g) - _I(2, 2 * e), _J(2, 3, -g), _J(3, 2, -g), _J(3, 3, b) - _I(3, e)),
        "C2": _grid2(_J(2, 2, -2 * (n - 4)), _J(2, k, 2), _J(3, 2, n - 4), _J(3, k, -1)),
        "c3": _col((e * (2 * b + 1), 2), (-e * b, 3)),
        "C4": _grid2(_J(2, 2, 2 * (n - 4)) - _I(2, 2 * e), _J(2, k, -2), _J(k, 2, -2), _J(k) - _I(k, e)),
        "c6": _col((e, 2), (0, k)),
        "c7": Fraction(-e * (3 * b + 1)),
    }


def _arrow(corner, edge, diag, off, corner_vec, edge_vec, tip, b: int) -> ExactMatrix:
    """Assemble the common (b+2) x (b+2) block pattern shared by D, L, R and C."""
    tipm = ExactMatrix([[tip]])
    rows = [[corner] + [edge] * b + [corner_vec]]
    for i in range(b):
        rows.append([edge.T] + [diag if j == i else off for j in range(b)] + [edge_vec])
    rows.append([corner_vec.T] + [edge_vec.T] * b + [tipm])
    return block_assemble(rows)


@dataclass(frozen=True)
class T6TnMatrices:
    spec: T6TnSpec
    D: ExactMatrix
    L: ExactMatrix
    R: ExactMatrix
    blocks: dict = field(default_factory=dict, repr=False, compare=False)


def build_D(spec: T6TnSpec) -> ExactMatrix:
    d = _d_blocks(spec.n)
    return _arrow(d["D1"], d["D2"], d["D4"], d["D5"], d["d3"], d["d6"], 0, spec.b)


def build_L(spec: T6TnSpec) -> ExactMatrix:
    n, b = spec.n, spec.b
    l = _l_blocks(n)
    return _arrow(l["L1"], _O(5, n - 1), l["L2"], _O(n - 1), l["l1"], l["l2"], 2 * (b + 1), b)


def build_R(spec: T6TnSpec, as_printed: bool = False) -> ExactMatrix:
    r = _r_blocks(spec.n, spec.b, as_printed)
    return _arrow(r["R1"], r["R2"], r["R3"], r["R4"], r["r1"], r["r2"], r["r3"], spec.b)


def build_t6_tn(spec: T6TnSpec) -> T6TnMatrices:
    n, b = spec.n, spec.b
    blocks = {**_d_blocks(n), **_l_blocks(n), **_r_blocks(n, b)}
    return T6TnMatrices(spec, build_D(spec), build_L(spec), build_R(spec), blocks)


# ---------------------------------------------------------------------------
# graph_model bridge
# ---------------------------------------------------------------------------

def as_multiblock_graph(spec: T6TnSpec) -> MultiBlockGraph:
    """The same graph in graph_model's star layout (centre is vertex 0)."""
    return star_of_blocks([tn_spec(6)] + [tn_spec(spec.n)] * spec.b)


def match_t6_tn(g: MultiBlockGraph) -> tuple[T6TnSpec, list[int]] | None:
    """Recognise a T_6 o T_n^(b) graph in any labelling.

    Returns the T6TnSpec and the vertex order (graph ids in the fixed layout),
    or None if ``g`` has a different shape.  A centre sitting at a base
    vertex is rejected outright since no inverse formula is known there.
    """
    if len(g.blocks) < 2:
        return None
    shared = set(g.blocks[0].vertices)
    for blk in g.blocks[1:]:
        shared &= set(blk.vertices)
    if len(shared) != 1:
        return None
    (center,) = shared
    t6 = [t for t, blk in enumerate(g.blocks) if blk.spec.canonical().parts == (1, 1, 4)]
    rest = [t for t in range(len(g.blocks)) if t not in t6[:1]]
    if not t6:
        return None
    sizes = {g.blocks[t].spec.canonical().parts for t in rest}
    if len(sizes) != 1:
        return None
    (parts,) = sizes
    if len(parts) != 3 or parts[:2] != (1, 1) or parts[2] + 2 == 6:
        return None
    order = []
    for t in t6[:1] + rest:
        blk = g.blocks[t]
        cpart = blk.part_index()[center]
        big = max(blk.spec.parts)
        if blk.spec.parts[cpart] != big:
            raise InvalidGraphError("centre is a base vertex; only the large-part gluing is supported")
        base = [v for i, p in enumerate(blk.vertex_ids) if i != cpart for v in p]
        order.extend(base)
        order.extend(v for v in blk.vertex_ids[cpart] if v != center)
    order.append(center)
    return T6TnSpec(parts[2] + 2, len(rest)), order


def vertex_order(spec: T6TnSpec) -> list[int]:
    """``order[i]`` is the graph_model id of the i-th vertex in the fixed layout,
    so ``M_fixed = M_graph.permute(order)``."""
    return match_t6_tn(as_multiblock_graph(spec))[1]


def to_graph_order(M: ExactMatrix, order: list[int]) -> ExactMatrix:
    """Undo ``permute(order)``."""
    inv = [0] * len(order)
    for i, v in enumerate(order):
        inv[v] = i
    return M.permute(inv)


# ---------------------------------------------------------------------------
# determinant and inverse
# ---------------------------------------------------------------------------

def det_t6_tn(spec: T6TnSpec) -> Fraction:
    n, b = spec.n, spec.b
    return Fraction((-1) ** (n * b + 1) * 2 ** ((n - 3) * b + 4) * (n - 6) ** b)


def inverse_t6_tn(spec: T6TnSpec) -> ExactMatrix:
    """``-L/2 + J/(2(b+1)) + R/(2(b+1)(n-6))``."""
    n, b = spec.n, spec.b
    N = spec.order
    return (
        build_L(spec).scale(Fraction(-1, 2))
        + _J(N, N, Fraction(1, 2 * (b + 1)))
        + build_R(spec).scale(Fraction(1, 2 * (b + 1) * (n - 6)))
    )


def c_block_form(spec: T6TnSpec) -> ExactMatrix:
    """C assembled directly from its own block description (second route)."""
    n, b = spec.n, spec.b
    c = _c_blocks(n, b)
    M = _arrow(c["C1"], c["C2"], c["C4"], _O(n - 1), c["c3"], c["c6"], c["c7"], b)
    return M.scale(Fraction(1, 2 * (n - 6)))


@dataclass
class StepReport:
    spec: T6TnSpec
    steps: dict[str, bool]

    @property
    def failures(self) -> list[str]:
        return [k for k, ok in self.steps.items() if not ok]

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_steps(spec: T6TnSpec) -> StepReport:
    """Evaluate the ten block products of ``Y = D C`` (unscaled, so every
    target is ``2(n-6)`` times an identity or zero block)."""
    n, b = spec.n, spec.b
    e2 = 2 * (n - 6)
    d = _d_blocks(n)
    c = _c_blocks(n, b)
    D1, D2, d3, D4, D5, d6 = (d[k] for k in ("D1", "D2", "d3", "D4", "D5", "d6"))
    C1, C2, c3, C4, c6, c7 = (c[k] for k in ("C1", "C2", "c3", "C4", "c6", "c7"))
    k = n - 1
    one = ExactMatrix([[1]])
    steps = {
        "1 (1,1)": D1 @ C1 + (D2 @ C2.T).scale(b) + d3 @ c3.T == _I(5, e2),
        "2 (1,j)": D1 @ C2 + D2 @ C4 + d3 @ c6.T == _O(5, k),
        "3 (1,b+2)": D1 @ c3 + (D2 @ c6).scale(b) + d3.scale(c7) == _O(5, 1),
        "4 (i,1)": D2.T @ C1 + D4 @ C2.T + (D5 @ C2.T).scale(b - 1) + d6 @ c3.T == _O(k, 5),
        "5 (i,i)": D2.T @ C2 + D4 @ C4 + d6 @ c6.T == _I(k, e2),
        "6 (i,j)": D2.T @ C2 + D5 @ C4 + d6 @ c6.T == _O(k),
        "7 (i,b+2)": D2.T @ c3 + D4 @ c6 + (D5 @ c6).scale(b - 1) + d6.scale(c7) == _O(k, 1),
        "8 (b+2,1)": d3.T @ C1 + (d6.T @ C2.T).scale(b) == _O(1, 5),
        "9 (b+2,j)": d3.T @ C2 + d6.T @ C4 == _O(1, k),
        "10 (b+2,b+2)": d3.T @ c3 + (d6.T @ c6).scale(b) == one.scale(e2),
    }
    return StepReport(spec, steps)


@dataclass
class T6TnCheck:
    spec: T6TnSpec
    checks: dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def full_check(spec: T6TnSpec) -> T6TnCheck:
    """Every exact comparison the family supports, against the generic oracles."""
    from .exact_linalg import cofactor_sum
    from .spectral import rank_one_obstruction

    mats = build_t6_tn(spec)
    g = as_multiblock_graph(spec)
    order = vertex_order(spec)
    D, L = mats.D, mats.L
    C = inverse_t6_tn(spec)
    eye = ExactMatrix.identity(spec.order)
    return T6TnCheck(
        spec,
        {
            "D matches BFS": D == bfs_distances(g).permute(order),
            "L matches graph Laplacian": L == graph_laplacian(g).permute(order),
            "det formula = oracle": det_t6_tn(spec) == determinant(D),
            "DC = I": D @ C == eye,
            "CD = I": C @ D == eye,
            "C = printed block form": C == c_block_form(spec),
            "proof steps": verify_steps(spec).ok,
            "cof D = 0": cofactor_sum(D) == 0,
            "rank-one obstruction": rank_one_obstruction(D),
        },
    )
