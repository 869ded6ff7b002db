"""Complete multipartite blocks glued at cut vertices.

A :class:`MultiBlockGraph` is a list of blocks, each a complete
multipartite graph placed on global vertex ids ``0..N-1``.  Two blocks
share at most one vertex and the block/vertex incidence structure is a
tree (the block-cut tree).

The distance matrix is produced three ways: straight from the block form
of a single multipartite block, by BFS over the union of block edges, and
by walking the block-cut tree.  The last two must always agree.
"""

from __future__ import annotations

import json
import random
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .exact_linalg import ExactMatrix, block_assemble


class InvalidGraphError(ValueError):
    """A spec or graph violates its structural invariants."""


@dataclass(frozen=True)
class MultipartiteSpec:
    """Part sizes ``(n_1, ..., n_m)`` of a complete multipartite graph."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        if len(parts) < 2:
            raise InvalidGraphError(f"need at least two parts, got {parts}")
        if any(p < 1 for p in parts):
            raise InvalidGraphError(f"part sizes must be positive, got {parts}")

    @property
    def m(self) -> int:
        return len(self.parts)

    @property
    def order(self) -> int:
        return sum(self.parts)

    def canonical(self) -> "MultipartiteSpec":
        return MultipartiteSpec(tuple(sorted(self.parts)))

    def part_of(self) -> list[int]:
        """Part index of every vertex in block-local order."""
        return [i for i, n in enumerate(self.parts) for _ in range(n)]

    def __str__(self) -> str:
        return "K_{" + ",".join(map(str, self.parts)) + "}"


def as_spec(x: MultipartiteSpec | Iterable[int] | str) -> MultipartiteSpec:
    if isinstance(x, MultipartiteSpec):
        return x
    if isinstance(x, str):
        return parse_spec(x)
    return MultipartiteSpec(tuple(x))


def parse_spec(text: str) -> MultipartiteSpec:
    """``"2,3"``, ``"(1,1,4)"``, ``"K_{2,3}"``, ``"K4"`` (complete) or ``"T7"``."""
    s = text.strip().replace(" ", "")
    m = re.fullmatch(r"K_?(\d+)", s)
    if m:
        return complete(int(m.group(1)))
    m = re.fullmatch(r"T_?(\d+)", s)
    if m:
        return tn_spec(int(m.group(1)))
    s = re.sub(r"^K_?\{(.*)\}$", r"\1", s).strip("()[]")
    try:
        return MultipartiteSpec(tuple(int(t) for t in s.split(",") if t))
    except ValueError as exc:
        raise InvalidGraphError(f"cannot parse spec {text!r}") from exc


def complete(m: int) -> MultipartiteSpec:
    """``K_m`` as the all-ones spec."""
    return MultipartiteSpec((1,) * m)


def tn_spec(n: int) -> MultipartiteSpec:
    """``T_n = K_{1,1,n-2}``: n-2 triangles on a common base edge."""
    if n < 3:
        raise InvalidGraphError("T_n needs n >= 3")
    return MultipartiteSpec((1, 1, n - 2))


@dataclass(frozen=True)
class BlockPlacement:
    spec: MultipartiteSpec
    vertex_ids: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        ids = tuple(tuple(int(v) for v in part) for part in self.vertex_ids)
        object.__setattr__(self, "vertex_ids", ids)
        if len(ids) != self.spec.m or any(len(p) != n for p, n in zip(ids, self.spec.parts)):
            raise InvalidGraphError(f"vertex ids {ids} do not match part sizes {self.spec.parts}")
        flat = self.vertices
        if len(set(flat)) != len(flat):
            raise InvalidGraphError(f"repeated vertex inside a block: {ids}")

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(v for part in self.vertex_ids for v in part)

    def part_index(self) -> dict[int, int]:
        return {v: i for i, part in enumerate(self.vertex_ids) for v in part}

    @classmethod
    def from_parts(cls, parts: Sequence[Sequence[int]]) -> "BlockPlacement":
        return cls(MultipartiteSpec(tuple(len(p) for p in parts)), tuple(map(tuple, parts)))


@dataclass(frozen=True)
class MultiBlockGraph:
    vertex_count: int
    blocks: tuple[BlockPlacement, ...]
    _memberships: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        mem: list[list[tuple[int, int]]] = [[] for _ in range(self.vertex_count)]
        for t, blk in enumerate(self.blocks):
            for i, part in enumerate(blk.vertex_ids):
                for v in part:
                    if not 0 <= v < self.vertex_count:
                        raise InvalidGraphError(f"vertex id {v} outside 0..{self.vertex_count - 1}")
                    mem[v].append((t, i))
        object.__setattr__(self, "_memberships", tuple(tuple(x) for x in mem))

    @property
    def b(self) -> int:
        return len(self.blocks)

    def memberships(self, v: int) -> tuple[tuple[int, int], ...]:
        """``(block index, part index)`` for every block containing ``v``."""
        return self._memberships[v]

    def block_count(self, v: int) -> int:
        return len(self._memberships[v])

    def cut_vertices(self) -> list[int]:
        return [v for v in range(self.vertex_count) if len(self._memberships[v]) > 1]

    def edges(self) -> list[tuple[int, int]]:
        out = set()
        for blk in self.blocks:
            for i, pi in enumerate(blk.vertex_ids):
                for pj in blk.vertex_ids[i + 1 :]:
                    for u in pi:
                        for v in pj:
                            out.add((min(u, v), max(u, v)))
        return sorted(out)

    def to_json(self) -> dict:
        return {
            "vertex_count": self.vertex_count,
            "blocks": [{"parts": [list(p) for p in blk.vertex_ids]} for blk in self.blocks],
        }

    @classmethod
    def from_json(cls, obj: dict | str) -> "MultiBlockGraph":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            blocks = tuple(BlockPlacement.from_parts(b["parts"]) for b in obj["blocks"])
            return cls(int(obj["vertex_count"]), blocks)
        except (KeyError, TypeError) as exc:
            raise InvalidGraphError(f"malformed graph JSON: {exc}") from exc


@dataclass
class ValidationReport:
    ok: bool
    violations: list[str]
    cut_vertices: list[int]
    block_tree: list[tuple[int, int]]  # (block index, cut vertex) incidences


def validate(g: MultiBlockGraph) -> ValidationReport:
    """Check the multi-block invariants and describe the block-cut tree."""
    violations = []
    n = g.vertex_count
    for v in range(n):
        if not g.memberships(v):
            violations.append(f"vertex {v} belongs to no block")
    vsets = [set(blk.vertices) for blk in g.blocks]
    for s in range(g.b):
        for t in range(s + 1, g.b):
            shared = vsets[s] & vsets[t]
            if len(shared) > 1:
                violations.append(f"blocks {s} and {t} share {len(shared)} vertices {sorted(shared)}")

    # block/vertex incidence graph must be a tree
    parent = list(range(g.b + n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    cycle = False
    for t, s in enumerate(vsets):
        for v in s:
            a, c = find(t), find(g.b + v)
            if a == c:
                cycle = True
            else:
                parent[a] = c
    if cycle:
        violations.append("blocks form a cycle (incidence structure is not a tree)")
    roots = {find(x) for x in range(g.b + n) if x < g.b or g.memberships(x - g.b)}
    if len(roots) > 1:
        violations.append(f"graph is disconnected ({len(roots)} components)")
    if g.b == 0:
        violations.append("graph has no blocks")

    cuts = g.cut_vertices()
    tree = [(t, v) for v in cuts for t, _ in g.memberships(v)]
    return ValidationReport(not violations, violations, cuts, tree)


def check(g: MultiBlockGraph) -> MultiBlockGraph:
    rep = validate(g)
    if not rep.ok:
        raise InvalidGraphError("; ".join(rep.violations))
    return g


# ---------------------------------------------------------------------------
# distance matrices
# ---------------------------------------------------------------------------

def build_multipartite(spec: MultipartiteSpec | Iterable[int]) -> ExactMatrix:
    """Block form: ``2(J - I)`` on diagonal blocks, ``J`` off the diagonal."""
    spec = as_spec(spec)
    grid = []
    for i, ni in enumerate(spec.parts):
        row = []
        for j, nj in enumerate(spec.parts):
            if i == j:
                row.append((ExactMatrix.ones(ni) - ExactMatrix.identity(ni)).scale(2))
            else:
                row.append(ExactMatrix.ones(ni, nj))
        grid.append(row)
    return block_assemble(grid)


def single_block(spec: MultipartiteSpec | Iterable[int]) -> MultiBlockGraph:
    spec = as_spec(spec)
    ids, k = [], 0
    for n in spec.parts:
        ids.append(tuple(range(k, k + n)))
        k += n
    return MultiBlockGraph(k, (BlockPlacement(spec, tuple(ids)),))


def _matrix(dist: list[list[int]]) -> ExactMatrix:
    cache: dict[int, Fraction] = {}
    rows = tuple(tuple(cache.setdefault(d, Fraction(d)) for d in r) for r in dist)
    return ExactMatrix._wrap(rows, len(dist))


def bfs_distances(g: MultiBlockGraph) -> ExactMatrix:
    """All-pairs shortest paths by BFS over the union of block edges."""
    n = g.vertex_count
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in g.edges():
        adj[u].append(v)
        adj[v].append(u)
    dist = []
    for s in range(n):
        d = [-1] * n
        d[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for w in adj[u]:
                if d[w] < 0:
                    d[w] = d[u] + 1
                    q.append(w)
        if min(d, default=0) < 0:
            raise InvalidGraphError(f"graph is disconnected (vertex {d.index(-1)} unreachable from {s})")
        dist.append(d)
    return _matrix(dist)


def block_path_distances(g: MultiBlockGraph) -> ExactMatrix:
    """Distances as sums of within-block distances along block-cut tree paths."""
    check(g)
    n = g.vertex_count
    part_maps = [blk.part_index() for blk in g.blocks]
    dist = []
    for s in range(n):
        d = [-1] * n
        d[s] = 0
        # stack of (block, entry vertex) still to expand
        stack = [(t, s) for t, _ in g.memberships(s)]
        seen_blocks = {t for t, _ in stack}
        while stack:
            t, entry = stack.pop()
            pm = part_maps[t]
            base = d[entry]
            pe = pm[entry]
            for v, pv in pm.items():
                if v == entry:
                    continue
                d[v] = base + (2 if pv == pe else 1)
                for t2, _ in g.memberships(v):
                    if t2 not in seen_blocks:
                        seen_blocks.add(t2)
                        stack.append((t2, v))
        dist.append(d)
    return _matrix(dist)


def distance_matrix(g: MultiBlockGraph) -> ExactMatrix:
    return block_path_distances(g)


def graph_laplacian(g: MultiBlockGraph) -> ExactMatrix:
    """Degree diagonal minus adjacency."""
    n = g.vertex_count
    L = [[0] * n for _ in range(n)]
    for u, v in g.edges():
        L[u][v] = L[v][u] = -1
        L[u][u] += 1
        L[v][v] += 1
    return ExactMatrix(L, cols=n)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def tree_from_edges(edges: Sequence[tuple[int, int]], n: int | None = None) -> MultiBlockGraph:
    """A tree as ``n - 1`` blocks of ``K_2``."""
    if n is None:
        n = 1 + max((max(e) for e in edges), default=0)
    blocks = tuple(BlockPlacement(MultipartiteSpec((1, 1)), ((u,), (v,))) for u, v in edges)
    return MultiBlockGraph(n, blocks)


def star_of_blocks(
    specs: Sequence[MultipartiteSpec | Iterable[int]],
    center_parts: Sequence[int] | None = None,
) -> MultiBlockGraph:
    """Glue blocks at a single shared vertex (id 0).

    ``center_parts[t]`` picks the part of block ``t`` holding the shared
    vertex; by default the last part, which for ``T_n`` is the large part.
    """
    specs = [as_spec(s) for s in specs]
    if center_parts is None:
        center_parts = [s.m - 1 for s in specs]
    nxt = 1
    blocks = []
    for spec, cp in zip(specs, center_parts):
        ids = []
        for i, size in enumerate(spec.parts):
            if i == cp:
                ids.append((0,) + tuple(range(nxt, nxt + size - 1)))
                nxt += size - 1
            else:
                ids.append(tuple(range(nxt, nxt + size)))
                nxt += size
        blocks.append(BlockPlacement(spec, tuple(ids)))
    return MultiBlockGraph(nxt, tuple(blocks))


def attach_block(
    g: MultiBlockGraph, spec: MultipartiteSpec | Iterable[int], at: int, part: int
) -> MultiBlockGraph:
    """Add a block sharing vertex ``at`` (placed in ``part``); other vertices are new."""
    spec = as_spec(spec)
    nxt = g.vertex_count
    ids = []
    for i, size in enumerate(spec.parts):
        if i == part:
            ids.append((at,) + tuple(range(nxt, nxt + size - 1)))
            nxt += size - 1
        else:
            ids.append(tuple(range(nxt, nxt + size)))
            nxt += size
    return MultiBlockGraph(nxt, g.blocks + (BlockPlacement(spec, tuple(ids)),))


def random_spec(rng: random.Random, max_order: int, max_parts: int = 4, max_part: int = 6) -> MultipartiteSpec:
    while True:
        m = rng.randint(2, max_parts)
        parts = tuple(rng.randint(1, max_part) for _ in range(m))
        if sum(parts) <= max_order:
            return MultipartiteSpec(parts)


def random_multiblock(
    rng: random.Random,
    max_vertices: int = 30,
    max_blocks: int = 6,
    accept_spec=None,
) -> MultiBlockGraph:
    """Random block-cut tree; ``accept_spec`` filters candidate blocks."""

    def draw(budget):
        for _ in range(200):
            s = random_spec(rng, budget, max_part=min(6, budget))
            if accept_spec is None or accept_spec(s):
                return s
        return None

    first = draw(max_vertices)
    if first is None:
        raise RuntimeError("no acceptable block spec found")
    g = single_block(first)
    target = rng.randint(1, max_blocks)
    while g.b < target:
        budget = max_vertices - g.vertex_count + 1
        if budget < 2:
            break
        s = draw(budget)
        if s is None:
            break
        g = attach_block(g, s, rng.randrange(g.vertex_count), rng.randrange(s.m))
    # relabel so vertex ids are not trivially ordered by block
    perm = list(range(g.vertex_count))
    rng.shuffle(perm)
    return relabel(g, perm)


def relabel(g: MultiBlockGraph, perm: Sequence[int]) -> MultiBlockGraph:
    """Vertex ``v`` becomes ``perm[v]``."""
    blocks = tuple(
        BlockPlacement(blk.spec, tuple(tuple(perm[v] for v in part) for part in blk.vertex_ids))
        for blk in g.blocks
    )
    return MultiBlockGraph(g.vertex_count, blocks)


def parse_graph_spec(text: str) -> MultiBlockGraph:
    """Graph from a JSON file/literal, a composition, or a generator shortcut.

    Shortcuts: ``tree:0-1,1-2,1-3``, ``star_of_blocks:1,1,5x3``,
    ``t6_tn:7,2``.  A bare composition like ``2,3`` is a single block.
    """
    s = text.strip()
    if s.startswith("{"):
        return check(MultiBlockGraph.from_json(s))
    if s.startswith("tree:"):
        body = s[5:]
        try:
            edges = [tuple(int(x) for x in e.split("-")) for e in body.split(",") if e]
        except ValueError as exc:
            raise InvalidGraphError(f"bad tree edge list {body!r}") from exc
        if any(len(e) != 2 for e in edges):
            raise InvalidGraphError(f"bad tree edge list {body!r}")
        return check(tree_from_edges(edges))
    if s.startswith("star_of_blocks:"):
        body = s[len("star_of_blocks:"):]
        m = re.fullmatch(r"(.+)x(\d+)", body)
        if not m:
            raise InvalidGraphError(f"expected <spec>x<b>, got {body!r}")
        return star_of_blocks([parse_spec(m.group(1))] * int(m.group(2)))
    if s.startswith("t6_tn:"):
        from .t6_family import T6TnSpec, as_multiblock_graph

        try:
            n, b = (int(x) for x in s[6:].split(","))
        except ValueError as exc:
            raise InvalidGraphError(f"expected t6_tn:<n>,<b>, got {s!r}") from exc
        return as_multiblock_graph(T6TnSpec(n, b))
    p = Path(s)
    if s.endswith(".json") or (p.exists() and p.is_file()):
        try:
            return check(MultiBlockGraph.from_json(p.read_text()))
        except OSError as exc:
            raise InvalidGraphError(f"cannot read {s}: {exc}") from exc
    return single_block(parse_spec(s))


def graham_compose(g: MultiBlockGraph) -> tuple[Fraction, Fraction]:
    """``(det D(G), cof D(G))`` from per-block closed forms.

    cof is the product of block cofactors; det is
    ``sum_i det_i * prod_{j != i} cof_j``.
    """
    from .closed_forms import cof_closed, det_closed

    check(g)
    dets = [det_closed(blk.spec) for blk in g.blocks]
    cofs = [cof_closed(blk.spec) for blk in g.blocks]
    cof = Fraction(1)
    for c in cofs:
        cof *= c
    det = Fraction(0)
    for i, d in enumerate(dets):
        term = d
        for j, c in enumerate(cofs):
            if j != i:
                term *= c
        det += term
    return det, cof
