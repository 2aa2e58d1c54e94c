"""Neighbor maps: the exact rep-tile test and the boundary analysis built on it.

Pieces f_i(A), f_j(A) of the attractor intersect iff A meets gamma(A) for
gamma = h_i^-1 h_j, and the question "does A meet gamma(A)?" reduces to the
same question for the children

    gamma' = h_i^-1 o double(gamma) o h_j      (one child per ordered pair),

where double() keeps the matrix and doubles the translation (conjugation by
the expansion x -> 2x).  Every gamma that can actually touch satisfies
|translation|_inf <= 2R for the bounding radius R, so the candidate set is
finite and the recursion becomes a finite directed graph.  A candidate truly
touches iff an infinite path starts there, i.e. iff it survives repeatedly
deleting nodes without outgoing edges.  The attractor is a genuine rep-tile
iff the identity map is not among the surviving candidates reachable from
the roots h_i^-1 h_j (i != j): an identity there means two pieces of some
level coincide exactly.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InconclusiveError
from .isometry import (
    LatticeIsometry,
    compose,
    group_tables,
    inverse,
    sup_norm,
)
from .system import RepTileSystem, bounding_radius, g_conjugate

DEFAULT_NODE_BUDGET = 200_000

SPECTRAL_TOL = 1e-9
SPECTRAL_MAX_ITER = 10_000

# Compact node encoding used throughout this module: (matrix index, translation).
Node = tuple[int, tuple[int, ...]]


@dataclass(frozen=True, slots=True)
class AnalysisReport:
    """Everything the verifier can say about one system."""

    is_rep_tile: bool
    neighbor_count: int
    boundary_dimension: float | None
    connected: bool
    piece_adjacency: tuple[tuple[bool, ...], ...]
    node_budget_exceeded: bool


class NeighborGraph:
    """Candidate graph produced by :func:`build_graph`.

    Nodes are stored compactly; ``children_flat``/``offsets`` form a CSR-style
    adjacency over node indices (one entry per ordered label pair that stayed
    within the translation bound, so parallel edges carry multiplicity).
    """

    def __init__(self, system: RepTileSystem, radius: int):
        self.system = system
        self.radius = radius
        self.node_keys: list[Node] = []
        self.node_index: dict[Node, int] = {}
        self.offsets = array("q", [0])
        self.children_flat = array("i")
        self.root_count = 0
        self.pruned_edges = 0
        self.node_budget_exceeded = False
        self._alive: np.ndarray | None = None
        self._reachable: np.ndarray | None = None

    # -- sizes ------------------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self.node_keys)

    @property
    def edge_count(self) -> int:
        return len(self.children_flat)

    # -- compact views used by the analyses --------------------------------

    def alive_mask(self) -> np.ndarray:
        if self._alive is None:
            raise InconclusiveError("graph was not trimmed (node budget exceeded)")
        return self._alive

    def reachable_mask(self) -> np.ndarray:
        if self._reachable is None:
            raise InconclusiveError("graph was not trimmed (node budget exceeded)")
        return self._reachable

    def identity_index(self) -> int | None:
        key = (0, (0,) * self.system.dim)  # identity matrix is canonical index 0
        return self.node_index.get(key)

    def reachable_survivor_keys(self) -> list[Node]:
        mask = self.reachable_mask()
        return [self.node_keys[i] for i in range(self.node_count) if mask[i]]

    # -- dataclass views (small graphs, tests, reporting) ------------------

    def _iso(self, key: Node) -> LatticeIsometry:
        tables = group_tables(self.system.dim)
        return LatticeIsometry(tables.matrices[key[0]], key[1])

    @property
    def nodes(self) -> frozenset[LatticeIsometry]:
        return frozenset(self._iso(k) for k in self.node_keys)

    @property
    def roots(self) -> frozenset[LatticeIsometry]:
        return frozenset(self._iso(k) for k in self.node_keys[: self.root_count])

    @property
    def survivors(self) -> frozenset[LatticeIsometry]:
        mask = self.alive_mask()
        return frozenset(
            self._iso(self.node_keys[i]) for i in range(self.node_count) if mask[i]
        )

    @property
    def reachable_survivors(self) -> frozenset[LatticeIsometry]:
        return frozenset(self._iso(k) for k in self.reachable_survivor_keys())


def _compiled_maps(s: RepTileSystem):
    tables = group_tables(s.dim)
    return tables, [
        (tables.matrix_index(h.matrix), h.translation) for h in s.maps
    ]


def root_candidates(s: RepTileSystem) -> set[LatticeIsometry]:
    """All h_i^-1 h_j for i != j within the translation bound 2R."""
    bound = 2 * bounding_radius(s)
    out = set()
    for i, hi in enumerate(s.maps):
        hi_inv = inverse(hi)
        for j, hj in enumerate(s.maps):
            if i == j:
                continue
            gamma = compose(hi_inv, hj)
            if sup_norm(gamma.translation) <= bound:
                out.add(gamma)
    return out


@dataclass(frozen=True, slots=True)
class ChildSet:
    kept: tuple[tuple[tuple[int, int], LatticeIsometry], ...]
    pruned: int


def children(s: RepTileSystem, gamma: LatticeIsometry) -> ChildSet:
    """One child h_i^-1 o double(gamma) o h_j per ordered label pair (i, j).

    Children whose translation leaves the 2R ball cannot correspond to
    touching pieces and are dropped; the count of dropped ones is returned.
    """
    bound = 2 * bounding_radius(s)
    doubled = g_conjugate(gamma)
    kept = []
    pruned = 0
    for i, hi in enumerate(s.maps):
        left = compose(inverse(hi), doubled)
        for j, hj in enumerate(s.maps):
            child = compose(left, hj)
            if sup_norm(child.translation) <= bound:
                kept.append(((i, j), child))
            else:
                pruned += 1
    return ChildSet(tuple(kept), pruned)


def build_graph(s: RepTileSystem, node_budget: int = DEFAULT_NODE_BUDGET) -> NeighborGraph:
    """Breadth-first closure of the roots under the child recursion, then trim.

    The output is independent of scheduling: nodes are indexed in discovery
    order (roots first, sorted), and the adjacency is a pure function of the
    system.  Exceeding ``node_budget`` aborts the closure and flags the graph
    as inconclusive instead of guessing.
    """
    if node_budget < 1:
        raise ValueError("node_budget must be >= 1")
    tables, maps_c = _compiled_maps(s)
    m = s.m
    dim = s.dim
    radius = bounding_radius(s)
    bound = 2 * radius
    graph = NeighborGraph(s, radius)

    act = tables.act
    ct = tables.compose
    inv = tables.inverse

    # Roots h_i^-1 h_j, i != j (the bound never excludes a root, but keep the
    # filter as a guard for future generalizations).
    roots = set()
    for i, (mi, vi) in enumerate(maps_c):
        ii = inv[mi]
        vi_ = act(ii, vi)
        for j, (mj, vj) in enumerate(maps_c):
            if i == j:
                continue
            key = (ct[ii][mj], tuple(a - b for a, b in zip(act(ii, vj), vi_)))
            if sup_norm(key[1]) <= bound:
                roots.add(key)

    node_keys = graph.node_keys
    node_index = graph.node_index
    for key in sorted(roots):
        node_index[key] = len(node_keys)
        node_keys.append(key)
    graph.root_count = len(node_keys)
    if len(node_keys) > node_budget:
        graph.node_budget_exceeded = True
        return graph

    # Per matrix-index expansion recipe: for each (i, j) the child matrix and
    # the translation offset that does not depend on the node's translation.
    recipe_cache: dict[int, list] = {}

    def recipe(mg: int):
        rows = []
        for i, (mi, vi) in enumerate(maps_c):
            ii = inv[mi]
            pairs = []
            for j, (mj, vj) in enumerate(maps_c):
                cmat = ct[ii][ct[mg][mj]]
                base = act(ii, tuple(a - b for a, b in zip(act(mg, vj), vi)))
                pairs.append((cmat, base))
            rows.append((ii, pairs))
        return rows

    offsets = graph.offsets
    flat = graph.children_flat
    pruned = 0
    cursor = 0
    while cursor < len(node_keys):
        mg, t = node_keys[cursor]
        rows = recipe_cache.get(mg)
        if rows is None:
            rows = recipe_cache[mg] = recipe(mg)
        t2 = tuple(2 * c for c in t)
        for ii, pairs in rows:
            shift = act(ii, t2)
            for cmat, base in pairs:
                cvec = tuple(a + b for a, b in zip(base, shift))
                if sup_norm(cvec) > bound:
                    pruned += 1
                    continue
                ckey = (cmat, cvec)
                idx = node_index.get(ckey)
                if idx is None:
                    idx = len(node_keys)
                    if idx >= node_budget:
                        graph.pruned_edges = pruned
                        graph.node_budget_exceeded = True
                        return graph
                    node_index[ckey] = idx
                    node_keys.append(ckey)
                flat.append(idx)
        offsets.append(len(flat))
        cursor += 1

    graph.pruned_edges = pruned
    _trim_and_mark(graph)
    return graph


def _trim_and_mark(graph: NeighborGraph) -> None:
    """Trim to the greatest fixed point and mark reachability from the roots."""
    n = graph.node_count
    flat = np.frombuffer(graph.children_flat, dtype=np.int32) if n else np.empty(0, np.int32)
    offsets = np.frombuffer(graph.offsets, dtype=np.int64)
    counts = np.diff(offsets)
    row_ids = np.repeat(np.arange(n, dtype=np.int32), counts)

    alive = np.ones(n, dtype=bool)
    while True:
        edge_alive = alive[flat]
        outdeg = np.bincount(row_ids[edge_alive], minlength=n)
        dead = alive & (outdeg == 0)
        if not dead.any():
            break
        alive &= ~dead
    graph._alive = alive

    reachable = np.zeros(n, dtype=bool)
    frontier = [i for i in range(graph.root_count) if alive[i]]
    for i in frontier:
        reachable[i] = True
    off = graph.offsets
    ch = graph.children_flat
    while frontier:
        nxt = []
        for u in frontier:
            for p in range(off[u], off[u + 1]):
                c = ch[p]
                if alive[c] and not reachable[c]:
                    reachable[c] = True
                    nxt.append(c)
        frontier = nxt
    graph._reachable = reachable


def decide_rep_tile(graph: NeighborGraph) -> bool:
    """True iff the identity is not a reachable survivor.

    Raises :class:`InconclusiveError` when the closure was cut off by the
    node budget; that is explicitly not a "no".
    """
    if graph.node_budget_exceeded:
        raise InconclusiveError(
            f"node budget exhausted after {graph.node_count} nodes; verdict unknown"
        )
    idx = graph.identity_index()
    return idx is None or not graph.reachable_mask()[idx]


def neighbor_count(graph: NeighborGraph) -> int:
    """Number of reachable surviving neighbor maps, identity excluded."""
    mask = graph.reachable_mask()
    count = int(mask.sum())
    idx = graph.identity_index()
    if idx is not None and mask[idx]:
        count -= 1
    return count


def _power_radius(block) -> float:
    """Spectral radius of one irreducible nonnegative block.

    Power iteration on block + I (primitive, so the Collatz-Wielandt ratio
    bounds close geometrically), started from the uniform vector.  Returns
    the certified value once the enclosure is tighter than the relative
    tolerance; the +I shift is subtracted again.
    """
    k = block.shape[0]
    x = np.full(k, 1.0 / k)
    lo = hi = 0.0
    for _ in range(SPECTRAL_MAX_ITER):
        y = x + block @ x
        ratios = y / x
        lo = float(ratios.min())
        hi = float(ratios.max())
        if hi - lo <= SPECTRAL_TOL * lo:
            return 0.5 * (lo + hi) - 1.0
        x = y / y.sum()
    raise ConvergenceError(
        f"power iteration did not converge in {SPECTRAL_MAX_ITER} iterations",
        last_estimate=0.5 * (lo + hi) - 1.0,
    )


def boundary_dimension(graph: NeighborGraph) -> float:
    """log2 of the spectral radius of the boundary substitution matrix.

    The matrix counts, for each reachable surviving gamma, how many label
    pairs lead to each reachable surviving child.  Its spectral radius is
    the maximum over the strongly connected components of the edge relation;
    iterating per component sidesteps the 1/k-slow convergence that chained
    components of equal radius inflict on the whole matrix.
    """
    from scipy import sparse
    from scipy.sparse import csgraph

    mask = graph.reachable_mask()
    ids = np.flatnonzero(mask)
    k = len(ids)
    if k == 0:
        return 0.0
    dense_pos = np.full(graph.node_count, -1, dtype=np.int64)
    dense_pos[ids] = np.arange(k)

    rows = []
    cols = []
    off = graph.offsets
    ch = graph.children_flat
    for u in ids:
        ru = dense_pos[u]
        for p in range(off[u], off[u + 1]):
            c = ch[p]
            if mask[c]:
                rows.append(ru)
                cols.append(dense_pos[c])
    data = np.ones(len(rows), dtype=np.float64)
    b = sparse.csr_matrix(
        (data, (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
        shape=(k, k),
    )  # duplicate (row, col) pairs sum to the edge multiplicity

    n_comp, labels = csgraph.connected_components(b, directed=True, connection="strong")
    radius = 0.0
    for comp in range(n_comp):
        sel = np.flatnonzero(labels == comp)
        sub = b[sel][:, sel]
        if sub.nnz == 0:
            continue  # nilpotent singleton, contributes 0
        radius = max(radius, _power_radius(sub))
    # Every survivor keeps an outgoing edge, so some cycle exists and radius >= 1.
    return float(np.log2(radius)) if radius > 0 else 0.0


def hata_connected(graph: NeighborGraph) -> tuple[bool, tuple[tuple[bool, ...], ...]]:
    """Connectedness of the attractor via the piece-intersection graph.

    Pieces i and j touch iff h_i^-1 h_j is a reachable survivor (or i = j);
    the attractor is connected iff that graph on the m pieces is connected.
    """
    s = graph.system
    tables, maps_c = _compiled_maps(s)
    ct = tables.compose
    inv = tables.inverse
    act = tables.act
    mask = graph.reachable_mask()
    m = s.m

    adj = [[False] * m for _ in range(m)]
    for i, (mi, vi) in enumerate(maps_c):
        ii = inv[mi]
        vi_ = act(ii, vi)
        adj[i][i] = True
        for j, (mj, vj) in enumerate(maps_c):
            if i == j:
                continue
            key = (ct[ii][mj], tuple(a - b for a, b in zip(act(ii, vj), vi_)))
            idx = graph.node_index.get(key)
            if idx is not None and mask[idx]:
                adj[i][j] = True

    seen = [False] * m
    stack = [0]
    seen[0] = True
    while stack:
        u = stack.pop()
        for v in range(m):
            if adj[u][v] and not seen[v]:
                seen[v] = True
                stack.append(v)
    return all(seen), tuple(tuple(row) for row in adj)


def overlap_oracle(s: RepTileSystem, max_len: int) -> bool:
    """One-sided exact overlap test via word-map collisions.

    True iff two distinct words of equal length n <= max_len have the same
    word map; then two level-n pieces coincide exactly, so the system cannot
    be a rep-tile.  False proves nothing.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    tables, maps_c = _compiled_maps(s)
    ct = tables.compose
    act = tables.act

    level: list[Node] = []
    seen: set[Node] = set()
    for mk, vk in maps_c:
        key = (mk, vk)
        if key in seen:
            return True
        seen.add(key)
        level.append(key)

    for _ in range(1, max_len):
        nxt: list[Node] = []
        seen = set()
        for mg, t in level:
            t2 = tuple(2 * c for c in t)
            for mk, vk in maps_c:
                key = (ct[mg][mk], tuple(a + b for a, b in zip(act(mg, vk), t2)))
                if key in seen:
                    return True
                seen.add(key)
                nxt.append(key)
        level = nxt
    return False


def analyze(s: RepTileSystem, node_budget: int = DEFAULT_NODE_BUDGET) -> AnalysisReport:
    """Run the full pipeline on one system and collect the report."""
    graph = build_graph(s, node_budget=node_budget)
    if graph.node_budget_exceeded:
        return AnalysisReport(
            is_rep_tile=False,
            neighbor_count=0,
            boundary_dimension=None,
            connected=False,
            piece_adjacency=(),
            node_budget_exceeded=True,
        )
    is_tile = decide_rep_tile(graph)
    count = neighbor_count(graph)
    connected, adjacency = hata_connected(graph)
    bdim = boundary_dimension(graph) if is_tile else None
    return AnalysisReport(
        is_rep_tile=is_tile,
        neighbor_count=count,
        boundary_dimension=bdim,
        connected=connected,
        piece_adjacency=adjacency,
        node_budget_exceeded=False,
    )
