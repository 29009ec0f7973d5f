"""Finite connected metric multigraphs with exact Scalar edge lengths.

Loops and parallel edges are allowed everywhere.  Directions never exist on
edges themselves; directed behaviour is expressed through germs, pairs
``(edge, end)`` naming the departure end of an edge (a loop contributes two
germs at its vertex).

All decisions (orderings in Dijkstra, girth minimisation, the point-diameter
maximisation) go through the certified comparisons of the scalars module; an
undecidable comparison surfaces as PrecisionExhausted instead of a wrong
answer.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from ._rat import Rat, rat_str
from .errors import (
    DisconnectedGraph,
    EnumerationCapExceeded,
    GraphFormatError,
    HypothesisViolation,
    NonpositiveLength,
    PrecisionExhausted,
)
from .scalars import Comparison, Scalar, SymbolTable, format_scalar, parse_scalar

DEFAULT_CYCLE_CAP = 10**6


class Edge:
    __slots__ = ("id", "u", "v", "length")

    def __init__(self, eid: str, u: str, v: str, length: Scalar):
        self.id = eid
        self.u = u
        self.v = v
        self.length = length

    def other(self, vertex: str) -> str:
        return self.v if vertex == self.u else self.u

    def is_loop(self) -> bool:
        return self.u == self.v

    def __repr__(self) -> str:
        return f"Edge({self.id}: {self.u}-{self.v}, {format_scalar(self.length)})"


# A germ is (edge, end) with end 0 when departing from edge.u and 1 from
# edge.v; germs are the unit of "direction" everywhere below.
Germ = tuple


def germ_source(g: Germ) -> str:
    e, end = g
    return e.u if end == 0 else e.v


def germ_target(g: Germ) -> str:
    e, end = g
    return e.v if end == 0 else e.u


def reverse_germ(g: Germ) -> Germ:
    return (g[0], 1 - g[1])


class MetricGraph:
    def __init__(self, table: SymbolTable):
        self.table = table
        self.vertices: list[str] = []
        self._vset: set[str] = set()
        self.edges: list[Edge] = []
        self.edge_by_id: dict[str, Edge] = {}
        self.subgraph_decls: dict[str, tuple[str, ...]] = {}
        self._germs: dict[str, list[Germ]] = {}

    # -- construction -------------------------------------------------------

    def add_vertex(self, name: str) -> None:
        if name in self._vset:
            raise GraphFormatError(f"duplicate vertex: {name}")
        self.vertices.append(name)
        self._vset.add(name)
        self._germs[name] = []

    def add_edge(self, eid: str, u: str, v: str, length: Scalar) -> Edge:
        if eid in self.edge_by_id:
            raise GraphFormatError(f"duplicate edge: {eid}")
        for w in (u, v):
            if w not in self._vset:
                raise GraphFormatError(f"edge {eid} references unknown vertex {w}")
        sign = self.table.sign(length)
        if sign is Comparison.INDETERMINATE:
            raise PrecisionExhausted(f"cannot certify positivity of edge {eid}")
        if sign is not Comparison.GREATER:
            raise NonpositiveLength(f"edge {eid} has nonpositive length")
        edge = Edge(eid, u, v, length)
        self.edges.append(edge)
        self.edge_by_id[eid] = edge
        self._germs[u].append((edge, 0))
        self._germs[v].append((edge, 1))
        return edge

    def declare_subgraph(self, name: str, edge_ids: Sequence[str]) -> None:
        if name in self.subgraph_decls:
            raise GraphFormatError(f"duplicate subgraph: {name}")
        for eid in edge_ids:
            if eid not in self.edge_by_id:
                raise GraphFormatError(f"subgraph {name} references unknown edge {eid}")
        self.subgraph_decls[name] = tuple(edge_ids)

    def validate(self) -> None:
        if not self.vertices:
            raise GraphFormatError("graph has no vertices")
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            x = stack.pop()
            for g in self._germs[x]:
                y = germ_target(g)
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != len(self.vertices):
            missing = sorted(self._vset - seen)
            raise DisconnectedGraph(f"unreachable vertices: {', '.join(missing)}")

    # -- views ---------------------------------------------------------------

    def germs_at(self, vertex: str) -> list[Germ]:
        return self._germs[vertex]

    def degree(self, vertex: str) -> int:
        return len(self._germs[vertex])

    def whole(self) -> "Subgraph":
        return Subgraph(self, tuple(e.id for e in self.edges))

    def subgraph(self, name: str) -> "Subgraph":
        if name not in self.subgraph_decls:
            raise KeyError(f"no subgraph named {name}")
        return Subgraph(self, self.subgraph_decls[name])

    def vertex_order(self, name: str) -> int:
        return self.vertices.index(name)


class Subgraph:
    """An edge-id subset of a MetricGraph with the induced vertex set."""

    def __init__(self, graph: MetricGraph, edge_ids: Sequence[str]):
        self.graph = graph
        self.edge_ids = tuple(dict.fromkeys(edge_ids))
        self.edge_set = frozenset(self.edge_ids)
        verts = []
        for eid in self.edge_ids:
            e = graph.edge_by_id[eid]
            for w in (e.u, e.v):
                if w not in verts:
                    verts.append(w)
        self.vertices = tuple(sorted(verts, key=graph.vertex_order))
        self._vset = frozenset(verts)

    def edges(self) -> list[Edge]:
        return [self.graph.edge_by_id[eid] for eid in self.edge_ids]

    def has_vertex(self, v: str) -> bool:
        return v in self._vset

    def germs_at(self, vertex: str) -> list[Germ]:
        return [g for g in self.graph.germs_at(vertex) if g[0].id in self.edge_set]

    def degree(self, vertex: str) -> int:
        return len(self.germs_at(vertex))

    def min_degree(self) -> tuple[int, Optional[str]]:
        best, arg = None, None
        for v in self.vertices:
            d = self.degree(v)
            if best is None or d < best:
                best, arg = d, v
        return (best if best is not None else 0), arg


@dataclass(frozen=True)
class PointOnGraph:
    """A point on an edge: offset along the edge from its u end."""

    edge_id: str
    forward: bool
    offset: Scalar

    @staticmethod
    def make(graph: MetricGraph, edge_id: str, offset: Scalar, forward: bool = True) -> "PointOnGraph":
        edge = graph.edge_by_id[edge_id]
        if not forward:
            offset = edge.length - offset
        return PointOnGraph(edge_id, True, offset)

    def as_vertex(self, graph: MetricGraph) -> Optional[str]:
        edge = graph.edge_by_id[self.edge_id]
        if not self.offset.coeffs:
            return edge.u
        if self.offset == edge.length:
            return edge.v
        return None


# ---------------------------------------------------------------------------
# shortest paths
# ---------------------------------------------------------------------------


class _Key:
    """Heap ordering adapter; raises when the order is not certified."""

    __slots__ = ("scalar",)

    def __init__(self, scalar: Scalar):
        self.scalar = scalar

    def __lt__(self, other: "_Key") -> bool:
        cmp = self.scalar.table.compare(self.scalar, other.scalar)
        if cmp is Comparison.INDETERMINATE:
            raise PrecisionExhausted("tie in shortest-path ordering undecidable")
        return cmp is Comparison.LESS


@dataclass
class SourceTree:
    """Single-source result: exact distances plus path multiplicity info."""

    source: str
    dist: dict
    pred: dict  # vertex -> canonical predecessor germ (arrival germ)
    counts: dict  # vertex -> number of shortest paths, saturated at 2

    def path_to(self, v: str) -> list[Germ]:
        """The canonical shortest path as a germ sequence from the source."""
        germs: list[Germ] = []
        while v != self.source:
            g = self.pred[v]
            germs.append(g)
            v = germ_source(g)
        germs.reverse()
        return germs


def dijkstra(graph: MetricGraph, source: str, skip_edge: str | None = None) -> SourceTree:
    import heapq

    table = graph.table
    dist: dict[str, Scalar] = {source: table.zero()}
    done: set[str] = set()
    heap: list[tuple[_Key, int, str]] = [(_Key(table.zero()), 0, source)]
    counter = itertools.count(1)
    while heap:
        key, _, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        for g in graph.germs_at(x):
            e = g[0]
            if e.id == skip_edge or e.is_loop():
                continue
            y = germ_target(g)
            cand = dist[x] + e.length
            if y not in dist:
                dist[y] = cand
                heapq.heappush(heap, (_Key(cand), next(counter), y))
            elif y not in done:
                cmp = table.compare(cand, dist[y])
                if cmp is Comparison.INDETERMINATE:
                    raise PrecisionExhausted("shortest-path relaxation undecidable")
                if cmp is Comparison.LESS:
                    dist[y] = cand
                    heapq.heappush(heap, (_Key(cand), next(counter), y))
    # shortest-path DAG: multiplicities (saturated at 2) and canonical preds
    order = sorted(dist, key=lambda v: (_Key(dist[v]), graph.vertex_order(v)))
    counts: dict[str, int] = {source: 1}
    pred: dict[str, Germ] = {}
    for v in order:
        if v == source:
            continue
        total = 0
        best_germ = None
        for g in graph.germs_at(v):
            e = g[0]
            if e.id == skip_edge or e.is_loop():
                continue
            w = germ_target(g)  # germ departs v toward w; arrival germ is reverse
            if w in dist and dist[w] + e.length == dist[v]:
                total = min(2, total + counts.get(w, 0))
                if best_germ is None:
                    best_germ = reverse_germ(g)
        counts[v] = total
        if best_germ is not None:
            pred[v] = best_germ
    return SourceTree(source, dist, pred, counts)


@dataclass
class PathResult:
    distance: Scalar
    germs: list[Germ]
    unique: bool

    @property
    def edge_ids(self) -> list[str]:
        return [g[0].id for g in self.germs]


def shortest_path(graph: MetricGraph, u: str, v: str) -> PathResult:
    """Exact distance, one canonical shortest path, and a uniqueness flag."""
    for w in (u, v):
        if w not in graph._vset:
            raise KeyError(f"unknown vertex {w}")
    tree = dijkstra(graph, u)
    if v not in tree.dist:
        raise DisconnectedGraph(f"{v} unreachable from {u}")
    return PathResult(tree.dist[v], tree.path_to(v), tree.counts[v] == 1)


# ---------------------------------------------------------------------------
# girth
# ---------------------------------------------------------------------------


@dataclass
class GirthResult:
    value: Optional[Scalar]  # None when the graph is acyclic
    witness_edges: tuple[str, ...]

    def witness_length(self) -> Optional[Scalar]:
        return self.value


def girth(graph: MetricGraph) -> GirthResult:
    """Minimum cycle length: loops, plus len(e) + dist without e.

    Parallel-pair cycles fall out of the second family because the distance
    in G - e may run through the parallel edge.
    """
    table = graph.table
    best: Optional[Scalar] = None
    witness: tuple[str, ...] = ()

    def consider(value: Scalar, edges: tuple[str, ...]) -> None:
        nonlocal best, witness
        if best is None:
            best, witness = value, edges
            return
        cmp = table.compare(value, best)
        if cmp is Comparison.INDETERMINATE:
            raise PrecisionExhausted("girth comparison undecidable")
        if cmp is Comparison.LESS:
            best, witness = value, edges

    for e in graph.edges:
        if e.is_loop():
            consider(e.length, (e.id,))
    for e in graph.edges:
        if e.is_loop():
            continue
        tree = dijkstra(graph, e.u, skip_edge=e.id)
        if e.v in tree.dist:
            path = tree.path_to(e.v)
            consider(e.length + tree.dist[e.v], (e.id,) + tuple(g[0].id for g in path))
    return GirthResult(best, witness)


# ---------------------------------------------------------------------------
# point diameter
# ---------------------------------------------------------------------------
#
# Distances between interior points of edges are minima of finitely many
# linear route functions in the two offsets; on each (triangulated) domain
# the minimum is concave and piecewise linear, so its maximum is attained at
# an intersection of two constraint lines.  All candidate intersections are
# enumerated and evaluated exactly.


class _Route:
    """value(alpha, beta) = base + ca*alpha + cb*beta with ca, cb in {-1,0,1}."""

    __slots__ = ("base", "ca", "cb")

    def __init__(self, base: Scalar, ca: int, cb: int):
        self.base = base
        self.ca = ca
        self.cb = cb

    def at(self, alpha: Scalar, beta: Scalar) -> Scalar:
        val = self.base
        if self.ca:
            val = val + alpha if self.ca > 0 else val - alpha
        if self.cb:
            val = val + beta if self.cb > 0 else val - beta
        return val


class _Line:
    """c0 + ca*alpha + cb*beta = 0 with small integer gradients."""

    __slots__ = ("c0", "ca", "cb")

    def __init__(self, c0: Scalar, ca: int, cb: int):
        self.c0 = c0
        self.ca = ca
        self.cb = cb


def _intersect(l1: _Line, l2: _Line, table: SymbolTable):
    det = l1.ca * l2.cb - l1.cb * l2.ca
    if det == 0:
        return None
    alpha = (l1.cb * l2.c0 - l2.cb * l1.c0).scale(Rat(1, det))
    beta = (l2.ca * l1.c0 - l1.ca * l2.c0).scale(Rat(1, det))
    return alpha, beta


def _strict_cmp(table: SymbolTable, a: Scalar, b: Scalar) -> Comparison:
    cmp = table.compare(a, b)
    if cmp is Comparison.INDETERMINATE:
        raise PrecisionExhausted("point-diameter comparison undecidable")
    return cmp


def _min_over_routes(routes: list[_Route], alpha: Scalar, beta: Scalar, table: SymbolTable) -> Scalar:
    best = routes[0].at(alpha, beta)
    for r in routes[1:]:
        val = r.at(alpha, beta)
        if _strict_cmp(table, val, best) is Comparison.LESS:
            best = val
    return best


@dataclass
class DiameterResult:
    ok: bool
    max_distance: Optional[Scalar]
    witness: Optional[tuple[PointOnGraph, PointOnGraph]]


def point_diameter_check(graph: MetricGraph, sub: Subgraph, bound: Scalar) -> DiameterResult:
    """Exact max distance between points of the subgraph, measured in graph."""
    table = graph.table
    zero = table.zero()
    edges = sub.edges()
    if not edges:
        return DiameterResult(True, None, None)
    trees: dict[str, SourceTree] = {}
    for e in edges:
        for w in (e.u, e.v):
            if w not in trees:
                trees[w] = dijkstra(graph, w)

    best: Optional[Scalar] = None
    best_pair = None

    for i, e in enumerate(edges):
        for f in edges[i:]:
            a, b = e.length, f.length
            # corner routes: leave e through one end, enter f through one end
            routes = []
            for ia in (0, 1):
                for ib in (0, 1):
                    ea = e.u if ia == 0 else e.v
                    eb = f.u if ib == 0 else f.v
                    base = trees[ea].dist[eb]
                    ca = 1 if ia == 0 else -1
                    cb = 1 if ib == 0 else -1
                    if ia == 1:
                        base = base + a
                    if ib == 1:
                        base = base + b
                    routes.append(_Route(base, ca, cb))
            boundary = [
                _Line(zero, 1, 0),          # alpha = 0
                _Line(zero - a, 1, 0),      # alpha = a  (a - alpha = 0 form: -a + alpha)
                _Line(zero, 0, 1),
                _Line(zero - b, 0, 1),
            ]
            if e is f:
                domains = [
                    (routes + [_Route(zero, 1, -1)], boundary + [_Line(zero, 1, -1)], (1, -1)),
                    (routes + [_Route(zero, -1, 1)], boundary + [_Line(zero, 1, -1)], (-1, 1)),
                ]
            else:
                domains = [(routes, boundary, None)]

            for dom_routes, dom_boundary, half in domains:
                lines = list(dom_boundary)
                n = len(dom_routes)
                for p in range(n):
                    for q in range(p + 1, n):
                        rp, rq = dom_routes[p], dom_routes[q]
                        ca, cb = rp.ca - rq.ca, rp.cb - rq.cb
                        if ca == 0 and cb == 0:
                            continue
                        lines.append(_Line(rp.base - rq.base, ca, cb))
                seen: set = set()
                for l1, l2 in itertools.combinations(lines, 2):
                    pt = _intersect(l1, l2, table)
                    if pt is None:
                        continue
                    alpha, beta = pt
                    key = (alpha.key(), beta.key())
                    if key in seen:
                        continue
                    seen.add(key)
                    if _strict_cmp(table, alpha, zero) is Comparison.LESS:
                        continue
                    if _strict_cmp(table, alpha, a) is Comparison.GREATER:
                        continue
                    if _strict_cmp(table, beta, zero) is Comparison.LESS:
                        continue
                    if _strict_cmp(table, beta, b) is Comparison.GREATER:
                        continue
                    if half is not None:
                        d = alpha.scale(half[0]) + beta.scale(half[1])
                        if _strict_cmp(table, d, zero) is Comparison.LESS:
                            continue
                    val = _min_over_routes(dom_routes, alpha, beta, table)
                    if best is None or _strict_cmp(table, val, best) is Comparison.GREATER:
                        best = val
                        best_pair = (
                            PointOnGraph(e.id, True, alpha),
                            PointOnGraph(f.id, True, beta),
                        )

    assert best is not None
    ok = _strict_cmp(table, best, bound) is not Comparison.GREATER
    return DiameterResult(ok, best, None if ok else best_pair)


def point_distance(graph: MetricGraph, x: PointOnGraph, y: PointOnGraph) -> Scalar:
    """Exact distance between two edge points (routes through endpoints,
    plus the direct route when both lie on the same edge)."""
    table = graph.table
    e = graph.edge_by_id[x.edge_id]
    f = graph.edge_by_id[y.edge_id]
    alpha = x.offset if x.forward else e.length - x.offset
    beta = y.offset if y.forward else f.length - y.offset
    candidates = []
    for ia in (0, 1):
        for ib in (0, 1):
            ea = e.u if ia == 0 else e.v
            eb = f.u if ib == 0 else f.v
            base = shortest_path(graph, ea, eb).distance
            da = alpha if ia == 0 else e.length - alpha
            db = beta if ib == 0 else f.length - beta
            candidates.append(base + da + db)
    if e is f:
        diff = alpha - beta
        if table.sign(diff) is Comparison.LESS:
            diff = beta - alpha
        candidates.append(diff)
    best = candidates[0]
    for c in candidates[1:]:
        if _strict_cmp(table, c, best) is Comparison.LESS:
            best = c
    return best


# ---------------------------------------------------------------------------
# cycles, segments, bars
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cycle:
    """An embedded cycle as a canonical germ walk (closed, vertices distinct)."""

    steps: tuple  # tuple of germs
    edge_ids: frozenset
    length: Scalar

    @property
    def vertex_seq(self) -> tuple[str, ...]:
        return tuple(germ_source(g) for g in self.steps)

    @property
    def vertices(self) -> frozenset:
        return frozenset(self.vertex_seq)

    def sort_key(self) -> tuple:
        return (len(self.steps), tuple(sorted(self.edge_ids)))


def _canonical_cycle(graph: MetricGraph, germs: list[Germ]) -> Cycle:
    # rotate so the walk starts at the smallest vertex, then pick the
    # direction whose first edge id is the smaller of the two at that vertex
    verts = [germ_source(g) for g in germs]
    start = min(range(len(verts)), key=lambda i: graph.vertex_order(verts[i]))
    fwd = germs[start:] + germs[:start]
    if len(germs) > 1:
        rev_all = [reverse_germ(g) for g in reversed(germs)]
        rverts = [germ_source(g) for g in rev_all]
        rstart = min(range(len(rverts)), key=lambda i: graph.vertex_order(rverts[i]))
        rev = rev_all[rstart:] + rev_all[:rstart]
        if rev[0][0].id < fwd[0][0].id:
            fwd = rev
    total = graph.table.zero()
    for g in fwd:
        total = total + g[0].length
    return Cycle(tuple(fwd), frozenset(g[0].id for g in fwd), total)


def cycles_of(sub: Subgraph, cap: int = DEFAULT_CYCLE_CAP) -> list[Cycle]:
    """All embedded cycles of the subgraph, canonically ordered."""
    graph = sub.graph
    found: dict[frozenset, Cycle] = {}
    order = {v: graph.vertex_order(v) for v in sub.vertices}

    def germs_sorted(v: str) -> list[Germ]:
        return sorted(sub.germs_at(v), key=lambda g: (g[0].id, g[1]))

    for root in sorted(sub.vertices, key=lambda v: order[v]):
        stack: list[tuple[str, list, set, set]] = [(root, [], set(), {root})]
        while stack:
            x, path, used, visited = stack.pop()
            for g in germs_sorted(x):
                e = g[0]
                if e.id in used:
                    continue
                y = germ_target(g)
                if y == root:
                    key = frozenset(eid for eid in used) | {e.id}
                    if key not in found:
                        found[key] = _canonical_cycle(graph, path + [g])
                        if len(found) > cap:
                            raise EnumerationCapExceeded(cap)
                elif y not in visited and order[y] > order[root]:
                    stack.append((y, path + [g], used | {e.id}, visited | {y}))
    return sorted(found.values(), key=Cycle.sort_key)


@dataclass(frozen=True)
class SegmentPath:
    """A maximal embedded path whose interior has degree 2 in the subgraph
    and whose two distinct endpoints have degree >= 3 there."""

    steps: tuple  # germs, oriented from the smaller endpoint
    edge_ids: frozenset
    length: Scalar

    @property
    def endpoints(self) -> tuple[str, str]:
        return (germ_source(self.steps[0]), germ_target(self.steps[-1]))

    def sort_key(self) -> tuple:
        return (len(self.steps), tuple(sorted(self.edge_ids)))


def segments_of(sub: Subgraph) -> list[SegmentPath]:
    graph = sub.graph
    mind, arg = sub.min_degree()
    if mind < 2:
        raise HypothesisViolation(f"vertex {arg} has degree {mind} < 2 in the subgraph")
    branch = {v for v in sub.vertices if sub.degree(v) >= 3}
    found: dict[frozenset, SegmentPath] = {}
    for b in sorted(branch, key=graph.vertex_order):
        for g0 in sorted(sub.germs_at(b), key=lambda g: (g[0].id, g[1])):
            steps = [g0]
            cur = germ_target(g0)
            arrived = g0
            while cur not in branch:
                nxt = [g for g in sub.germs_at(cur) if g != reverse_germ(arrived)]
                # degree-2 interior vertex: exactly one way onward
                arrived = nxt[0]
                steps.append(arrived)
                cur = germ_target(arrived)
            if cur == b:
                continue  # closed back to the start: that is a cycle, not a segment
            key = frozenset(g[0].id for g in steps)
            if key in found:
                continue
            if graph.vertex_order(germ_source(steps[0])) > graph.vertex_order(cur):
                steps = [reverse_germ(g) for g in reversed(steps)]
            total = graph.table.zero()
            for g in steps:
                total = total + g[0].length
            found[key] = SegmentPath(tuple(steps), key, total)
    return sorted(found.values(), key=SegmentPath.sort_key)


@dataclass(frozen=True)
class BarTriple:
    """An embedded path joining two disjoint cycles, meeting them only at
    its endpoints (interior vertices and all path edges stay clear)."""

    steps: tuple  # germs from the cycle1 endpoint to the cycle2 endpoint
    edge_ids: frozenset
    length: Scalar
    cycle1: Cycle
    cycle2: Cycle

    @property
    def endpoints(self) -> tuple[str, str]:
        return (germ_source(self.steps[0]), germ_target(self.steps[-1]))

    def sort_key(self) -> tuple:
        return (
            self.cycle1.sort_key(),
            self.cycle2.sort_key(),
            len(self.steps),
            tuple(sorted(self.edge_ids)),
        )


def bars_of(
    sub: Subgraph,
    cycles: Optional[list[Cycle]] = None,
    cap: int = DEFAULT_CYCLE_CAP,
) -> list[BarTriple]:
    graph = sub.graph
    if cycles is None:
        cycles = cycles_of(sub, cap=cap)
    bars: list[BarTriple] = []
    for i, c1 in enumerate(cycles):
        for c2 in cycles[i + 1:]:
            if c1.vertices & c2.vertices:
                continue
            banned_edges = c1.edge_ids | c2.edge_ids
            banned_verts = c1.vertices | c2.vertices
            targets = c2.vertices
            for u in sorted(c1.vertices, key=graph.vertex_order):
                stack: list[tuple[str, list, set]] = [(u, [], {u})]
                while stack:
                    x, path, visited = stack.pop()
                    for g in sorted(sub.germs_at(x), key=lambda g: (g[0].id, g[1])):
                        e = g[0]
                        if e.id in banned_edges or any(s[0].id == e.id for s in path):
                            continue
                        y = germ_target(g)
                        if y in targets:
                            steps = path + [g]
                            total = graph.table.zero()
                            for s in steps:
                                total = total + s[0].length
                            bars.append(
                                BarTriple(
                                    tuple(steps),
                                    frozenset(s[0].id for s in steps),
                                    total,
                                    c1,
                                    c2,
                                )
                            )
                            if len(bars) > cap:
                                raise EnumerationCapExceeded(cap)
                        elif y not in banned_verts and y not in visited:
                            stack.append((y, path + [g], visited | {y}))
    bars.sort(key=BarTriple.sort_key)
    return bars


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------
#
#   # comment
#   symbol NAME pi
#   symbol NAME <decimal> err <rational>
#   vertex NAME
#   edge NAME V1 V2 <scalar-literal>
#   subgraph NAME E1 E2 ...


def _parse_decimal(text: str):
    try:
        from fractions import Fraction

        return Rat(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad decimal {text!r}") from exc


def _decimal_text(value) -> str:
    """Exact decimal rendering; denominators are 10-smooth for parsed input."""
    num, den = value.numerator, value.denominator
    if den == 1:
        return str(num)
    twos = fives = 0
    d = den
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        raise ValueError("symbol approximation is not exactly decimal")
    scale = max(twos, fives)
    shifted = num * 10**scale // den
    sign = "-" if shifted < 0 else ""
    digits = str(abs(shifted)).rjust(scale + 1, "0")
    if scale == 0:
        return sign + digits
    return f"{sign}{digits[:-scale]}.{digits[-scale:]}"


def parse_graph(text: str, precision_bits: int | None = None) -> MetricGraph:
    from .scalars import DEFAULT_PRECISION_BITS

    table = SymbolTable(precision_bits or DEFAULT_PRECISION_BITS)
    graph = MetricGraph(table)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "symbol":
                if len(parts) == 3 and parts[2] == "pi":
                    table.declare_pi_symbol(parts[1])
                elif len(parts) == 5 and parts[3] == "err":
                    approx = _parse_decimal(parts[2])
                    err = parse_scalar(table, parts[4])
                    if set(err.coeffs) - {0}:
                        raise ValueError("error radius must be rational")
                    table.declare_decimal_symbol(parts[1], approx, err.coeffs.get(0, Rat(0)))
                else:
                    raise ValueError("expected 'symbol NAME pi' or 'symbol NAME <decimal> err <rational>'")
            elif kind == "vertex":
                if len(parts) != 2:
                    raise ValueError("expected 'vertex NAME'")
                graph.add_vertex(parts[1])
            elif kind == "edge":
                if len(parts) < 5:
                    raise ValueError("expected 'edge NAME V1 V2 <scalar>'")
                literal = line.split(None, 4)[4]
                graph.add_edge(parts[1], parts[2], parts[3], parse_scalar(table, literal))
            elif kind == "subgraph":
                if len(parts) < 3:
                    raise ValueError("expected 'subgraph NAME E1 ...'")
                graph.declare_subgraph(parts[1], parts[2:])
            else:
                raise ValueError(f"unknown directive {kind!r}")
        except GraphFormatError as exc:
            raise GraphFormatError(str(exc), lineno) from None
        except (ValueError, KeyError) as exc:
            raise GraphFormatError(str(exc), lineno) from None
    graph.validate()
    return graph


def serialize_graph(graph: MetricGraph) -> str:
    lines = []
    for sym in graph.table.user_symbols():
        if sym.kind == "pi":
            lines.append(f"symbol {sym.name} pi")
        elif sym.kind == "decimal":
            lines.append(
                f"symbol {sym.name} {_decimal_text(sym.value)} err {rat_str(sym.radius)}"
            )
        else:
            raise ValueError(f"symbol {sym.name} has no text form")
    for v in graph.vertices:
        lines.append(f"vertex {v}")
    for e in graph.edges:
        lines.append(f"edge {e.id} {e.u} {e.v} {format_scalar(e.length)}")
    for name, eids in graph.subgraph_decls.items():
        lines.append(f"subgraph {name} {' '.join(eids)}")
    return "\n".join(lines) + "\n"
