"""Chords of immersed loops and of subgraphs.

A chord of a closed walk joins two of its branch-vertex visits by a short
geodesic (length strictly between 0 and pi) that escapes the walk at both
ends: its first germ differs from the two germs the walk uses at the start
visit, and symmetrically at the end visit.  Visits, not vertices, carry the
germ data, so a walk that passes through a vertex twice (a bar loop does)
gets an independent escape test per pass.

Under the girth hypothesis (every cycle at least 2*pi long) a geodesic
shorter than pi is automatically unique; a tie at that length means the
caller's hypotheses were not actually established and is reported as an
internal inconsistency rather than silently picking one path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ._rat import Rat
from .errors import InternalInconsistency
from .graph import (
    BarTriple,
    Cycle,
    MetricGraph,
    Subgraph,
    dijkstra,
    germ_source,
    germ_target,
    reverse_germ,
)
from .scalars import Area, Comparison, Scalar


@dataclass(frozen=True)
class Visit:
    """One pass of a closed walk through a vertex."""

    index: int
    vertex: str
    position: Scalar  # arc length from the walk's start point
    germs: tuple  # the outgoing germ and the reversed incoming germ


class ImmersedLoop:
    """A closed germ walk with arc-length positions at every visit."""

    def __init__(self, graph: MetricGraph, steps, kind: str = "cycle", bar_meta: Optional[dict] = None):
        steps = tuple(steps)
        if not steps:
            raise ValueError("empty loop")
        for a, b in zip(steps, steps[1:] + steps[:1]):
            if germ_target(a) != germ_source(b):
                raise InternalInconsistency("loop steps do not close up")
        self.graph = graph
        self.steps = steps
        self.kind = kind
        self.bar_meta = bar_meta
        visits = []
        pos = graph.table.zero()
        for i, g in enumerate(steps):
            incoming = steps[i - 1]
            visits.append(Visit(i, germ_source(g), pos, (g, reverse_germ(incoming))))
            pos = pos + g[0].length
        self.length = pos
        self.visits = visits

    def branch_visits(self) -> list[Visit]:
        return [v for v in self.visits if self.graph.degree(v.vertex) >= 3]


def loop_from_cycle(graph: MetricGraph, cycle: Cycle) -> ImmersedLoop:
    return ImmersedLoop(graph, cycle.steps, kind="cycle")


def _rotate_to(steps, vertex: str):
    for i, g in enumerate(steps):
        if germ_source(g) == vertex:
            return list(steps[i:] + steps[:i])
    raise ValueError(f"vertex {vertex} not on the walk")


def bar_loop(graph: MetricGraph, bar: BarTriple) -> ImmersedLoop:
    """First cycle, the bar, second cycle, then the bar backwards.

    The bar endpoints are visited twice each, with distinct germ pairs.
    """
    u, v = bar.endpoints
    steps = _rotate_to(bar.cycle1.steps, u)
    steps += list(bar.steps)
    steps += _rotate_to(bar.cycle2.steps, v)
    steps += [reverse_germ(g) for g in reversed(bar.steps)]
    meta = {"l1": bar.cycle1.length, "b": bar.length, "l2": bar.cycle2.length}
    return ImmersedLoop(graph, steps, kind="bar", bar_meta=meta)


@dataclass(frozen=True)
class Chord:
    """Directed: each qualifying visit pair yields this record and its
    mirror with the geodesic reversed."""

    s: Visit
    t: Visit
    distance: Scalar  # geodesic length, in (0, pi)
    z: Scalar  # pi minus the distance
    geodesic: tuple  # germ sequence from s.vertex to t.vertex

    def square_area(self) -> Area:
        return (self.z * self.z).scale(2)


def _geodesic_between(graph, trees, x: str, y: str, pi: Scalar):
    """Distance test against pi plus the canonical geodesic; None when the
    separation is not strictly below pi."""
    table = graph.table
    tree = trees[x]
    d0 = tree.dist[y]
    cmp = table.require(table.compare(d0, pi), "chord length test undecidable")
    if cmp is not Comparison.LESS:
        return None
    if tree.counts[y] != 1:
        raise InternalInconsistency(
            f"two geodesics of length below pi join {x} and {y}; "
            "the girth hypothesis cannot actually hold"
        )
    return d0, tree.path_to(y)


def chords_of_loop(loop: ImmersedLoop) -> list[Chord]:
    graph = loop.graph
    table = graph.table
    pi = table.pi()
    starts = loop.branch_visits()
    trees = {}
    for vis in starts:
        if vis.vertex not in trees:
            trees[vis.vertex] = dijkstra(graph, vis.vertex)
    out: list[Chord] = []
    for i, a in enumerate(starts):
        for b in starts[i + 1:]:
            if a.vertex == b.vertex:
                continue  # distance zero, never a chord
            hit = _geodesic_between(graph, trees, a.vertex, b.vertex, pi)
            if hit is None:
                continue
            d0, path = hit
            if path[0] in a.germs:
                continue
            if reverse_germ(path[-1]) in b.germs:
                continue
            # the escape test is symmetric, so the mirror qualifies too
            back = tuple(reverse_germ(g) for g in reversed(path))
            out.append(Chord(a, b, d0, pi - d0, tuple(path)))
            out.append(Chord(b, a, d0, pi - d0, back))
    out.sort(key=lambda ch: (ch.s.index, ch.t.index))
    return out


@dataclass(frozen=True)
class SubgraphChord:
    """Directed, like Chord, but anchored at vertices of a subgraph."""

    x: str
    y: str
    distance: Scalar
    z: Scalar
    geodesic: tuple

    def square_area(self) -> Area:
        return (self.z * self.z).scale(2)


def chords_of_subgraph(graph: MetricGraph, sub: Subgraph) -> list[SubgraphChord]:
    """Short geodesics between subgraph vertices leaving the subgraph at
    both ends (first and last geodesic edge outside it)."""
    table = graph.table
    pi = table.pi()
    verts = list(sub.vertices)
    trees = {v: dijkstra(graph, v) for v in verts}
    out: list[SubgraphChord] = []
    for i, x in enumerate(verts):
        for y in verts[i + 1:]:
            hit = _geodesic_between(graph, trees, x, y, pi)
            if hit is None:
                continue
            d0, path = hit
            if path[0][0].id in sub.edge_set:
                continue
            if path[-1][0].id in sub.edge_set:
                continue
            back = tuple(reverse_germ(g) for g in reversed(path))
            out.append(SubgraphChord(x, y, d0, pi - d0, tuple(path)))
            out.append(SubgraphChord(y, x, d0, pi - d0, back))
    order = {v: i for i, v in enumerate(verts)}
    out.sort(key=lambda ch: (order[ch.x], order[ch.y]))
    return out


def chord_budgets(loop: ImmersedLoop, chords: list[Chord]):
    """Per-visit totals of z against the slack l/2 - pi.

    Squares anchored at one visit tile a strip of width l - 2*pi without
    overlap, which caps the per-visit z sum; exceeding the cap means the
    caller's hypotheses or the chord set are inconsistent.
    """
    table = loop.graph.table
    bound = loop.length.scale(Rat(1, 2)) - table.pi()
    rows = []
    for vis in loop.branch_visits():
        total = table.zero()
        for ch in chords:
            if ch.s.index == vis.index:  # mirrors carry the other endpoint
                total = total + ch.z
        cmp = table.require(table.compare(total, bound), "chord budget undecidable")
        rows.append((vis, total, bound, cmp is not Comparison.GREATER))
    return rows


@dataclass(frozen=True)
class SplicedRectangle:
    """Diagonal rectangle in loop-square coordinates.

    corners lists the four corner position pairs; center and the two
    half-extents (along x+y and x-y) are derived from them and drive the
    tiling construction.
    """

    corners: tuple
    center: tuple
    half_sum: Scalar
    half_diff: Scalar

    def area(self) -> Area:
        return (self.half_sum * self.half_diff).scale(2)


@dataclass(frozen=True)
class SplicedRegion:
    rectangles: tuple


@dataclass(frozen=True)
class BarShape:
    """Positions of the two bar passes inside a bar loop.

    The walk runs over the bar during [first_pass_start, first_pass_start+b]
    and again during [second_pass_end-b, second_pass_end], where b is the
    bar length.
    """

    bar_length: Scalar
    first_cycle_length: Scalar
    second_cycle_length: Scalar
    first_pass_start: Scalar
    second_pass_end: Scalar


def bar_shape_of(loop: ImmersedLoop) -> BarShape:
    if loop.kind != "bar" or not loop.bar_meta:
        raise ValueError("loop does not carry bar traversal data")
    l1 = loop.bar_meta["l1"]
    b = loop.bar_meta["b"]
    l2 = loop.bar_meta["l2"]
    return BarShape(b, l1, l2, l1, loop.length)


def spliced_region(loop: ImmersedLoop, shape: Optional[BarShape] = None) -> SplicedRegion:
    """Self-crossing locus of the loop square, as diagonal rectangles.

    An embedded cycle has none.  A bar loop passes over its bar twice and
    the pairs (x, y) mapping to the same bar point form two rectangles
    whose corners follow from the pass positions.
    """
    if shape is None:
        return SplicedRegion(())
    table = loop.graph.table
    pi = table.pi()
    b = shape.bar_length
    expect = shape.first_cycle_length + shape.second_cycle_length + b.scale(2)
    if loop.length != expect:
        raise ValueError("bar shape lengths do not add up to the loop length")
    s1 = shape.first_pass_start
    s2 = shape.second_pass_end

    def rect(p, q):
        corners = (
            (p - pi, q),
            (p, q + pi),
            (p + b + pi, q - b),
            (p + b, q - b - pi),
        )
        center = (p + b.scale(Rat(1, 2)), q - b.scale(Rat(1, 2)))
        return SplicedRectangle(corners, center, pi, b + pi)

    first = rect(s1, s2)
    swapped = SplicedRectangle(
        tuple((y, x) for x, y in first.corners),
        (first.center[1], first.center[0]),
        first.half_sum,
        first.half_diff,
    )
    return SplicedRegion((first, swapped))
