"""Diamond square tilings of loop squares and cycle products, verified
exactly, plus the axis-aligned torus form they convert to.

Every piece here is a rotated box: in the coordinates u = x + y and
v = x - y it becomes axis-aligned, so coverage checking reduces to exact
interval bookkeeping over the common refinement grid of all box edges.
The rotated coordinate lattice has index two in the plain one; running
the check on a doubled torus (both periods twice the loop length, every
piece contributing two translates) accounts for that exactly.

Verification decides coverage first and then confirms the area identity;
a tiling that covers cleanly but sums to the wrong area indicates a bug
in the construction, not bad input, and raises InternalInconsistency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cmp_to_key
from typing import Callable, Optional

from ._rat import Rat
from .chords import SplicedRegion
from .dehn import MeasureTiling
from .errors import InternalInconsistency
from .graph import Cycle, MetricGraph, germ_source, germ_target
from .scalars import (
    Area,
    Comparison,
    Scalar,
    SymbolTable,
    commensurable,
    format_area,
    format_scalar,
)


# ---------------------------------------------------------------------------
# regions and pieces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnnulusRegion:
    """Pairs of loop points at circle distance at least pi.

    In (x, y) coordinates on the loop torus this is the band
    v = x - y mod l in [pi, l - pi]; it is empty exactly when l = 2*pi.
    """

    length: Scalar

    def __post_init__(self):
        table = self.length.table
        two_pi = table.pi(2)
        cmp = table.require(
            table.compare(self.length, two_pi), "region width undecidable"
        )
        if cmp is Comparison.LESS:
            raise ValueError("loop shorter than 2*pi has no annulus region")

    @property
    def table(self) -> SymbolTable:
        return self.length.table

    def area(self) -> Area:
        return self.length * (self.length - self.table.pi(2))


@dataclass(frozen=True)
class ProductRegion:
    """Full product of two cycle circles."""

    length1: Scalar
    length2: Scalar

    @property
    def table(self) -> SymbolTable:
        return self.length1.table

    def area(self) -> Area:
        return self.length1 * self.length2


@dataclass(frozen=True)
class TorusRegion:
    """Square torus with both periods equal; lift_counts records how many
    copies of the original cycles one period holds."""

    length: Scalar
    lift_counts: tuple

    @property
    def table(self) -> SymbolTable:
        return self.length.table

    def area(self) -> Area:
        return self.length * self.length


@dataclass(frozen=True)
class DiamondPiece:
    """Box rotated 45 degrees: half_sum bounds |(x+y) - (cx+cy)| and
    half_diff bounds |(x-y) - (cx-cy)|.  Equal halves make it the square
    of side half*sqrt(2) used for chords."""

    label: str
    center: tuple  # (Scalar, Scalar)
    half_sum: Scalar
    half_diff: Scalar

    @property
    def shape(self) -> str:
        return "square" if self.half_sum == self.half_diff else "rectangle"

    def area(self) -> Area:
        return (self.half_sum * self.half_diff).scale(2)


@dataclass(frozen=True)
class AxisPiece:
    """Plain axis-aligned box on the torus."""

    label: str
    center: tuple
    half_x: Scalar
    half_y: Scalar

    @property
    def shape(self) -> str:
        return "axis-square" if self.half_x == self.half_y else "axis-rectangle"

    def area(self) -> Area:
        return (self.half_x * self.half_y).scale(4)


@dataclass(frozen=True)
class GeometricTiling:
    table: SymbolTable
    region: object
    pieces: tuple


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def annulus_tiling(loop, chords, spliced: Optional[SplicedRegion] = None) -> GeometricTiling:
    """Spliced rectangles first, then one square per directed chord.

    Construction only; run verify_tiling to certify coverage.  The
    rectangle-first order is what the two-rectangle audit downstream
    expects.
    """
    table = loop.graph.table
    region = AnnulusRegion(loop.length)
    pieces = []
    if spliced is not None:
        for k, rect in enumerate(spliced.rectangles):
            pieces.append(
                DiamondPiece(f"spliced{k}", rect.center, rect.half_sum, rect.half_diff)
            )
    for k, ch in enumerate(chords):
        pieces.append(
            DiamondPiece(f"chord{k}", (ch.s.position, ch.t.position), ch.z, ch.z)
        )
    return GeometricTiling(table, region, tuple(pieces))


def _cycle_positions(graph: MetricGraph, cycle: Cycle) -> dict:
    out = {}
    pos = graph.table.zero()
    for g in cycle.steps:
        v = germ_source(g)
        if v in out:
            raise ValueError("cycle visits a vertex twice; positions are ambiguous")
        out[v] = pos
        pos = pos + g[0].length
    return out


def product_tiling(
    graph: MetricGraph, cycle1: Cycle, cycle2: Cycle, chords
) -> GeometricTiling:
    """One square per chord running from the first cycle to the second.

    Chord records pointing the other way (or within one cycle) are
    dropped, so the full directed output of the chord scan can be passed
    straight in.
    """
    pos1 = _cycle_positions(graph, cycle1)
    pos2 = _cycle_positions(graph, cycle2)
    if set(pos1) & set(pos2):
        raise ValueError("cycles are not disjoint")
    table = graph.table
    pieces = []
    k = 0
    for ch in chords:
        if ch.x in pos1 and ch.y in pos2:
            pieces.append(
                DiamondPiece(f"chord{k}", (pos1[ch.x], pos2[ch.y]), ch.z, ch.z)
            )
            k += 1
    region = ProductRegion(cycle1.length, cycle2.length)
    return GeometricTiling(table, region, tuple(pieces))


def _lift_counts(region: ProductRegion):
    ratio = commensurable(region.length1, region.length2)
    if ratio is None:
        return None
    return int(ratio.numerator), int(ratio.denominator)


def psi_transform(t: GeometricTiling) -> GeometricTiling:
    """Rewrite a product tiling as axis-aligned squares on a square torus.

    Both cycles are unrolled to a common circumference (n1 copies of one,
    n2 of the other), where the shear (x, y) -> (x+y, x-y) identifies each
    diamond square with two axis-aligned squares of half the diagonal.
    """
    if not isinstance(t.region, ProductRegion):
        raise ValueError("only product tilings admit the axis transform")
    table = t.table
    counts = _lift_counts(t.region)
    if counts is None:
        raise InternalInconsistency(
            "cycle lengths are incommensurable; no common torus exists"
        )
    n1, n2 = counts
    l1, l2 = t.region.length1, t.region.length2
    big = l1.scale(n1)
    half_period = big.scale(Rat(1, 2))
    pieces = []
    for p in t.pieces:
        if p.half_sum != p.half_diff:
            raise ValueError("non-square piece cannot be sheared to a square")
        half = p.half_sum.scale(Rat(1, 2))
        for i in range(n1):
            for j in range(n2):
                cx = p.center[0] + l1.scale(i)
                cy = p.center[1] + l2.scale(j)
                u = (cx + cy).scale(Rat(1, 2))
                v = (cx - cy).scale(Rat(1, 2))
                pieces.append(AxisPiece(f"{p.label}[{i},{j}]a", (u, v), half, half))
                pieces.append(
                    AxisPiece(
                        f"{p.label}[{i},{j}]b",
                        (u + half_period, v + half_period),
                        half,
                        half,
                    )
                )
    return GeometricTiling(table, TorusRegion(big, (n1, n2)), tuple(pieces))


# ---------------------------------------------------------------------------
# exact grid verification
# ---------------------------------------------------------------------------


def _certified_floor(table: SymbolTable, value: Scalar, period: Scalar) -> int:
    """Largest k with k*period <= value; float guess, exact confirmation."""
    guess = float(table.approx(value)) / float(table.approx(period))
    k = math.floor(guess)
    zero = table.zero()
    while True:
        rest = value - period.scale(k)
        if table.require(table.compare(rest, zero), "modular reduction undecidable") is Comparison.LESS:
            k -= 1
            continue
        if table.require(table.compare(rest, period), "modular reduction undecidable") is not Comparison.LESS:
            k += 1
            continue
        return k


def _runs_mod(table: SymbolTable, lo: Scalar, extent: Scalar, period: Scalar):
    """Wrap [lo, lo+extent] into the fundamental interval [0, period]."""
    if table.require(table.compare(extent, period), "piece larger than the torus") is Comparison.GREATER:
        raise InternalInconsistency("piece extent exceeds the torus period")
    k = _certified_floor(table, lo, period)
    lo = lo - period.scale(k)
    hi = lo + extent
    if table.require(table.compare(hi, period), "wrap test undecidable") is Comparison.GREATER:
        return [(lo, period), (table.zero(), hi - period)]
    return [(lo, hi)]


def _sorted_breaks(table: SymbolTable, values):
    uniq = {}
    for v in values:
        uniq.setdefault(v.key(), v)
    vals = list(uniq.values())

    def cmp(a, b):
        c = table.require(table.compare(a, b), "breakpoint order undecidable")
        if c is Comparison.LESS:
            return -1
        if c is Comparison.GREATER:
            return 1
        raise InternalInconsistency("distinct scalar forms compare equal")

    vals.sort(key=cmp_to_key(cmp))
    return vals, {v.key(): i for i, v in enumerate(vals)}


@dataclass
class _Grid:
    u_breaks: list
    v_breaks: list
    boxes: list  # (piece_index, u_runs, v_runs) with runs as index pairs
    counts: list  # coverage per cell, counts[j][k]
    in_region: list  # per v-cell


def _piece_box(piece):
    """Grid-coordinate box (u_lo, u_extent, v_lo, v_extent) of a piece."""
    cx, cy = piece.center
    if isinstance(piece, DiamondPiece):
        u_c, v_c = cx + cy, cx - cy
        return (
            u_c - piece.half_sum,
            piece.half_sum.scale(2),
            v_c - piece.half_diff,
            piece.half_diff.scale(2),
        )
    return (
        cx - piece.half_x,
        piece.half_x.scale(2),
        cy - piece.half_y,
        piece.half_y.scale(2),
    )


def _layout(t: GeometricTiling):
    """Periods, per-piece translate offsets in grid coordinates, region
    strips along v, and the map from grid points back to loop points."""
    table = t.table
    zero = table.zero()
    pi = table.pi()
    region = t.region
    if isinstance(region, AnnulusRegion):
        l = region.length
        period = l.scale(2)
        offsets = [(zero, zero), (l, l)]
        strips = [(pi, l - pi), (l + pi, period - pi)]

        def back(u, v):
            x = (u + v).scale(Rat(1, 2))
            y = (u - v).scale(Rat(1, 2))
            return _reduce_point(table, (x, y), (l, l))

        return (period, period), offsets, strips, back
    if isinstance(region, ProductRegion):
        counts = _lift_counts(region)
        if counts is None:
            raise InternalInconsistency("no common period for the grid")
        n1, n2 = counts
        l1, l2 = region.length1, region.length2
        big = l1.scale(n1)
        period = big.scale(2)
        offsets = []
        for i in range(n1):
            for j in range(n2):
                du = l1.scale(i) + l2.scale(j)
                dv = l1.scale(i) - l2.scale(j)
                offsets.append((du, dv))
                offsets.append((du + big, dv + big))
        strips = [(zero, period)]

        def back(u, v):
            x = (u + v).scale(Rat(1, 2))
            y = (u - v).scale(Rat(1, 2))
            return _reduce_point(table, (x, y), (l1, l2))

        return (period, period), offsets, strips, back
    if isinstance(region, TorusRegion):
        period = region.length
        strips = [(zero, period)]

        def back(u, v):
            return _reduce_point(table, (u, v), (period, period))

        return (period, period), [(zero, zero)], strips, back
    raise ValueError(f"unknown region {region!r}")


def _reduce_point(table, point, periods):
    out = []
    for coord, period in zip(point, periods):
        k = _certified_floor(table, coord, period)
        out.append(coord - period.scale(k))
    return tuple(out)


def _build_grid(t: GeometricTiling):
    table = t.table
    (period_u, period_v), offsets, strips, back = _layout(t)
    raw = []
    for index, piece in enumerate(t.pieces):
        u_lo, u_ext, v_lo, v_ext = _piece_box(piece)
        for du, dv in offsets:
            u_runs = _runs_mod(table, u_lo + du, u_ext, period_u)
            v_runs = _runs_mod(table, v_lo + dv, v_ext, period_v)
            raw.append((index, u_runs, v_runs))

    u_values = [table.zero(), period_u]
    v_values = [table.zero(), period_v]
    for _, u_runs, v_runs in raw:
        for a, b in u_runs:
            u_values += [a, b]
        for a, b in v_runs:
            v_values += [a, b]
    for a, b in strips:
        v_values += [a, b]
    u_breaks, u_index = _sorted_breaks(table, u_values)
    v_breaks, v_index = _sorted_breaks(table, v_values)

    nu, nv = len(u_breaks) - 1, len(v_breaks) - 1
    diff = [[0] * (nv + 1) for _ in range(nu + 1)]
    boxes = []
    for index, u_runs, v_runs in raw:
        u_idx = [(u_index[a.key()], u_index[b.key()]) for a, b in u_runs]
        v_idx = [(v_index[a.key()], v_index[b.key()]) for a, b in v_runs]
        boxes.append((index, u_idx, v_idx))
        for ua, ub in u_idx:
            for va, vb in v_idx:
                diff[ua][va] += 1
                diff[ua][vb] -= 1
                diff[ub][va] -= 1
                diff[ub][vb] += 1

    counts = [[0] * nv for _ in range(nu)]
    for j in range(nu):
        for k in range(nv):
            up = counts[j - 1][k] if j else 0
            left = counts[j][k - 1] if k else 0
            corner = counts[j - 1][k - 1] if j and k else 0
            counts[j][k] = diff[j][k] + up + left - corner

    in_region = [False] * nv
    for a, b in strips:
        for k in range(v_index[a.key()], v_index[b.key()]):
            in_region[k] = True

    return _Grid(u_breaks, v_breaks, boxes, counts, in_region), back, strips


@dataclass(frozen=True)
class TilingReport:
    status: str  # ok | gap | overlap | protrusion | area-mismatch
    witness: Optional[tuple]
    pieces: tuple
    tiled_area: Area
    region_area: Area

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _covering_pieces(grid: _Grid, j: int, k: int):
    found = []
    for index, u_idx, v_idx in grid.boxes:
        if any(a <= j < b for a, b in u_idx) and any(a <= k < b for a, b in v_idx):
            found.append(index)
    return found


def _total_area(t: GeometricTiling) -> Area:
    total = Area(t.table, {})
    for p in t.pieces:
        total = total + p.area()
    return total


def verify_tiling(t: GeometricTiling) -> TilingReport:
    """Exact coverage of the region with multiplicity one, plus the area
    identity.  First defect in grid scan order wins."""
    table = t.table
    tiled = _total_area(t)
    region_area = t.region.area()
    if isinstance(t.region, ProductRegion) and _lift_counts(t.region) is None:
        # no common refinement exists; the area identity is the only
        # exact statement left, and matching areas prove nothing
        if tiled == region_area:
            raise InternalInconsistency(
                "incommensurable product admits no coverage certificate"
            )
        return TilingReport("area-mismatch", None, (), tiled, region_area)

    grid, back, _ = _build_grid(t)
    half = Rat(1, 2)
    for j in range(len(grid.u_breaks) - 1):
        for k in range(len(grid.v_breaks) - 1):
            c = grid.counts[j][k]
            inside = grid.in_region[k]
            if (inside and c == 1) or (not inside and c == 0):
                continue
            u_mid = (grid.u_breaks[j] + grid.u_breaks[j + 1]).scale(half)
            v_mid = (grid.v_breaks[k] + grid.v_breaks[k + 1]).scale(half)
            witness = back(u_mid, v_mid)
            if not inside:
                owner = _covering_pieces(grid, j, k)[0]
                return TilingReport("protrusion", witness, (owner,), tiled, region_area)
            if c == 0:
                return TilingReport("gap", witness, (), tiled, region_area)
            first, second = _covering_pieces(grid, j, k)[:2]
            return TilingReport("overlap", witness, (first, second), tiled, region_area)

    if tiled != region_area:
        raise InternalInconsistency(
            "region covered exactly once yet piece areas disagree with it"
        )
    return TilingReport("ok", None, (), tiled, region_area)


# ---------------------------------------------------------------------------
# bridge to measure tilings
# ---------------------------------------------------------------------------


def to_measure_tiling(t: GeometricTiling) -> MeasureTiling:
    """Re-express a verified tiling as a measure-space rectangle tiling.

    Annulus mode: X faces are the grid intervals of the doubled torus and
    Y faces those inside the principal strip; every interval measures half
    its coordinate length because the doubled torus covers each point class
    twice, which puts the X total at exactly the loop length.  Each piece
    is represented by its unique translate inside the principal strip.

    Torus mode: faces are plain grid intervals with their full lengths and
    every translate is its own measure piece.
    """
    report = verify_tiling(t)
    if not report.ok:
        raise ValueError(f"tiling does not verify: {report.status}")
    if isinstance(t.region, ProductRegion):
        raise ValueError("convert a product tiling with the axis transform first")
    table = t.table
    grid, _, strips = _build_grid(t)

    if isinstance(t.region, AnnulusRegion):
        factor = Rat(1, 2)
        strip_lo, strip_hi = strips[0]
        lo_idx = next(
            i for i, v in enumerate(grid.v_breaks) if v.key() == strip_lo.key()
        )
        hi_idx = next(
            i for i, v in enumerate(grid.v_breaks) if v.key() == strip_hi.key()
        )
        chosen = {}
        for index, u_idx, v_idx in grid.boxes:
            if len(v_idx) != 1:
                continue  # wrapped in v, cannot lie inside the strip
            va, vb = v_idx[0]
            if lo_idx <= va and vb <= hi_idx:
                if index in chosen:
                    raise InternalInconsistency("piece has two in-strip translates")
                chosen[index] = (u_idx, (va, vb))
        if len(chosen) != len(t.pieces):
            raise InternalInconsistency("piece missing from the principal strip")
    else:
        factor = Rat(1)
        lo_idx, hi_idx = 0, len(grid.v_breaks) - 1
        chosen = None

    x_elems = [
        (f"x{j}", (grid.u_breaks[j + 1] - grid.u_breaks[j]).scale(factor))
        for j in range(len(grid.u_breaks) - 1)
    ]
    y_elems = [
        (f"y{k - lo_idx}", (grid.v_breaks[k + 1] - grid.v_breaks[k]).scale(factor))
        for k in range(lo_idx, hi_idx)
    ]

    pieces = []
    labels = []
    if chosen is not None:
        for index in range(len(t.pieces)):
            u_idx, (va, vb) = chosen[index]
            a = {j for ua, ub in u_idx for j in range(ua, ub)}
            b = set(range(va - lo_idx, vb - lo_idx))
            pieces.append((a, b))
            labels.append(t.pieces[index].label)
    else:
        for n, (index, u_idx, v_idx) in enumerate(grid.boxes):
            a = {j for ua, ub in u_idx for j in range(ua, ub)}
            b = {k for va, vb in v_idx for k in range(va, vb)}
            pieces.append((a, b))
            labels.append(f"{t.pieces[index].label}#{n}")

    return MeasureTiling(table, x_elems, y_elems, pieces, labels=labels)


# ---------------------------------------------------------------------------
# report serialization
# ---------------------------------------------------------------------------


def _literal(s: Scalar) -> str:
    return format_scalar(s).replace(" ", "")


def serialize_tiling(t: GeometricTiling, report: Optional[TilingReport] = None) -> str:
    lines = []
    r = t.region
    if isinstance(r, AnnulusRegion):
        lines.append(
            f"region annulus length={_literal(r.length)} area={format_area(r.area())}"
        )
    elif isinstance(r, ProductRegion):
        lines.append(
            "region product"
            f" length1={_literal(r.length1)} length2={_literal(r.length2)}"
            f" area={format_area(r.area())}"
        )
    else:
        n1, n2 = r.lift_counts
        lines.append(
            f"region torus length={_literal(r.length)} lifts={n1}x{n2}"
            f" area={format_area(r.area())}"
        )
    for p in t.pieces:
        cx, cy = p.center
        if isinstance(p, DiamondPiece):
            halves = (p.half_sum, p.half_diff)
        else:
            halves = (p.half_x, p.half_y)
        lines.append(
            f"piece {p.label} kind={p.shape}"
            f" center=({_literal(cx)},{_literal(cy)})"
            f" halves=({_literal(halves[0])},{_literal(halves[1])})"
        )
    if report is not None:
        tail = f"verdict {report.status}"
        if report.witness is not None:
            wx, wy = report.witness
            tail += f" witness=({_literal(wx)},{_literal(wy)})"
        if report.pieces:
            tail += " pieces=" + ",".join(t.pieces[i].label for i in report.pieces)
        tail += (
            f" tiled={format_area(report.tiled_area)}"
            f" region={format_area(report.region_area)}"
        )
        lines.append(tail)
    return "\n".join(lines) + "\n"
