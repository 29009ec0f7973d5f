"""Abstract measure tilings and linear-functional certificates.

A measure tiling is the combinatorial shadow of a box tiling of a product:
finitely many X elements and Y elements with positive measures, and pieces
(A_i, B_i) that are index sets into X and Y.  The tiling axioms say every
(x, y) pair is covered by exactly one piece; the square axiom adds
mu(A_i) = mu(B_i).

Exact coverage alone forces the product identity

    sum_i f(mu A_i) * f(mu B_i)  =  f(mu X) * f(mu Y)

for every Q-linear functional f on measures, because both sides expand to
the same double sum over covered pairs.  When all pieces are squares the
left side is a sum of squares of rationals; choosing f cleverly then turns
an incommensurability in the data into the absurdity "negative = sum of
squares", and re-running the verifier pinpoints which axiom actually broke.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from ._rat import Rat, as_rat, rat_str
from .errors import AuditFailure, GraphFormatError, InternalInconsistency
from .scalars import (
    Area,
    Comparison,
    Scalar,
    SymbolTable,
    commensurable,
    compare_area,
    format_scalar,
    parse_scalar,
)


class MeasureTiling:
    def __init__(
        self,
        table: SymbolTable,
        x_elements: Sequence[tuple[str, Scalar]],
        y_elements: Sequence[tuple[str, Scalar]],
        pieces: Sequence[tuple[Iterable[int], Iterable[int]]],
        labels: Optional[Sequence[str]] = None,
    ):
        self.table = table
        self.x_names = [n for n, _ in x_elements]
        self.x_measures = [m for _, m in x_elements]
        self.y_names = [n for n, _ in y_elements]
        self.y_measures = [m for _, m in y_elements]
        for name, m in list(x_elements) + list(y_elements):
            if table.sign(m) is not Comparison.GREATER:
                raise ValueError(f"element {name} must have positive measure")
        self.pieces = []
        for a, b in pieces:
            a, b = frozenset(a), frozenset(b)
            if not a or not b:
                raise ValueError("piece with empty side")
            if max(a) >= len(self.x_names) or max(b) >= len(self.y_names):
                raise ValueError("piece references unknown element")
            self.pieces.append((a, b))
        self.labels = list(labels) if labels else [f"piece{i}" for i in range(len(self.pieces))]
        if len(self.labels) != len(self.pieces):
            raise ValueError("one label per piece")

    def mu_x(self) -> Scalar:
        return _total(self.table, self.x_measures)

    def mu_y(self) -> Scalar:
        return _total(self.table, self.y_measures)

    def mu_a(self, i: int) -> Scalar:
        return _total(self.table, [self.x_measures[j] for j in sorted(self.pieces[i][0])])

    def mu_b(self, i: int) -> Scalar:
        return _total(self.table, [self.y_measures[k] for k in sorted(self.pieces[i][1])])


def _total(table: SymbolTable, values) -> Scalar:
    out = table.zero()
    for v in values:
        out = out + v
    return out


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MeasureVerdict:
    status: str  # "ok" | "uncovered" | "doubly-covered" | "not-square"
    x_index: Optional[int] = None
    y_index: Optional[int] = None
    piece_indices: tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def verify_measure_tiling(t: MeasureTiling, skip_square: frozenset[int] = frozenset()) -> MeasureVerdict:
    """Exact-coverage check, then the square axiom piecewise.

    skip_square names pieces allowed to be non-square (audited rectangles).
    """
    nx, ny = len(t.x_names), len(t.y_names)
    count = [[0] * ny for _ in range(nx)]
    for a, b in t.pieces:
        for j in a:
            row = count[j]
            for k in b:
                row[k] += 1
    for j in range(nx):
        for k in range(ny):
            c = count[j][k]
            if c == 0:
                return MeasureVerdict("uncovered", x_index=j, y_index=k)
            if c > 1:
                covering = tuple(i for i, (a, b) in enumerate(t.pieces) if j in a and k in b)
                return MeasureVerdict("doubly-covered", x_index=j, y_index=k, piece_indices=covering)
    for i in range(len(t.pieces)):
        if i in skip_square:
            continue
        if t.mu_a(i) != t.mu_b(i):
            return MeasureVerdict("not-square", piece_indices=(i,))
    return MeasureVerdict("ok")


# ---------------------------------------------------------------------------
# functionals
# ---------------------------------------------------------------------------
#
# A functional is a map from symbol indices to rationals, extended linearly
# to Scalars; indices it does not mention are sent to zero.


def apply_functional(f: dict[int, Rat], s: Scalar) -> Rat:
    total = Rat(0)
    for idx, coeff in s.coeffs.items():
        fv = f.get(idx)
        if fv is not None:
            total += coeff * fv
    return total


def functional_identity(t: MeasureTiling, f: dict[int, Rat]) -> tuple[Rat, Rat]:
    """(f(muX)*f(muY), sum_i f(muA_i)*f(muB_i)); equal under exact coverage."""
    left = apply_functional(f, t.mu_x()) * apply_functional(f, t.mu_y())
    right = Rat(0)
    for i in range(len(t.pieces)):
        right += apply_functional(f, t.mu_a(i)) * apply_functional(f, t.mu_b(i))
    return left, right


def solve_functional(equations: list[tuple[Scalar, Rat]]) -> dict[int, Rat]:
    """Least-support rational solution of f(s_k) = c_k; free variables zero."""
    cols = sorted({i for s, _ in equations for i in s.coeffs})
    rows = [[as_rat(s.coeffs.get(c, 0)) for c in cols] + [as_rat(rhs)] for s, rhs in equations]
    pivots: list[int] = []
    r = 0
    for c in range(len(cols)):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [v / pv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [u - factor * w for u, w in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    for row in rows[r:]:
        if all(v == 0 for v in row[:-1]) and row[-1] != 0:
            raise ValueError("inconsistent functional constraints")
    sol = {c: Rat(0) for c in cols}
    for i, c in enumerate(pivots):
        sol[c] = rows[i][-1]
    return sol


# ---------------------------------------------------------------------------
# the square-tiling dichotomy
# ---------------------------------------------------------------------------


@dataclass
class CommensurableVerdict:
    """Everything in sight is a rational multiple of one base value."""

    base: Scalar
    x_ratios: list[Rat]
    y_ratios: list[Rat]

    @property
    def kind(self) -> str:
        return "commensurable"


@dataclass
class DehnCertificate:
    """A functional refuting the square-tiling axioms for this data."""

    functional: dict[int, Rat]
    lhs: Rat  # f(muX) * f(muY)
    piece_products: list[Rat]  # f(muA_i) * f(muB_i)
    violated: MeasureVerdict

    @property
    def kind(self) -> str:
        return "certificate"


def _canonical_base(table: SymbolTable, sample: Scalar) -> Scalar:
    items = sorted(sample.coeffs.items())
    denom_lcm = 1
    for _, v in items:
        q = as_rat(v).denominator
        denom_lcm = denom_lcm * q // _gcd(denom_lcm, q)
    ints = [(idx, int(as_rat(v) * denom_lcm)) for idx, v in items]
    g = 0
    for _, n in ints:
        g = _gcd(g, abs(n))
    if ints[0][1] < 0:
        g = -g
    return Scalar(table, {idx: Rat(n, g) for idx, n in ints})


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def dehn_test(t: MeasureTiling):
    """CommensurableVerdict when all measures share one rational direction,
    else a DehnCertificate whose functional makes the square axioms absurd.
    """
    table = t.table
    elements = t.x_measures + t.y_measures
    base = _canonical_base(table, elements[0])
    ratios = [commensurable(base, m) for m in elements]
    if all(r is not None for r in ratios):
        nx = len(t.x_measures)
        return CommensurableVerdict(base, ratios[:nx], ratios[nx:])

    mu_x, mu_y = t.mu_x(), t.mu_y()
    if commensurable(mu_x, mu_y) is None:
        f = solve_functional([(mu_x, Rat(1)), (mu_y, Rat(-1))])
    else:
        target = None
        for i in range(len(t.pieces)):
            if commensurable(t.mu_a(i), mu_x) is None:
                target = i
                break
        if target is None:
            raise InternalInconsistency(
                "mixed-direction measures but every piece is parallel to the "
                "total; the data does not decide commensurability"
            )
        f = solve_functional([(mu_x, Rat(0)), (t.mu_a(target), Rat(1))])
    lhs, rhs = functional_identity(t, f)
    # under the axioms rhs is a sum of squares equal to lhs, yet lhs is
    # negative or smaller than one of its terms; some axiom must fail
    violated = verify_measure_tiling(t)
    if violated.ok:
        raise InternalInconsistency(
            "functional contradiction against a tiling that verifies clean"
        )
    products = [
        apply_functional(f, t.mu_a(i)) * apply_functional(f, t.mu_b(i))
        for i in range(len(t.pieces))
    ]
    return DehnCertificate(f, lhs, products, violated)


# ---------------------------------------------------------------------------
# the two-rectangle variant
# ---------------------------------------------------------------------------


@dataclass
class QRCommensurable:
    ratio: Rat  # q as a multiple of r

    @property
    def kind(self) -> str:
        return "qr-commensurable"


@dataclass
class DehnPlusCertificate:
    functional: dict[int, Rat]
    f_mu_x: Rat  # forced to -2
    f_mu_y: Rat  # forced to 0
    rect_products: list[Rat]  # 2 - a/2 each
    designated_square_sum: Rat  # sum of rho_i^2
    designated_bound: Rat  # a - 4, strictly exceeded
    violated: MeasureVerdict

    @property
    def kind(self) -> str:
        return "certificate"


def dehn_plus_test(t: MeasureTiling, q: Scalar, r: Scalar, a, designated: Sequence[int]):
    """Decide q versus r from a verified two-rectangle tiling.

    The caller asserts: totals muX = 2q + a*r and muY = q + (a/2 - 1)*r,
    pieces 0 and 1 are r by (q + r) rectangles, everything else is square,
    and the designated squares are rational multiples rho_i of r with
    sum rho_i^2 strictly above a - 4.  Those claims are audited here and
    an AuditFailure names the first broken clause.
    """
    table = t.table
    a = as_rat(a)
    designated = sorted(set(designated))

    if t.mu_x() != q.scale(2) + r.scale(a):
        raise AuditFailure(1, "muX is not 2q + a*r")
    if t.mu_y() != q + r.scale(a / 2 - 1):
        raise AuditFailure(1, "muY is not q + (a/2 - 1)*r")

    want = {r.key(), (q + r).key()}
    for i in (0, 1):
        if i >= len(t.pieces):
            raise AuditFailure(2, "missing rectangle piece")
        got = {t.mu_a(i).key(), t.mu_b(i).key()}
        if got != want:
            raise AuditFailure(2, f"piece {i} is not an r by q+r rectangle")

    for i in range(2, len(t.pieces)):
        if t.mu_a(i) != t.mu_b(i):
            raise AuditFailure(3, f"piece {i} is not square")

    rho: dict[int, Rat] = {}
    for i in designated:
        if i < 2:
            raise AuditFailure(4, "designated index points at a rectangle")
        ratio = commensurable(r, t.mu_a(i))
        if ratio is None:
            raise AuditFailure(4, f"designated piece {i} is not commensurable with r")
        rho[i] = ratio
    square_sum = Area(table, {})
    for i in designated:
        square_sum = square_sum + t.mu_a(i) * t.mu_a(i)
    bound = (r * r).scale(a - 4)
    cmp = table.require(
        compare_area(square_sum, bound), "designated square bound undecidable"
    )
    if cmp is not Comparison.GREATER:
        raise AuditFailure(4, "designated squares do not strictly exceed (a - 4) r^2")

    ratio_qr = commensurable(r, q)
    if ratio_qr is not None:
        return QRCommensurable(ratio_qr)

    f = solve_functional([(q, a / 2 - 1), (r, Rat(-1))])
    f_mu_x = apply_functional(f, t.mu_x())
    f_mu_y = apply_functional(f, t.mu_y())
    if f_mu_x != -2 or f_mu_y != 0:
        raise InternalInconsistency("functional does not reproduce the audited totals")
    rect_products = [
        apply_functional(f, t.mu_a(i)) * apply_functional(f, t.mu_b(i)) for i in (0, 1)
    ]
    if any(p != 2 - a / 2 for p in rect_products):
        raise InternalInconsistency("rectangle contributions drifted from 2 - a/2")
    rho_sq = Rat(0)
    for i in designated:
        rho_sq += rho[i] * rho[i]
    if not rho_sq > a - 4:
        raise InternalInconsistency("designated ratio bound lost in translation")
    violated = verify_measure_tiling(t, skip_square=frozenset({0, 1}))
    if violated.ok:
        raise InternalInconsistency(
            "incommensurable q, r against a tiling that verifies clean"
        )
    return DehnPlusCertificate(
        functional=f,
        f_mu_x=f_mu_x,
        f_mu_y=f_mu_y,
        rect_products=rect_products,
        designated_square_sum=rho_sq,
        designated_bound=a - 4,
        violated=violated,
    )


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------
#
#   symbol NAME pi
#   symbol NAME <decimal> err <rational>
#   space X x1=<scalar> x2=<scalar> ...
#   space Y y1=<scalar> ...
#   piece A={x1,x3} B={y2}


def parse_measure_tiling(text: str, precision_bits: int | None = None) -> MeasureTiling:
    from .scalars import DEFAULT_PRECISION_BITS

    table = SymbolTable(precision_bits or DEFAULT_PRECISION_BITS)
    spaces: dict[str, list[tuple[str, Scalar]]] = {}
    piece_specs: list[tuple[list[str], list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "symbol":
                if len(parts) == 3 and parts[2] == "pi":
                    table.declare_pi_symbol(parts[1])
                elif len(parts) == 5 and parts[3] == "err":
                    from fractions import Fraction

                    err = parse_scalar(table, parts[4])
                    table.declare_decimal_symbol(
                        parts[1], Rat(Fraction(parts[2])), err.coeffs.get(0, Rat(0))
                    )
                else:
                    raise ValueError("bad symbol line")
            elif parts[0] == "space":
                if len(parts) < 3 or parts[1] not in ("X", "Y"):
                    raise ValueError("expected 'space X|Y name=<scalar> ...'")
                if parts[1] in spaces:
                    raise ValueError(f"duplicate space {parts[1]}")
                elems = []
                for item in parts[2:]:
                    name, _, lit = item.partition("=")
                    if not lit:
                        raise ValueError(f"expected name=value, got {item!r}")
                    elems.append((name, parse_scalar(table, lit)))
                spaces[parts[1]] = elems
            elif parts[0] == "piece":
                sides = {}
                for item in parts[1:]:
                    side, _, names = item.partition("=")
                    if side not in ("A", "B") or not names.startswith("{") or not names.endswith("}"):
                        raise ValueError(f"expected A={{...}} B={{...}}, got {item!r}")
                    inner = names[1:-1]
                    sides[side] = [n for n in inner.split(",") if n] if inner else []
                if set(sides) != {"A", "B"}:
                    raise ValueError("piece needs both A and B")
                piece_specs.append((sides["A"], sides["B"]))
            else:
                raise ValueError(f"unknown directive {parts[0]!r}")
        except (ValueError, KeyError) as exc:
            raise GraphFormatError(str(exc), lineno) from None
    if "X" not in spaces or "Y" not in spaces:
        raise GraphFormatError("missing space X or space Y")
    x_index = {n: i for i, (n, _) in enumerate(spaces["X"])}
    y_index = {n: i for i, (n, _) in enumerate(spaces["Y"])}
    pieces = []
    for a_names, b_names in piece_specs:
        try:
            pieces.append(
                ([x_index[n] for n in a_names], [y_index[n] for n in b_names])
            )
        except KeyError as exc:
            raise GraphFormatError(f"piece references unknown element {exc.args[0]}")
    try:
        return MeasureTiling(table, spaces["X"], spaces["Y"], pieces)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from None


def serialize_measure_tiling(t: MeasureTiling) -> str:
    lines = []
    for sym in t.table.user_symbols():
        if sym.kind == "pi":
            lines.append(f"symbol {sym.name} pi")
        elif sym.kind == "decimal":
            from .graph import _decimal_text

            lines.append(f"symbol {sym.name} {_decimal_text(sym.value)} err {rat_str(sym.radius)}")
        else:
            raise ValueError(f"symbol {sym.name} has no text form")
    lines.append(
        "space X " + " ".join(f"{n}={format_scalar(m).replace(' ', '')}" for n, m in zip(t.x_names, t.x_measures))
    )
    lines.append(
        "space Y " + " ".join(f"{n}={format_scalar(m).replace(' ', '')}" for n, m in zip(t.y_names, t.y_measures))
    )
    for a, b in t.pieces:
        an = ",".join(t.x_names[j] for j in sorted(a))
        bn = ",".join(t.y_names[k] for k in sorted(b))
        lines.append(f"piece A={{{an}}} B={{{bn}}}")
    return "\n".join(lines) + "\n"
