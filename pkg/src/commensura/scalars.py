"""Exact scalars over a finite symbol basis.

A Scalar is a finite rational combination of basis symbols.  Two symbols are
always present: the rational unit ``1`` and ``PI``.  Users may declare more
(a decimal approximation with an explicit error radius, an optional
refinement callback, or another handle on the built-in pi stream).  The
declared symbols together with 1 are *asserted* Q-linearly independent; that
assertion is a trust assumption of every equality decision below and is
deliberately not re-derived here.

Equality is decided symbolically (equal coefficient maps).  Strict order is
decided numerically but soundly: the difference is enclosed in a rational
interval that is refined until the sign is certain or the bit budget runs
out, in which case the comparison reports INDETERMINATE rather than guess.
No floating point enters any decision.

Products of Scalars live in a separate Area type whose basis is unordered
symbol pairs.  Areas support addition, rational scaling and the same
certified comparisons; they never multiply further.

Instances are immutable after construction; the only internal mutation is a
monotone enclosure cache, which only ever shrinks intervals, so concurrent
readers stay sound.
"""

from __future__ import annotations

import re
from enum import Enum
from typing import Callable, Iterable, Optional

from ._rat import Rat, as_rat, rat_str
from .errors import MixedSymbolTables, PrecisionExhausted

DEFAULT_PRECISION_BITS = 256
_LADDER_START = 64

RatPair = tuple  # (lo, hi) rational interval


class Comparison(Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    INDETERMINATE = "indeterminate"


# ---------------------------------------------------------------------------
# pi enclosure
#
# Machin's identity pi = 16*atan(1/5) - 4*atan(1/239), with the alternating
# series bounded by its first omitted term.  All work is integer arithmetic
# at scale 2**(bits + guard); the bookkeeping below accounts for every floor
# division, so the returned interval is a true enclosure.  Successive calls
# are intersected with the best interval so far, which makes refinement
# nested by construction.
# ---------------------------------------------------------------------------


def _atan_inv_scaled(k: int, scale: int, bits: int) -> tuple[int, int]:
    """Integer bounds [lo, hi] with atan(1/k)*scale in [lo, hi]."""
    ksq = k * k
    power = k  # k**(2i+1)
    i = 0
    acc = 0
    terms = 0
    while True:
        term = scale // ((2 * i + 1) * power)
        if i % 2 == 0:
            acc += term
        else:
            acc -= term
        terms += 1
        if term == 0:
            break
        power *= ksq
        i += 1
        # stop once the next term is provably below target resolution
        if scale // ((2 * i + 1) * power) == 0 and i % 2 == 0:
            pass  # let the loop emit one more zero term and exit
    # Each floor division under-counts by < 1, over terms of both signs, so
    # acc is within `terms` of the exact partial sum; the tail of the
    # alternating series is below the first omitted term, already < 1 here.
    slack = terms + 1
    return acc - slack, acc + slack


class _PiStream:
    """Shared, monotonically refining rational enclosure of pi."""

    def __init__(self) -> None:
        self._best: dict[int, RatPair] = {}
        self._widest: RatPair | None = None

    def enclosure(self, bits: int) -> RatPair:
        cached = self._best.get(bits)
        if cached is not None:
            return cached
        guard = 16
        scale = 1 << (bits + guard)
        lo5, hi5 = _atan_inv_scaled(5, scale, bits)
        lo239, hi239 = _atan_inv_scaled(239, scale, bits)
        lo_int = 16 * lo5 - 4 * hi239
        hi_int = 16 * hi5 - 4 * lo239
        lo = Rat(lo_int, scale)
        hi = Rat(hi_int, scale)
        if self._widest is not None:
            plo, phi = self._widest
            if plo > lo:
                lo = plo
            if phi < hi:
                hi = phi
        self._widest = (lo, hi)
        self._best[bits] = (lo, hi)
        return (lo, hi)


_PI = _PiStream()


class _Symbol:
    __slots__ = ("name", "kind", "value", "radius", "refiner", "_cache")

    def __init__(self, name, kind, value=None, radius=None, refiner=None):
        self.name = name
        self.kind = kind  # "unit" | "pi" | "decimal" | "callback"
        self.value = value
        self.radius = radius
        self.refiner = refiner
        self._cache: RatPair | None = None

    def enclosure(self, bits: int) -> RatPair:
        if self.kind == "unit":
            one = Rat(1)
            return (one, one)
        if self.kind == "pi":
            return _PI.enclosure(bits)
        if self.kind == "decimal":
            return (self.value - self.radius, self.value + self.radius)
        lo, hi = self.refiner(bits)
        lo, hi = as_rat(lo), as_rat(hi)
        if self._cache is not None:
            plo, phi = self._cache
            lo = max(lo, plo)
            hi = min(hi, phi)
        if lo > hi:
            raise PrecisionExhausted(f"refiner for {self.name} produced non-nested intervals")
        self._cache = (lo, hi)
        return (lo, hi)


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class SymbolTable:
    """Declaration context shared by every Scalar and Area built from it.

    Index 0 is the rational unit, index 1 is PI; user symbols follow in
    declaration order.  The table carries the default precision budget used
    by comparisons that do not override it.
    """

    def __init__(self, precision_bits: int = DEFAULT_PRECISION_BITS):
        if precision_bits < _LADDER_START:
            precision_bits = _LADDER_START
        self.precision_bits = precision_bits
        self._symbols: list[_Symbol] = [
            _Symbol("1", "unit"),
            _Symbol("PI", "pi"),
        ]
        self._index: dict[str, int] = {"1": 0, "PI": 1}

    # -- declarations -------------------------------------------------------

    def declare_decimal_symbol(self, name: str, approx, radius) -> int:
        approx = as_rat(approx)
        radius = as_rat(radius)
        if radius <= 0:
            raise ValueError("error radius must be positive")
        return self._add(_Symbol(name, "decimal", value=approx, radius=radius))

    def declare_pi_symbol(self, name: str) -> int:
        """A user-named symbol backed by the built-in pi refinement.

        Declaring one *and* mixing it with PI in the same expression breaks
        the linear-independence trust assumption; comparisons will then
        honestly report INDETERMINATE instead of deciding.
        """
        return self._add(_Symbol(name, "pi"))

    def declare_callback_symbol(self, name: str, refiner: Callable[[int], RatPair]) -> int:
        return self._add(_Symbol(name, "callback", refiner=refiner))

    def _add(self, sym: _Symbol) -> int:
        if not _NAME_RE.match(sym.name):
            raise ValueError(f"bad symbol name: {sym.name!r}")
        if sym.name in self._index:
            raise ValueError(f"duplicate symbol: {sym.name}")
        self._symbols.append(sym)
        idx = len(self._symbols) - 1
        self._index[sym.name] = idx
        return idx

    # -- introspection ------------------------------------------------------

    def symbol_names(self) -> list[str]:
        return [s.name for s in self._symbols]

    def user_symbols(self) -> list[_Symbol]:
        return self._symbols[2:]

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown symbol: {name}") from None

    def name_of(self, idx: int) -> str:
        return self._symbols[idx].name

    def enclosure(self, idx: int, bits: int) -> RatPair:
        return self._symbols[idx].enclosure(bits)

    # -- constructors -------------------------------------------------------

    def zero(self) -> "Scalar":
        return Scalar(self, {})

    def rational(self, value) -> "Scalar":
        value = as_rat(value)
        return Scalar(self, {0: value} if value else {})

    def pi(self, coeff=1) -> "Scalar":
        coeff = as_rat(coeff)
        return Scalar(self, {1: coeff} if coeff else {})

    def symbol(self, name: str, coeff=1) -> "Scalar":
        coeff = as_rat(coeff)
        idx = self.index_of(name)
        return Scalar(self, {idx: coeff} if coeff else {})

    def parse(self, text: str) -> "Scalar":
        return parse_scalar(self, text)

    # -- decisions ----------------------------------------------------------

    def _interval_of(self, coeffs: dict, bits: int) -> RatPair:
        lo = Rat(0)
        hi = Rat(0)
        for idx, c in coeffs.items():
            slo, shi = self.enclosure(idx, bits)
            if c >= 0:
                lo += c * slo
                hi += c * shi
            else:
                lo += c * shi
                hi += c * slo
        return lo, hi

    def _sign_by_refinement(self, coeffs: dict, bits: int | None) -> Comparison:
        budget = self.precision_bits if bits is None else bits
        exact = all(self._symbols[i].kind == "unit" for i in coeffs)
        if exact:
            total = sum(coeffs.values(), Rat(0))
            if total > 0:
                return Comparison.GREATER
            if total < 0:
                return Comparison.LESS
            return Comparison.EQUAL
        cur = _LADDER_START
        while True:
            lo, hi = self._interval_of(coeffs, cur)
            if lo > 0:
                return Comparison.GREATER
            if hi < 0:
                return Comparison.LESS
            if cur >= budget:
                return Comparison.INDETERMINATE
            cur = min(cur * 2, budget)

    def compare(self, a: "Scalar", b: "Scalar", bits: int | None = None) -> Comparison:
        _check_same_table(a, b)
        diff = _sub_maps(a.coeffs, b.coeffs)
        if not diff:
            return Comparison.EQUAL
        return self._sign_by_refinement(diff, bits)

    def sign(self, a: "Scalar", bits: int | None = None) -> Comparison:
        if not a.coeffs:
            return Comparison.EQUAL
        return self._sign_by_refinement(a.coeffs, bits)

    def require(self, cmp: Comparison, context: str = "") -> Comparison:
        if cmp is Comparison.INDETERMINATE:
            raise PrecisionExhausted(context or "comparison undecided within bit budget")
        return cmp

    def approx(self, a: "Scalar", bits: int = 64):
        """Rational midpoint of an enclosure; presentation only."""
        lo, hi = self._interval_of(a.coeffs, bits)
        return (lo + hi) / 2


def _check_same_table(a, b) -> None:
    if a.table is not b.table:
        raise MixedSymbolTables("operands come from different symbol tables")


def _sub_maps(x: dict, y: dict) -> dict:
    out = dict(x)
    for k, v in y.items():
        nv = out.get(k, Rat(0)) - v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def _add_maps(x: dict, y: dict) -> dict:
    out = dict(x)
    for k, v in y.items():
        nv = out.get(k, Rat(0)) + v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


class Scalar:
    """Immutable rational combination of table symbols."""

    __slots__ = ("table", "coeffs", "_key")

    def __init__(self, table: SymbolTable, coeffs: dict):
        self.table = table
        self.coeffs = coeffs
        self._key = None

    def key(self) -> tuple:
        """Hashable canonical form (sorted coefficient items)."""
        if self._key is None:
            self._key = tuple(sorted(self.coeffs.items()))
        return self._key

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "Scalar") -> "Scalar":
        _check_same_table(self, other)
        return Scalar(self.table, _add_maps(self.coeffs, other.coeffs))

    def __sub__(self, other: "Scalar") -> "Scalar":
        _check_same_table(self, other)
        return Scalar(self.table, _sub_maps(self.coeffs, other.coeffs))

    def __neg__(self) -> "Scalar":
        return Scalar(self.table, {k: -v for k, v in self.coeffs.items()})

    def scale(self, factor) -> "Scalar":
        factor = as_rat(factor)
        if not factor:
            return Scalar(self.table, {})
        return Scalar(self.table, {k: v * factor for k, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, Scalar):
            _check_same_table(self, other)
            coeffs: dict = {}
            for i, ci in self.coeffs.items():
                for j, cj in other.coeffs.items():
                    key = (i, j) if i <= j else (j, i)
                    nv = coeffs.get(key, Rat(0)) + ci * cj
                    if nv:
                        coeffs[key] = nv
                    else:
                        coeffs.pop(key, None)
            return Area(self.table, coeffs)
        return self.scale(other)

    __rmul__ = __mul__

    def __truediv__(self, factor):
        return self.scale(Rat(1) / as_rat(factor))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.table is other.table and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((id(self.table), self.key()))

    def __repr__(self) -> str:
        return f"Scalar({format_scalar(self)})"


class Area:
    """Rational combination of unordered symbol pairs (Scalar x Scalar)."""

    __slots__ = ("table", "coeffs", "_key")

    def __init__(self, table: SymbolTable, coeffs: dict):
        self.table = table
        self.coeffs = coeffs
        self._key = None

    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(sorted(self.coeffs.items()))
        return self._key

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "Area") -> "Area":
        _check_same_table(self, other)
        return Area(self.table, _add_maps(self.coeffs, other.coeffs))

    def __sub__(self, other: "Area") -> "Area":
        _check_same_table(self, other)
        return Area(self.table, _sub_maps(self.coeffs, other.coeffs))

    def __neg__(self) -> "Area":
        return Area(self.table, {k: -v for k, v in self.coeffs.items()})

    def scale(self, factor) -> "Area":
        factor = as_rat(factor)
        if not factor:
            return Area(self.table, {})
        return Area(self.table, {k: v * factor for k, v in self.coeffs.items()})

    def __mul__(self, factor):
        if isinstance(factor, (Scalar, Area)):
            raise TypeError("Area supports only rational scaling")
        return self.scale(factor)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Area):
            return NotImplemented
        return self.table is other.table and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((id(self.table), self.key()))

    def __repr__(self) -> str:
        return f"Area({format_area(self)})"


def compare_area(a: Area, b: Area, bits: int | None = None) -> Comparison:
    """Certified comparison of Areas via products of symbol enclosures."""
    _check_same_table(a, b)
    diff = _sub_maps(a.coeffs, b.coeffs)
    if not diff:
        return Comparison.EQUAL
    table = a.table
    exact = all(
        table._symbols[i].kind == "unit" and table._symbols[j].kind == "unit"
        for (i, j) in diff
    )
    if exact:
        total = sum(diff.values(), Rat(0))
        if total > 0:
            return Comparison.GREATER
        if total < 0:
            return Comparison.LESS
        return Comparison.EQUAL
    budget = table.precision_bits if bits is None else bits
    cur = _LADDER_START
    while True:
        lo = Rat(0)
        hi = Rat(0)
        for (i, j), c in diff.items():
            ilo, ihi = table.enclosure(i, cur)
            jlo, jhi = table.enclosure(j, cur)
            products = (ilo * jlo, ilo * jhi, ihi * jlo, ihi * jhi)
            plo, phi = min(products), max(products)
            if c >= 0:
                lo += c * plo
                hi += c * phi
            else:
                lo += c * phi
                hi += c * plo
        if lo > 0:
            return Comparison.GREATER
        if hi < 0:
            return Comparison.LESS
        if cur >= budget:
            return Comparison.INDETERMINATE
        cur = min(cur * 2, budget)


# ---------------------------------------------------------------------------
# commensurability
# ---------------------------------------------------------------------------


def commensurable(a: Scalar, b: Scalar) -> Optional[object]:
    """Exact rational ratio rho with b == rho * a, or None.

    Decided purely on coefficient vectors (Q-parallel test); valid under the
    declared-independence trust assumption.  Raises when both are zero.
    """
    _check_same_table(a, b)
    if a.is_zero() and b.is_zero():
        raise ValueError("commensurable ratio of zero with zero is undefined")
    if a.is_zero():
        return None
    if b.is_zero():
        return Rat(0)
    idx = next(iter(a.coeffs))
    if idx not in b.coeffs:
        return None
    rho = b.coeffs[idx] / a.coeffs[idx]
    if b.coeffs == {k: v * rho for k, v in a.coeffs.items()}:
        return rho
    return None


def pi_ratio(a: Scalar) -> Optional[object]:
    """Ratio a / PI when a is a rational multiple of PI, else None."""
    return commensurable(a.table.pi(), a)


# ---------------------------------------------------------------------------
# literal grammar:  term (("+"|"-") term)*
#   term     := rational | rational "*" SYMBOL | SYMBOL
#   rational := int | int "/" int          (leading sign allowed)
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<rat>-?\d+(?:\s*/\s*\d+)?)|(?P<sym>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[+\-*]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].strip()
            if not rest:
                break
            raise ValueError(f"bad scalar literal near {rest[:20]!r}")
        if m.group("rat"):
            tokens.append(("rat", m.group("rat").replace(" ", "")))
        elif m.group("sym"):
            tokens.append(("sym", m.group("sym")))
        else:
            tokens.append(("op", m.group("op")))
        pos = m.end()
    return tokens


def _parse_rat(text: str):
    if "/" in text:
        num, den = text.split("/")
        d = int(den)
        if d == 0:
            raise ValueError("zero denominator in rational literal")
        return Rat(int(num), d)
    return Rat(int(text))


def parse_scalar(table: SymbolTable, text: str) -> Scalar:
    tokens = _tokenize(text)
    if not tokens:
        raise ValueError("empty scalar literal")
    result = table.zero()
    i = 0
    sign = 1
    first = True
    while i < len(tokens):
        if not first:
            kind, val = tokens[i]
            if kind != "op" or val not in "+-":
                raise ValueError(f"expected + or - at token {val!r}")
            sign = 1 if val == "+" else -1
            i += 1
        kind, val = tokens[i] if i < len(tokens) else (None, None)
        if kind == "rat":
            coeff = _parse_rat(val) * sign
            i += 1
            if i < len(tokens) and tokens[i] == ("op", "*"):
                i += 1
                if i >= len(tokens) or tokens[i][0] != "sym":
                    raise ValueError("expected symbol after '*'")
                result = result + table.symbol(tokens[i][1], coeff)
                i += 1
            else:
                result = result + table.rational(coeff)
        elif kind == "sym":
            result = result + table.symbol(val, sign)
            i += 1
        else:
            raise ValueError("expected a term")
        first = False
    return result


def _term_text(table: SymbolTable, idx: int, coeff) -> str:
    if idx == 0:
        return rat_str(coeff)
    name = table.name_of(idx)
    if coeff == 1:
        return name
    return f"{rat_str(coeff)}*{name}"


def format_scalar(a: Scalar) -> str:
    """Canonical literal; symbols in table order, the rational part last."""
    if not a.coeffs:
        return "0"
    order = sorted(a.coeffs, key=lambda i: (i == 0, i))
    parts = []
    for pos, idx in enumerate(order):
        c = a.coeffs[idx]
        if pos == 0:
            parts.append(_term_text(a.table, idx, c))
        elif c > 0:
            parts.append(f"+ {_term_text(a.table, idx, c)}")
        else:
            parts.append(f"- {_term_text(a.table, idx, -c)}")
    return " ".join(parts)


def format_area(a: Area) -> str:
    """Readable pair-basis form, e.g. ``16/9*PI*PI``; reports only."""
    if not a.coeffs:
        return "0"
    order = sorted(a.coeffs, key=lambda p: (p == (0, 0), p[0] == 0, p))
    parts = []
    for pos, pair in enumerate(order):
        c = a.coeffs[pair]
        mag = c if pos == 0 else abs(c)
        i, j = pair
        names = [a.table.name_of(k) for k in (i, j) if k != 0]
        if names:
            body = "*".join([rat_str(mag)] + names)
        else:
            body = rat_str(mag)
        if pos == 0:
            parts.append(body)
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return " ".join(parts)


def sum_scalars(items: Iterable[Scalar], table: SymbolTable) -> Scalar:
    total = table.zero()
    for s in items:
        total = total + s
    return total


def sum_areas(items: Iterable[Area], table: SymbolTable) -> Area:
    total = Area(table, {})
    for a in items:
        total = total + a
    return total
