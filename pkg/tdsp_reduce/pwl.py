"""
Exact algebra of monotone piecewise-linear arrival functions.

An arrival function maps a departure time ``t >= 0`` to the earliest arrival
time.  It is stored as an ordered tuple of :class:`Piece`, each a line
``slope * t + intercept`` valid from its ``start`` until the next piece
begins; the last piece extends to infinity.  All arithmetic is done with
:class:`fractions.Fraction`, so breakpoints found by :func:`minimum` and
:func:`compose` are exact and functions may be compared with ``==``.

The everywhere-infinite function (an edge that cannot be travelled in some
direction) is a distinguished value with no pieces, see :func:`infinity`.
"""
# std imports
import math
import heapq
import bisect
from fractions import Fraction
from typing import List, Tuple, Union, Optional, NamedTuple, Sequence
from dataclasses import dataclass

# local
from tdsp_reduce.errors import DomainError, StructuralError

INF = math.inf

NEGATIVE_SLOPE = "negative_slope"
ARRIVES_BEFORE_DEPARTURE = "arrives_before_departure"

Number = Union[int, Fraction]


class Piece(NamedTuple):
    start: Fraction
    slope: Fraction
    intercept: Fraction

    def value(self, t):
        return self.slope * t + self.intercept


class Breakpoint(NamedTuple):
    t: Fraction
    value: Fraction
    left_slope: Fraction
    right_slope: Fraction


class FifoViolation(NamedTuple):
    piece: int
    constraint: str
    t: Fraction

    def __str__(self):
        if self.constraint == NEGATIVE_SLOPE:
            return f"piece {self.piece}: negative slope, departing later arrives earlier"
        return f"piece {self.piece}: f(t) < t at t={self.t}"


@dataclass(frozen=True)
class PwlFunction:
    """
    Continuous piecewise-linear function on ``[0, inf)``, or the infinite function.

    Build instances with :func:`linear`, :func:`from_points`,
    :func:`parse_function` or the algebra operations, which always return
    canonical functions.  Constructing directly only checks that pieces are
    sorted and start at zero; continuity is checked by :func:`canonicalize`.
    """

    pieces: Tuple[Piece, ...] = ()
    is_infinite: bool = False

    def __post_init__(self):
        pieces = tuple(
            Piece(Fraction(start), Fraction(slope), Fraction(intercept))
            for start, slope, intercept in self.pieces
        )
        if self.is_infinite:
            if pieces:
                raise StructuralError("the infinite function has no pieces")
        else:
            if not pieces:
                raise StructuralError("a finite function needs at least one piece")
            if pieces[0].start != 0:
                raise StructuralError(f"first piece starts at {pieces[0].start}, not 0")
            for prev, piece in zip(pieces, pieces[1:]):
                if piece.start <= prev.start:
                    raise StructuralError(
                        f"piece starts are not strictly increasing at t={piece.start}"
                    )
        object.__setattr__(self, "pieces", pieces)
        object.__setattr__(self, "starts", tuple(piece.start for piece in pieces))

    def __call__(self, t):
        return evaluate(self, t)

    def __str__(self):
        return format_function(self)


def identity() -> PwlFunction:
    return PwlFunction((Piece(0, 1, 0),))


def infinity() -> PwlFunction:
    return PwlFunction((), is_infinite=True)


def linear(slope: Number, intercept: Number) -> PwlFunction:
    return PwlFunction((Piece(0, slope, intercept),))


def from_points(points: Sequence[Tuple[Number, Number]], final_slope: Number) -> PwlFunction:
    """
    Return canonical function through ``points``, continuing with ``final_slope``.

    ``points`` are ``(t, value)`` pairs in increasing ``t``, the first at
    ``t = 0``.  Consecutive points are joined by straight segments.
    """
    if not points:
        raise StructuralError("at least the point at t=0 is required")
    points = [(Fraction(t), Fraction(v)) for t, v in points]
    if points[0][0] != 0:
        raise StructuralError(f"first point is at t={points[0][0]}, not 0")
    pieces = []
    for (t0, v0), (t1, v1) in zip(points, points[1:]):
        if t1 <= t0:
            raise StructuralError(f"point times are not strictly increasing at t={t1}")
        slope = (v1 - v0) / (t1 - t0)
        pieces.append(Piece(t0, slope, v0 - slope * t0))
    t_last, v_last = points[-1]
    final_slope = Fraction(final_slope)
    pieces.append(Piece(t_last, final_slope, v_last - final_slope * t_last))
    return canonicalize(PwlFunction(tuple(pieces)))


def _piece_index(f: PwlFunction, t) -> int:
    return bisect.bisect_right(f.starts, t) - 1


def evaluate(f: PwlFunction, t: Number):
    if t < 0:
        raise DomainError(f"departure time must be >= 0, got {t}")
    if f.is_infinite:
        return INF
    t = Fraction(t)
    return f.pieces[_piece_index(f, t)].value(t)


def canonicalize(f: PwlFunction) -> PwlFunction:
    """
    Merge collinear adjacent pieces.

    :raises StructuralError: when two adjacent pieces disagree at their
        shared breakpoint.
    """
    if f.is_infinite:
        return f
    merged = [f.pieces[0]]
    for piece in f.pieces[1:]:
        prev = merged[-1]
        if prev.value(piece.start) != piece.value(piece.start):
            raise StructuralError(
                f"discontinuous at t={piece.start}: "
                f"{prev.value(piece.start)} != {piece.value(piece.start)}"
            )
        if piece.slope != prev.slope:
            merged.append(piece)
    if len(merged) == len(f.pieces):
        return f
    return PwlFunction(tuple(merged))


def breakpoint_count(f: PwlFunction) -> int:
    return max(0, len(f.pieces) - 1)


def breakpoints(f: PwlFunction) -> List[Breakpoint]:
    return [
        Breakpoint(piece.start, piece.value(piece.start), prev.slope, piece.slope)
        for prev, piece in zip(f.pieces, f.pieces[1:])
    ]


def validate_fifo(f: PwlFunction) -> List[FifoViolation]:
    """
    Return FIFO violations of ``f``, one at most per piece.

    A piece may have a negative slope, or arrive before departure somewhere
    on it.  Values are linear between piece starts, so checking each start
    and the slope of the unbounded last piece covers every ``t``.
    """
    if f.is_infinite:
        return []
    violations = []
    last = len(f.pieces) - 1
    for idx, piece in enumerate(f.pieces):
        if piece.slope < 0:
            violations.append(FifoViolation(idx, NEGATIVE_SLOPE, piece.start))
        elif piece.value(piece.start) < piece.start:
            violations.append(FifoViolation(idx, ARRIVES_BEFORE_DEPARTURE, piece.start))
        elif idx == last and piece.slope < 1:
            # f(t) - t = (slope - 1) * t + intercept eventually goes negative
            crossing = piece.intercept / (1 - piece.slope)
            violations.append(
                FifoViolation(idx, ARRIVES_BEFORE_DEPARTURE, max(crossing, piece.start) + 1)
            )
    return violations


def is_fifo(f: PwlFunction) -> bool:
    return not validate_fifo(f)


def minimum(f: PwlFunction, g: PwlFunction) -> PwlFunction:
    """
    Pointwise minimum of ``f`` and ``g``.

    One merge pass over the piece starts of both functions; within each
    merged interval both are single lines, which cross at most once.
    """
    if f.is_infinite:
        return g
    if g.is_infinite:
        return f
    cuts = list(_unique(heapq.merge(f.starts, g.starts)))
    pieces = []
    i = j = 0
    for k, lo in enumerate(cuts):
        hi = cuts[k + 1] if k + 1 < len(cuts) else None
        while i + 1 < len(f.pieces) and f.starts[i + 1] <= lo:
            i += 1
        while j + 1 < len(g.pieces) and g.starts[j + 1] <= lo:
            j += 1
        a, b = f.pieces[i], g.pieces[j]
        sub_starts = [lo]
        if a.slope != b.slope:
            crossing = (b.intercept - a.intercept) / (a.slope - b.slope)
            if crossing > lo and (hi is None or crossing < hi):
                sub_starts.append(crossing)
        for start in sub_starts:
            # no crossing strictly inside, so the order at start decides
            low = min(a, b, key=lambda line: (line.value(start), line.slope))
            pieces.append(Piece(start, low.slope, low.intercept))
    return canonicalize(PwlFunction(tuple(pieces)))


def _unique(sorted_values):
    last = None
    for value in sorted_values:
        if value != last:
            yield value
            last = value


def compose(g: PwlFunction, f: PwlFunction) -> PwlFunction:
    """
    Return ``g o f``, the function ``t -> g(f(t))``.

    The images of the piece starts of ``f`` are sorted because ``f`` is
    nondecreasing, so the pieces of ``g`` are walked once alongside them;
    a new piece begins at every start of ``f`` and at every preimage of a
    start of ``g``.
    """
    if f.is_infinite or g.is_infinite:
        return infinity()
    pieces = []
    j = 0
    for i, p in enumerate(f.pieces):
        if p.slope < 0:
            raise DomainError(f"cannot compose through decreasing piece at t={p.start}")
        hi = f.starts[i + 1] if i + 1 < len(f.pieces) else None
        t = p.start
        while True:
            v = p.value(t)
            if v < 0:
                raise DomainError(f"inner function is negative at t={t}")
            while j + 1 < len(g.pieces) and g.starts[j + 1] <= v:
                j += 1
            q = g.pieces[j]
            pieces.append(Piece(t, q.slope * p.slope, q.slope * p.intercept + q.intercept))
            if p.slope > 0 and j + 1 < len(g.pieces):
                t_next = (g.starts[j + 1] - p.intercept) / p.slope
                if hi is None or t_next < hi:
                    t = t_next
                    continue
            break
    return canonicalize(PwlFunction(tuple(pieces)))


def format_function(f: PwlFunction) -> str:
    """Serialize as ``t0:v0;t1:v1;...@slope`` or ``inf``."""
    if f.is_infinite:
        return "inf"
    points = ";".join(f"{piece.start}:{piece.value(piece.start)}" for piece in f.pieces)
    return f"{points}@{f.pieces[-1].slope}"


def parse_function(token: str) -> PwlFunction:
    token = token.strip()
    if token == "inf":
        return infinity()
    body, sep, slope = token.rpartition("@")
    if not sep or not body:
        raise StructuralError(f"expected 't:v;...@slope' or 'inf', got {token!r}")
    try:
        points = []
        for item in body.split(";"):
            t, colon, value = item.partition(":")
            if not colon:
                raise StructuralError(f"expected 't:v' pair, got {item!r}")
            points.append((Fraction(t), Fraction(value)))
        final_slope = Fraction(slope)
    except (ValueError, ZeroDivisionError) as err:
        raise StructuralError(f"bad number in {token!r}: {err}") from err
    return from_points(points, final_slope)


def pieces_of(f: PwlFunction) -> int:
    return len(f.pieces)


def grid(f: PwlFunction, extra: Optional[Sequence[Number]] = None) -> List[Fraction]:
    """
    Return departure times that pin down ``f``.

    Zero, every breakpoint, every midpoint between consecutive breakpoints and
    one point past the last breakpoint, plus ``extra``, sorted and unique.
    """
    times = {Fraction(0)}
    starts = list(f.starts)
    times.update(starts)
    times.update((a + b) / 2 for a, b in zip(starts, starts[1:]))
    times.add((starts[-1] if starts else Fraction(0)) + 1)
    times.update(Fraction(t) for t in (extra or ()) if t >= 0)
    return sorted(times)
