"""Coefficient sequences, tail-sum sets and information functions.

For a square-summable sequence with sum of squares 1, the tail set

    B = {sum of a_m**2 for m >= n : n >= 1} together with 0

partitions (0,1]; the information function assigns to each gap
(alpha, beta] between consecutive points the value -log_base(beta-alpha).
Base 3 is the variant the operator calculus works with, base 2 the one
the classical criteria use.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .exactnum import as_float, format_rational, num_le, parse_rational
from .stepfn import StepFunction, grid_size, grid_width

__all__ = [
    "CoefficientSeq",
    "PointSet",
    "tail_set",
    "info_fn",
    "info_fn_closed",
    "cantor_points",
    "cantor_info_fn",
    "dyadic_floor",
    "dyadic_halffloor",
    "floor_pow2",
    "is_triadic_fn",
    "is_type_level",
    "type_level_representation",
]

ZERO = Fraction(0)
ONE = Fraction(1)

# materialization guard for per-cell representations at deep levels
MAX_REPRESENTATION_CELLS = 200_000


class CoefficientSeq:
    """Finite coefficient sequence with exact squares.

    Inputs may be Fractions, ints, floats, or strings like '1/3' or
    '0.25'.  Squares and tail sums are kept as exact rationals; the
    normalized form rescales the squares so they sum to 1 exactly.
    """

    def __init__(self, coeffs):
        vals = [parse_rational(c) for c in coeffs]
        if not vals:
            raise ValueError("empty coefficient sequence")
        self.coeffs = tuple(vals)
        self.squares = tuple(c * c for c in vals)
        self.total = sum(self.squares, start=ZERO)

    @classmethod
    def from_squares(cls, squares):
        """Build from exact squared moduli (values used by every criterion)."""
        sq = [parse_rational(s) for s in squares]
        if not sq:
            raise ValueError("empty coefficient sequence")
        if any(s < 0 for s in sq):
            raise ValueError("squares must be nonnegative")
        obj = cls.__new__(cls)
        obj.coeffs = tuple(as_float(s) ** 0.5 for s in sq)
        obj.squares = tuple(sq)
        obj.total = sum(sq, start=ZERO)
        return obj

    def __len__(self):
        return len(self.coeffs)

    def normalized(self) -> "CoefficientSeq":
        """Rescale so that the squares sum to 1 exactly."""
        if self.total == 0:
            raise ValueError("cannot normalize the zero sequence")
        if self.total == 1:
            return self
        return CoefficientSeq.from_squares([s / self.total for s in self.squares])

    def is_normalized(self, tol=1e-12) -> bool:
        return abs(as_float(self.total) - 1.0) <= tol

    def abs_values(self):
        """|a_n| as floats (criteria depend on the moduli only)."""
        return [as_float(s) ** 0.5 for s in self.squares]

    def moduli_decreasing(self) -> bool:
        return all(self.squares[i] >= self.squares[i + 1]
                   for i in range(len(self.squares) - 1))


class PointSet:
    """Sorted set of exact rationals in [0,1] containing 0 and 1."""

    def __init__(self, points, closed: bool = False):
        pts = sorted({Fraction(p) for p in points})
        if not pts or pts[0] != ZERO or pts[-1] != ONE:
            raise ValueError("a point set must contain 0 and 1")
        if pts[0] < ZERO or pts[-1] > ONE:
            raise ValueError("points must lie in [0,1]")
        self.points = tuple(pts)
        self.closed = closed

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, t):
        t = Fraction(t)
        import bisect
        i = bisect.bisect_left(self.points, t)
        return i < len(self.points) and self.points[i] == t

    def __eq__(self, other):
        return isinstance(other, PointSet) and self.points == other.points

    def __hash__(self):
        return hash(self.points)

    def __repr__(self):
        if len(self.points) <= 8:
            inner = ", ".join(format_rational(p) for p in self.points)
        else:
            inner = "%s, ..., %s (%d points)" % (
                format_rational(self.points[0]), format_rational(self.points[-1]),
                len(self.points))
        return "PointSet{%s}" % inner

    def gaps(self):
        """Consecutive pairs (alpha, beta) with no set point in between."""
        return [(self.points[i], self.points[i + 1])
                for i in range(len(self.points) - 1)]

    def min_gap(self) -> Fraction:
        return min(b - a for a, b in self.gaps())

    def union(self, other) -> "PointSet":
        return PointSet(self.points + tuple(Fraction(p) for p in other))

    def restrict(self, lo, hi) -> tuple:
        lo, hi = Fraction(lo), Fraction(hi)
        return tuple(p for p in self.points if lo <= p <= hi)

    def to_json(self):
        return [format_rational(p) for p in self.points]

    @classmethod
    def from_json(cls, data):
        return cls([parse_rational(p) for p in data])


def tail_set(seq: CoefficientSeq) -> PointSet:
    """Tail sums of the squared coefficients, plus 0.

    Zero coefficients produce duplicate tails; duplicates collapse since
    the result is a set.  Requires a normalized sequence.
    """
    seq = seq.normalized()
    pts = [ZERO]
    tail = seq.total
    for s in seq.squares:
        pts.append(tail)
        tail -= s
    pts.append(tail)  # = 0 for a normalized sequence
    return PointSet(pts)


def _gap_log_value(gap: Fraction, base: int):
    """-log_base(gap), exact integer when gap is a power of 1/base."""
    num, den = gap.numerator, gap.denominator
    if num == 1:
        e = 0
        d = den
        while d % base == 0:
            d //= base
            e += 1
        if d == 1:
            return e
    return -math.log(as_float(gap)) / math.log(base)


def info_fn(B: PointSet, base: int = 3) -> StepFunction:
    """Information function of the partition of (0,1] given by B.

    Value -log_base(beta - alpha) on each gap (alpha, beta].  If every
    gap is a power of 1/base the values are exact integers, otherwise
    floats.
    """
    if base not in (2, 3):
        raise ValueError("base must be 2 or 3")
    gaps = B.gaps()
    exact = all(_is_power_gap(b - a, base) for a, b in gaps)
    bps, vals = [], []
    for a, b in gaps:
        bps.append(b)
        v = _gap_log_value(b - a, base)
        vals.append(v if exact else as_float(v))
    return StepFunction(bps, vals)


def _is_power_gap(gap: Fraction, base: int) -> bool:
    if gap.numerator != 1:
        return gap == ONE
    d = gap.denominator
    while d % base == 0:
        d //= base
    return d == 1


def info_fn_closed(B: PointSet, clip) -> StepFunction:
    """Closed-set information function with large values clipped.

    The exact function is +infinity on B itself; B is a null set for the
    closed sets handled here, so as a step function the result agrees
    with the finite-set information function off B, with values above
    ``clip`` replaced by ``clip``.
    """
    h = info_fn(B, base=3)
    return h.map_values(lambda v: v if num_le(v, clip) else clip)


def cantor_points(depth: int) -> PointSet:
    """Endpoints of the depth-d middle-thirds construction."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    intervals = [(ZERO, ONE)]
    for _ in range(depth):
        nxt = []
        for a, b in intervals:
            third = (b - a) / 3
            nxt.append((a, a + third))
            nxt.append((b - third, b))
        intervals = nxt
    pts = set()
    for a, b in intervals:
        pts.add(a)
        pts.add(b)
    return PointSet(pts, closed=True)


def cantor_info_fn(depth: int, clip) -> StepFunction:
    """Depth-d truncation of the Cantor-set information function.

    Value m on each removed middle third of generation m <= depth, and
    ``clip`` on the 2**d surviving intervals (standing in for all the
    deeper, larger values).
    """
    h = info_fn(cantor_points(depth), base=3)
    return h.map_values(lambda v: v if num_le(v, clip) else clip)


def floor_pow2(a):
    """Largest power 2**j <= a, for a >= 1; exponent returned too."""
    if not num_le(1, a):
        raise ValueError("dyadic floor defined for values >= 1 only")
    x = as_float(a)
    j = max(0, math.floor(math.log2(x)))
    # float log may be off by one near powers of two; fix exactly
    while not num_le(2 ** j, a):
        j -= 1
    while num_le(2 ** (j + 1), a):
        j += 1
    return j, Fraction(2 ** j)


def dyadic_floor(f: StepFunction) -> StepFunction:
    """Round every value down to a power of two: 2**j for 2**j <= v < 2**(j+1)."""
    return f.map_values(lambda v: floor_pow2(v)[1])


def dyadic_halffloor(f: StepFunction) -> StepFunction:
    """Half the dyadic floor: 2**(j-1) for 2**j <= v < 2**(j+1) (1/2 at j=0)."""
    return f.map_values(lambda v: floor_pow2(v)[1] / 2)


def _aligned(x: Fraction, size: int) -> bool:
    """True when x is an integer multiple of 1/size."""
    return (x.numerator * size) % x.denominator == 0


def is_triadic_fn(h: StepFunction, max_level: int = None):
    """Check the cell-alignment property of a bounded function h >= 1.

    For every j with 2**j <= max h, the level set (h >= 2**j) must be a
    union of level-j cells.  Returns (True, None) or (False, (j, n))
    with the first offending cell.  Works from the level-set boundaries,
    so no cell enumeration happens.
    """
    if not num_le(1, h.min_value()):
        raise ValueError("triadic functions must satisfy h >= 1")
    top = as_float(h.max_value())
    j_hi = 0
    while 2 ** (j_hi + 1) <= top:
        j_hi += 1
    if max_level is not None:
        j_hi = min(j_hi, max_level)
    for j in range(j_hi + 1):
        size = grid_size(j)
        for lo, hi in h.level_set_ge(2 ** j):
            for x in (lo, hi):
                if x not in (ZERO, ONE) and not _aligned(x, size):
                    n = (x.numerator * size) // x.denominator
                    return False, (j, n)
    return True, None


def is_type_level(h: StepFunction, j: int):
    """Normal-form check at level j.

    Requires h triadic with, additionally,
    1. h constant on every level-(j+1) cell, and
    2. every value below 2**(j+1) an exact power 2**j' with j' <= j.

    Returns (ok, reason).
    """
    tri, witness = is_triadic_fn(h)
    if not tri:
        return False, "not triadic at (level, cell)=%r" % (witness,)
    size = grid_size(j + 1)
    for b in h.breakpoints[:-1]:
        if not _aligned(b, size):
            return False, "not constant on level-%d cells (breakpoint %s)" % (
                j + 1, format_rational(b))
    limit = 2 ** (j + 1)
    for v in h.values:
        if num_le(limit, v):
            continue
        if not _is_exact_pow2_leq(v, j):
            return False, "value %r below %d is not a power 2**j' with j' <= %d" % (
                v, limit, j)
    return True, None


def _is_exact_pow2_leq(v, j: int) -> bool:
    for jp in range(j + 1):
        if num_le(2 ** jp, v) and num_le(v, 2 ** jp):
            return True
    return False


def type_level_representation(h: StepFunction, j: int):
    """Excess decomposition of a level-j normal form.

    For each level-j cell inside (h >= 2**j), the part of h - 2**j above
    2**j decomposes over the level-(j+1) cells where h >= 2**(j+1):

        (h - 2**j) 1_cell = sum_k (2**j + a_k) 1_{subcell(k)},  a_k >= 0.

    Returns a list of (m, [(n, a_k), ...]) with m the level-j cell index
    and n the level-(j+1) cell indices.  Raises if the number of listed
    subcells would be astronomically large.
    """
    ok, reason = is_type_level(h, j)
    if not ok:
        raise ValueError("not a level-%d normal form: %s" % (j, reason))
    wj = grid_width(j)
    wj1 = grid_width(j + 1)
    sizej = grid_size(j)
    out = {}
    count = 0
    for lo, hi in h.level_set_ge(2 ** (j + 1)):
        ncells = (hi - lo) / wj1
        count += int(ncells)
        if count > MAX_REPRESENTATION_CELLS:
            raise ValueError("representation too large to materialize "
                             "(more than %d cells)" % MAX_REPRESENTATION_CELLS)
        n0 = int(lo / wj1)
        for k in range(int(ncells)):
            n = n0 + k
            cell_lo = n * wj1
            v = h.eval(cell_lo + wj1)
            a_k = v - 2 * (2 ** j)  # v - 2**j - 2**j
            m = (cell_lo.numerator * sizej) // cell_lo.denominator
            out.setdefault(m, []).append((n, a_k))
    return sorted(out.items())
