"""Piecewise-constant functions on (0,1] with exact rational breakpoints.

A :class:`StepFunction` is a finite sequence of half-open pieces

    (0, b_1], (b_1, b_2], ..., (b_{m-1}, 1]

with one value per piece; the last breakpoint is always 1.  The
left-open / right-closed convention is used uniformly, matching the
triadic cells (n*w, (n+1)*w] of the grids used throughout.

The conditional L2 norm over the level-i triadic grid (cells of width
3**-(2**i)) is computed sparsely: runs of cells interior to a single
piece are emitted as one output piece, so the full grid (3**16 cells at
level 4, 3**32 at level 5) is never materialized.  Cost is proportional
to the number of breakpoints, not the number of cells.
"""

from __future__ import annotations

import bisect
from fractions import Fraction

from .exactnum import (
    as_float,
    exact_sqrt,
    format_rational,
    num_eq,
    num_le,
    num_max,
    num_min,
    parse_rational,
    value_from_json,
    value_to_json,
)

__all__ = [
    "StepFunction",
    "TriadicAtom",
    "grid_width",
    "grid_size",
    "pointwise",
    "clip_min",
    "pos_part",
    "cond_norm",
]

ZERO = Fraction(0)
ONE = Fraction(1)


def grid_size(level: int) -> int:
    """Number of cells in the level-i triadic grid: 3**(2**i)."""
    return 3 ** (2 ** level)


def grid_width(level: int) -> Fraction:
    """Cell width of the level-i triadic grid."""
    return Fraction(1, grid_size(level))


class TriadicAtom:
    """Cell (n*w, (n+1)*w] of the level-i grid, w = 3**-(2**i)."""

    __slots__ = ("level", "index")

    def __init__(self, level: int, index: int):
        n = grid_size(level)
        if not 0 <= index < n:
            raise ValueError("atom index %d out of range for level %d" % (index, level))
        self.level = level
        self.index = index

    @property
    def width(self) -> Fraction:
        return grid_width(self.level)

    def interval(self):
        w = self.width
        return (self.index * w, (self.index + 1) * w)

    def contains(self, t) -> bool:
        lo, hi = self.interval()
        return lo < t <= hi

    def __repr__(self):
        return "TriadicAtom(level=%d, index=%d)" % (self.level, self.index)

    def __eq__(self, other):
        return (isinstance(other, TriadicAtom)
                and (self.level, self.index) == (other.level, other.index))

    def __hash__(self):
        return hash((self.level, self.index))


class StepFunction:
    """Immutable piecewise-constant function on (0,1].

    breakpoints: strictly increasing Fractions in (0,1], last equal to 1.
    values: one per piece; rationals, floats, or exact sympy constants.
    Adjacent pieces with equal values are merged on construction, so two
    equal functions always have identical representations.
    """

    __slots__ = ("breakpoints", "values")

    def __init__(self, breakpoints, values):
        bps = [b if isinstance(b, Fraction) else Fraction(b) for b in breakpoints]
        vals = list(values)
        if len(bps) != len(vals):
            raise ValueError("breakpoints and values must have equal length")
        if not bps:
            raise ValueError("a step function needs at least one piece")
        prev = ZERO
        for b in bps:
            if b <= prev:
                raise ValueError("breakpoints must be strictly increasing in (0,1]")
            prev = b
        if bps[-1] != ONE:
            raise ValueError("last breakpoint must be 1")
        # canonical form: merge adjacent equal values
        cbps, cvals = [], []
        for b, v in zip(bps, vals):
            if cvals and num_eq(cvals[-1], v):
                cbps[-1] = b
            else:
                cbps.append(b)
                cvals.append(v)
        self.breakpoints = tuple(cbps)
        self.values = tuple(cvals)

    # -- constructors ------------------------------------------------

    @classmethod
    def constant(cls, v) -> "StepFunction":
        return cls((ONE,), (v,))

    @classmethod
    def indicator(cls, lo, hi, value=1, base=0) -> "StepFunction":
        """value on (lo, hi], base elsewhere."""
        lo, hi = Fraction(lo), Fraction(hi)
        if not (ZERO <= lo < hi <= ONE):
            raise ValueError("need 0 <= lo < hi <= 1")
        bps, vals = [], []
        if lo > ZERO:
            bps.append(lo)
            vals.append(base)
        bps.append(hi)
        vals.append(value)
        if hi < ONE:
            bps.append(ONE)
            vals.append(base)
        return cls(bps, vals)

    @classmethod
    def from_cells(cls, cell_values, width=None) -> "StepFunction":
        """Function constant on consecutive cells of equal width.

        width defaults to 1/len(cell_values).
        """
        n = len(cell_values)
        if width is None:
            width = Fraction(1, n)
        width = Fraction(width)
        if width * n != ONE:
            raise ValueError("cells must tile (0,1]")
        bps = [(i + 1) * width for i in range(n)]
        return cls(bps, cell_values)

    # -- basic queries -----------------------------------------------

    def pieces(self):
        lo = ZERO
        for b, v in zip(self.breakpoints, self.values):
            yield lo, b, v
            lo = b

    def eval(self, t):
        t = Fraction(t)
        if not ZERO < t <= ONE:
            raise ValueError("step functions live on (0,1]")
        i = bisect.bisect_left(self.breakpoints, t)
        return self.values[i]

    __call__ = eval

    def min_value(self):
        out = self.values[0]
        for v in self.values[1:]:
            out = num_min(out, v)
        return out

    def max_value(self):
        out = self.values[0]
        for v in self.values[1:]:
            out = num_max(out, v)
        return out

    def is_nonnegative(self) -> bool:
        return all(num_le(0, v) for v in self.values)

    def __eq__(self, other):
        if not isinstance(other, StepFunction):
            return NotImplemented
        return (self.breakpoints == other.breakpoints
                and len(self.values) == len(other.values)
                and all(num_eq(a, b) for a, b in zip(self.values, other.values)))

    def __hash__(self):
        return hash(self.breakpoints)

    def approx_equal(self, other, tol=1e-9) -> bool:
        diff = pointwise(self, other, "-")
        return all(abs(as_float(v)) <= tol for v in diff.values)

    def pointwise_le(self, other, tol=0) -> bool:
        other = _coerce(other)
        diff = pointwise(self, other, "-")
        if tol:
            return all(as_float(v) <= tol for v in diff.values)
        return all(num_le(v, 0) for v in diff.values)

    def __repr__(self):
        parts = ", ".join(
            "(%s,%s]:%s" % (format_rational(lo), format_rational(hi), v)
            for lo, hi, v in self.pieces())
        return "StepFunction{%s}" % parts

    # -- algebra -----------------------------------------------------

    def _binary(self, other, op):
        other = _coerce(other)
        bps = _merge_breakpoints(self.breakpoints, other.breakpoints)
        vals = []
        ia = ib = 0
        for b in bps:
            while self.breakpoints[ia] < b:
                ia += 1
            while other.breakpoints[ib] < b:
                ib += 1
            vals.append(op(self.values[ia], other.values[ib]))
        return StepFunction(bps, vals)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return _coerce(other)._binary(self, lambda a, b: a - b)

    def __mul__(self, other):
        if isinstance(other, StepFunction):
            return self._binary(other, lambda a, b: a * b)
        return self.map_values(lambda v: v * other)

    __rmul__ = __mul__

    def __neg__(self):
        return self.map_values(lambda v: -v)

    def map_values(self, fn) -> "StepFunction":
        return StepFunction(self.breakpoints, [fn(v) for v in self.values])

    def minimum(self, other) -> "StepFunction":
        return self._binary(_coerce(other), num_min)

    def maximum(self, other) -> "StepFunction":
        return self._binary(_coerce(other), num_max)

    def abs(self) -> "StepFunction":
        return self.map_values(lambda v: v if num_le(0, v) else -v)

    def indicator_ge(self, c) -> "StepFunction":
        """Indicator of the level set (f >= c)."""
        return self.map_values(lambda v: 1 if num_le(c, v) else 0)

    def level_set_ge(self, c):
        """Maximal intervals (lo, hi] where f >= c."""
        out = []
        for lo, hi, v in self.pieces():
            if num_le(c, v):
                if out and out[-1][1] == lo:
                    out[-1] = (out[-1][0], hi)
                else:
                    out.append((lo, hi))
        return out

    def restrict(self, lo, hi) -> "StepFunction":
        """f * 1_{(lo,hi]}: zero outside (lo, hi]."""
        lo, hi = Fraction(lo), Fraction(hi)
        ind = StepFunction.indicator(lo, hi) if lo < hi else StepFunction.constant(0)
        return self._binary(ind, lambda a, b: a * b)

    def translate_scale(self, a, b) -> "StepFunction":
        """Map this function on (0,1] onto the window (a,b], zero outside."""
        a, b = Fraction(a), Fraction(b)
        if not ZERO <= a < b <= ONE:
            raise ValueError("bad window")
        w = b - a
        bps, vals = [], []
        if a > ZERO:
            bps.append(a)
            vals.append(0)
        for bp, v in zip(self.breakpoints, self.values):
            bps.append(a + w * bp)
            vals.append(v)
        if b < ONE:
            bps.append(ONE)
            vals.append(0)
        return StepFunction(bps, vals)

    # -- integrals and norms ------------------------------------------

    def integral(self):
        total = ZERO
        for lo, hi, v in self.pieces():
            total = total + v * (hi - lo)
        return total

    def integral_sq(self):
        total = ZERO
        for lo, hi, v in self.pieces():
            total = total + v * v * (hi - lo)
        return total

    def integral_sq_between(self, lo, hi):
        """Integral of f**2 over (lo, hi]."""
        lo, hi = Fraction(lo), Fraction(hi)
        if hi <= lo:
            return ZERO
        total = ZERO
        i = bisect.bisect_left(self.breakpoints, lo)
        # piece i covers (prev, breakpoints[i]]; lo sits strictly before its end
        pos = lo
        while pos < hi:
            end = self.breakpoints[i]
            seg_hi = end if end < hi else hi
            v = self.values[i]
            total = total + v * v * (seg_hi - pos)
            pos = seg_hi
            i += 1
        return total

    def l2_norm_sq(self):
        return self.integral_sq()

    def l2_norm(self, exact: bool = False):
        s = self.integral_sq()
        return exact_sqrt(s) if exact else as_float(s) ** 0.5

    def measure_ge(self, c):
        """Lebesgue measure of the level set (f >= c)."""
        total = ZERO
        for lo, hi, v in self.pieces():
            if num_le(c, v):
                total += hi - lo
        return total

    def measure_gt(self, c):
        total = ZERO
        for lo, hi, v in self.pieces():
            if not num_le(v, c):
                total += hi - lo
        return total

    # -- serialization -------------------------------------------------

    def to_json(self) -> dict:
        return {
            "breakpoints": [format_rational(b) for b in self.breakpoints],
            "values": [value_to_json(v) for v in self.values],
        }

    @classmethod
    def from_json(cls, data: dict) -> "StepFunction":
        bps = [parse_rational(b) for b in data["breakpoints"]]
        vals = [value_from_json(v) for v in data["values"]]
        return cls(bps, vals)

    def as_float(self) -> "StepFunction":
        return self.map_values(as_float)


def _coerce(x) -> StepFunction:
    if isinstance(x, StepFunction):
        return x
    return StepFunction.constant(x)


def _merge_breakpoints(a, b):
    out = []
    ia = ib = 0
    while ia < len(a) or ib < len(b):
        if ib >= len(b) or (ia < len(a) and a[ia] < b[ib]):
            nxt = a[ia]
        else:
            nxt = b[ib]
        if not out or out[-1] != nxt:
            out.append(nxt)
        while ia < len(a) and a[ia] == nxt:
            ia += 1
        while ib < len(b) and b[ib] == nxt:
            ib += 1
    return out


_OPS = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "min": num_min,
    "max": num_max,
    "mul": lambda a, b: a * b,
}


def pointwise(f: StepFunction, g, op="+") -> StepFunction:
    """Pointwise combination of step functions; op in {+,-,min,max,mul}."""
    if op not in _OPS:
        raise ValueError("unknown op %r" % op)
    return f._binary(_coerce(g), _OPS[op])


def clip_min(f: StepFunction, c) -> StepFunction:
    """f wedge c: pointwise minimum with the constant c."""
    return f.minimum(c)


def pos_part(f: StepFunction, c=0) -> StepFunction:
    """(f - c)^+ pointwise."""
    return f.map_values(lambda v: v - c if num_le(c, v) else 0 * v)


def cond_norm(f: StepFunction, level: int, exact: bool = False) -> StepFunction:
    """Conditional L2 norm over the level-i triadic grid.

    On each grid cell the result is the constant sqrt(mean of f**2 over
    the cell); the output is measurable for that grid.  Requires f >= 0.
    Cells not cut by a breakpoint of f are handled in bulk, so the cost
    is O(#pieces), independent of the 3**(2**i) cell count.
    """
    if not f.is_nonnegative():
        raise ValueError("cond_norm requires a nonnegative function")
    size = grid_size(level)
    width = grid_width(level)

    # cells containing a breakpoint strictly inside need averaging
    marked = []
    for b in f.breakpoints[:-1]:
        num = b.numerator * size
        if num % b.denominator:
            idx = num // b.denominator
            if not marked or marked[-1] != idx:
                marked.append(idx)

    cell_rms = {}
    for idx in marked:
        lo = idx * width
        hi = lo + width
        mean = f.integral_sq_between(lo, hi) / width
        cell_rms[idx] = exact_sqrt(mean) if exact else as_float(mean) ** 0.5

    # cut the function at marked-cell boundaries, then rewrite values
    cuts = set(f.breakpoints)
    for idx in marked:
        cuts.add(idx * width)
        cuts.add((idx + 1) * width)
    cuts.discard(ZERO)
    bps = sorted(cuts)
    if bps[-1] != ONE:
        bps.append(ONE)

    vals = []
    i = 0
    lo = ZERO
    for b in bps:
        while f.breakpoints[i] < b:
            i += 1
        mid_num = (lo + b) / 2
        cell = (mid_num.numerator * size) // mid_num.denominator
        if cell in cell_rms:
            vals.append(cell_rms[cell])
        else:
            v = f.values[i]
            vals.append(v if num_le(0, v) else -v)
        lo = b
    return StepFunction(bps, vals)
