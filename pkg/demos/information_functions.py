"""Tour: from a coefficient sequence to its tail set, information
function, and the contraction functional V.

Run:  python demos/information_functions.py
"""

from fractions import Fraction as F

from orthoconv import CoefficientSeq, tail_set, info_fn, v_functional
from orthoconv.stepfn import clip_min, pos_part

print("=" * 70)
print("A coefficient sequence is summarized by its tail-sum set B.")
print("=" * 70)

seq = CoefficientSeq.from_squares([F(1, 2), F(1, 4), F(1, 8), F(1, 16), F(1, 16)])
B = tail_set(seq)
print("squares:", [str(s) for s in seq.squares])
print("tail set B:", B)

print()
print("The information function h_B assigns -log3(gap) to each gap:")
h = info_fn(B, base=3)
for lo, hi, v in h.pieces():
    print("  (%s, %s]  ->  %.4f" % (lo, hi, float(v)))

print()
print("Base 2 gives the variant used by the classical criteria:")
I = info_fn(B, base=2)
print("  ||I_B|| =", I.l2_norm())

print()
print("=" * 70)
print("V h = ||V_0 ... V_i h|| at the stabilization level: one conditional")
print("norm contraction per grid level, finest first.")
print("=" * 70)
h1 = h.maximum(1)  # the calculus below 1 is clipped
value, trace = v_functional(h1)
for j, f, norm in trace.levels:
    print("  after V_%d: %d pieces, norm %.6f" % (j, len(f.values), norm))
print("V h_B =", value, " (stabilized at level %d)" % trace.stabilized_at)

print()
print("Uniform sequences give constant information functions:")
for n in (3, 9, 27):
    sq = [F(1, n)] * n
    Bu = tail_set(CoefficientSeq.from_squares(sq))
    hu = info_fn(Bu, base=3)
    vu, _ = v_functional(hu.maximum(1))
    print("  n=%2d: h_B = %s everywhere, V = %.4f"
          % (n, hu.values[0], vu))

print()
print("Slices and floors used throughout the calculus:")
f = h1
print("  f wedge 2       :", clip_min(f, 2))
print("  (f - 1)^+       :", pos_part(f, 1))
