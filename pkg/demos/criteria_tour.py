"""Tour: the classical convergence criteria on finite sequences.

All values are finite partial sums; nothing here decides convergence of
an infinite series -- the numbers are the inputs to such judgments.

Run:  python demos/criteria_tour.py
"""

import math
from fractions import Fraction as F

from orthoconv.info import CoefficientSeq
from orthoconv.criteria import (
    alpha_condition, beta_condition, gamma_condition, measure_criterion,
    rm_weyl, sandwich_check, tandori_sum, theorem_conditions,
)

print("=" * 70)
print("A slowly decaying sequence: a_n**2 proportional to 1/(n log^2 n)")
print("=" * 70)
n = 64
sq = [F(1, 1)] + [F(1000, int(k * math.log(k + 1) ** 2 * 1000)) for k in range(2, n + 1)]
tot = sum(sq)
seq = CoefficientSeq.from_squares([s / tot for s in sq]).normalized()

r = rm_weyl(seq, [math.log2(max(k, 2)) ** 2 for k in range(1, n + 1)])
print("log^2-weighted square sum:", round(r["weighted_sum"], 4))
print("weight/log2^2 ratio max:", round(r["ratio_max"], 4))

print("distribution criterion (decreasing moduli):",
      round(alpha_condition(seq), 4))

b = beta_condition(seq)
g = gamma_condition(seq)
print("block form:", {i: round(t, 4) for i, t in b["terms"].items()},
      "sum", round(b["sum"], 4))
print("slice form:", {i: round(t, 4) for i, t in g["terms"].items()},
      "sum", round(g["sum"], 4))

s = sandwich_check(seq)
print("two-sided comparison: B- <= A+ <= B+ :",
      round(s["B_minus"], 4), "<=", round(s["A_plus"], 4), "<=",
      round(s["B_plus"], 4))

t = tandori_sum(seq)
print("index-block sum:", round(t["sum"], 4))

print()
print("=" * 70)
print("Position matters for the index-block sum, not for the value forms")
print("=" * 70)
moved = [F(0)] * n
moved[40] = F(1)
spike_front = CoefficientSeq.from_squares([F(1)] + [F(0)] * (n - 1))
spike_back = CoefficientSeq.from_squares(moved)
print("all mass at n=1 :", tandori_sum(spike_front)["sum"])
print("all mass at n=41:", round(tandori_sum(spike_back)["sum"], 4))

print()
print("=" * 70)
print("Information-function forms of the same criteria")
print("=" * 70)
rep = theorem_conditions(seq)
print("||I_B||        =", round(rep["alpha1"], 4))
print("block sum      =", round(rep["beta1"], 4))
print("slice sum      =", round(rep["gamma1"], 4))

print()
print("=" * 70)
print("Atomic measures: the same slices over an abstract atom space")
print("=" * 70)
for probs, label in [([F(1, 3)] * 3, "uniform over 3 atoms"),
                     ([F(1, 9)] * 9, "uniform over 9 atoms"),
                     ([F(1, 2), F(1, 4), F(1, 8), F(1, 8)], "dyadic atoms")]:
    print("%-22s -> %.4f" % (label, measure_criterion(probs)["sum"]))
