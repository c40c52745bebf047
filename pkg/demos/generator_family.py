"""Tour: the ternary generator family and its exact identities.

The family of depth k consists of 3**k orthogonal vectors whose running
maxima equal the ternary digit-sum function -- the quantitative engine
behind every divergence construction in the package.

Run:  python demos/generator_family.py
"""

from fractions import Fraction as F

from orthoconv.ortho import OrthoVector
from orthoconv.construct import phi_family, digit_sum_fn, bernstein_check

k = 2
chi = OrthoVector.basis(0)
fam = phi_family(k, chi)

print("=" * 70)
print("Depth k = %d: %d vectors, each with at most 2k+1 body pieces" % (k, 3 ** k))
print("=" * 70)

print("Gram matrix (should be (3/3**k) * identity):")
for u in fam[:4]:
    print("  ", [str(u.inner(v)) for v in fam[:4]], "...")

print()
print("Sum of the family: body cancels, sqrt(3) chi remains:")
total = fam[0]
for u in fam[1:]:
    total = total + u
print("  body values:", set(map(str, total.body.values)))
print("  external part:", {i: str(c) for i, c in total.ext.items()})

print()
print("Running maxima of the partial sums equal the digit-sum function:")
acc = None
mx = None
for u in fam:
    acc = u if acc is None else acc + u
    mx = acc.body if mx is None else mx.maximum(acc.body)
ds = digit_sum_fn(k)
print("  identical:", mx == ds)
print("  measure(digit sum >= 1) =", ds.measure_ge(1), "(= 5/9 for k=2)")
print("  measure(digit sum >= 2) =", ds.measure_ge(2), "(= 1/9 for k=2)")

print()
print("phi_n vanishes on its own cell; the prefix sums sit at the digit")
print("sum there (the mechanism that makes maxima large):")
cell = F(1, 3 ** k)
acc = OrthoVector()
for n, u in enumerate(fam[:3]):
    own = u.body.restrict(n * cell, (n + 1) * cell)
    print("  phi_%d restricted to its cell: %s" % (n, set(map(str, own.values))))
    acc = acc + u

print()
print("=" * 70)
print("Digit-sum lower tail against e**(-k/144) (exact binomials):")
print("=" * 70)
for kk in (1, 6, 36, 144):
    tail, bound, ok = bernstein_check(kk)
    print("  k=%3d: P(count < k/6) = %-12.6g <= %-10.6g %s"
          % (kk, float(tail), bound, "ok" if ok else "VIOLATED"))
