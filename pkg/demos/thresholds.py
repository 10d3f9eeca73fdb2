"""F-nef chambers of K + alpha D and the log canonical model lookup."""

from fractions import Fraction

from moduli_tower.fcurves import enumerate_fcurves, vital_curve
from moduli_tower.nef import ak_alpha_table, fnef_threshold, simpson_model

n = 9
m = n // 2

print(len(enumerate_fcurves(n)), "F-curves for n =", n)

# one scan per level; the threshold is where the first pairing turns negative
reports = [fnef_threshold(n, k) for k in range(m - 1)]
for r in reports:
    print(f"k={r.k}: F-nef on [{r.threshold}, {r.upper}], witness {r.witness}")

# the witness at level k has the shape of the vital curve C_{k+1}
for r in reports[1:]:
    print(r.witness.sizes, vital_curve(n, r.k + 1).sizes)

# vital curve pairings next to the tabulated closed forms
for row in ak_alpha_table(n, 1).rows:
    print(row.i, row.engine.pretty(), row.closed_form.pretty(), row.agrees)

# walk alpha down from 1 and watch the model change at each threshold
for alpha in [Fraction(1), Fraction(2, 3), Fraction(3, 5), Fraction(1, 2), Fraction(9, 20), Fraction(2, 5), Fraction(3, 10)]:
    print(alpha, simpson_model(n, alpha))
