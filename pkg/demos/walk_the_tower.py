"""Walk the tower for eight points, from the GIT quotient up to M_{0,8}."""

from moduli_tower.core import Level
from moduli_tower.divisors import a_alpha_class, picard_basis
from moduli_tower.git_stability import count_singular_points
from moduli_tower.hassett_trees import boundary_divisor_inventory, contracted_divisors
from moduli_tower.tower import quotient_ledger, schedule, stability_transitions

n = 8

# the blow-up schedule of (P^1)^8: stage s blows up the loci where n-s+1 points meet
for rec in schedule(n):
    print(rec)

# early centers sit inside the unstable locus, so the quotient does not notice them
report = stability_transitions(n)
print("quotient unchanged through stage", report.last_unchanged)
for t in report.rows:
    if t.changes_quotient:
        print(t.stage, t.level, t.note)

# the first change is the Kirwan blow-up of the singular points
print("singular points:", count_singular_points(n))

# Picard ranks of every level, closed form next to the top-down recursion
for row in quotient_ledger(n).rows:
    print(row.level, row.closed_form, row.recursive)

# going down one level contracts these divisors
for k in (1, 2):
    print(k, len(contracted_divisors(n, k)), "contracted")
inv = boundary_divisor_inventory(Level(n, 2))
print(len(inv.collision), "collision +", len(inv.nodal), "nodal =", inv.total)

basis = picard_basis(Level(n, 1))
print(len(basis.generators), "generators at level 1")

# K + alpha D on level 1, pulled back to M_{0,8}: coefficients by stratum size
A = a_alpha_class(n, 1)
by_size = {}
for S, coeff in A.items():
    by_size.setdefault(len(S), coeff)
for size, coeff in sorted(by_size.items()):
    print(f"|S|={size}: {coeff.pretty()}")
