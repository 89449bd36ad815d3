"""Check whether a concrete instance sits inside the theory's comfort zone.

The detection guarantees are asymptotic statements under structural
conditions: no small sub-community may concentrate the community's edge
mass, the community must stay small relative to n, lifted edge
probabilities must stay far from 1, and (for product-form models) the
weight spread inside the community must be bounded.  Each audit reports
lhs, rhs, and a margin = rhs/lhs; an entry passes when the margin reaches
the requested threshold.  The default threshold of 10 asks for a factor of
ten of asymptotic headroom, which finite desk-scale instances rarely have,
so these demos audit against threshold=1.0: the bare condition.
"""

import numpy as np

from plantedscan import (
    Homogeneous,
    PlantedAlternative,
    RankOne,
    audit_assumption_1_1,
    audit_assumption_1_2,
    audit_assumption_2,
    audit_assumption_3,
)

# -- edge-mass concentration and community size, homogeneous case --------------

model = Homogeneous(65536, 0.15)
report = audit_assumption_1_1(model, range(64), delta=0.1, gamma=0.35,
                              threshold=1.0)
print("Sub-community edge-mass audit (n=65536, p=0.15, r=64):")
print(report.to_text())
print(f"  all_passed: {report.all_passed}  (margins near 1.3: the conditions"
      " hold, without much room)")

print("\nCommunity-size audit on the same 64-vertex community:")
report = audit_assumption_1_2(model, range(64), threshold=1.0)
print(report.to_text())
print("  the density clause just misses at r=64; a 16-vertex community clears"
      " both:")
report = audit_assumption_1_2(model, range(16), threshold=1.0)
print(report.to_text())

# -- a lumpy rank-one model concentrates edge mass where it should not ----------

w = np.full(4096, 0.1)
w[:20] = 0.65
lumpy = RankOne(w)
report = audit_assumption_1_1(lumpy, range(100), delta=0.4, gamma=0.1,
                              threshold=1.0)
print("\nEdge-mass audit with 20 heavy vertices inside a 100-vertex community:")
print(report.to_text())
print("  the heavy core carries most of the community's edges, so the"
      " sub-community clause fails outright")

# -- lifted probabilities must stay far from 1 -----------------------------------

cool = PlantedAlternative(range(8), 1.5, Homogeneous(256, 0.01))
hot = PlantedAlternative(range(8), 4.0, Homogeneous(256, 0.2))
report = audit_assumption_2([cool])
print("\nLifted-variance audit, rho=1.5 at p=0.01 (rho^2 p = 0.0225):")
print(report.to_text())
report = audit_assumption_2([cool, hot])
print("\nSame audit adding rho=4 at p=0.2 (rho^2 p = 3.2; the worst case"
      " decides):")
print(report.to_text())

# -- weight spread for rank-one models -------------------------------------------

spread = RankOne(np.concatenate([np.full(32, 0.3), np.full(2668, 0.1)]))
mixed = list(range(5)) + list(range(32, 54))  # 5 heavy + 22 light vertices
report = audit_assumption_3(spread, mixed)
print("\nWeight-spread audit on a 27-vertex community mixing weights 0.3"
      " and 0.1:")
print(report.to_text())
print("  spread 9 against a ceiling of 1: light vertices this thin carry no"
      " usable signal next to the heavy ones")
print(f"\nall_passed aggregates every entry of a report: {report.all_passed}")
