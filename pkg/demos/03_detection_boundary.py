"""Compute where detection becomes possible, and which subgraph carries it.

For a concrete model and community the boundary is a critical lift rho*:
below it no scan can work, above it the known-probability scan does.  The
computation has two parts.  First find the community subset that maximises
expected-edges / (k * ln(n/k)) -- the most informative subgraph, always a
prefix of the community sorted by weight.  Then invert the entropy kernel
to turn that maximiser's score into a lift.

For vertex weights drawn from a common distribution the same quantity has
a closed form in the large-n limit, reported as a constant in front of
sqrt(ln(n) / mean_edges).
"""

import math

from plantedscan import (
    Homogeneous,
    RankOne,
    boundary_surface,
    optimal_subgraph,
    standard_table,
    threshold_scaling,
    two_weight_threshold,
)
import numpy as np

# -- a single model/community pair ---------------------------------------------

model = Homogeneous(1000, 0.01)
community = range(30)
res = threshold_scaling(model, community)
print(f"ER graph n=1000, p=0.01, community of 30:")
print(f"  rho*             : {res.rho_star:.4f}")
print(f"  most informative : {res.optimal_size} vertices "
      f"(fraction {res.optimal_fraction:.2f} of the community)")
print(f"  feasible         : {res.feasible}  (rho* x p <= 1)")

# with unequal weights the informative subgraph can be a strict subset
w = np.full(400, 0.08)
w[:12] = 0.5
heavy = RankOne(w)
opt = optimal_subgraph(heavy, range(40))
print(f"\nRankOne with 12 heavy vertices inside a 40-vertex community:")
print(f"  optimal subgraph keeps {opt.size} vertices, score {opt.objective:.3f}")
print(f"  subset: {opt.subset}")

# -- the standard weight-distribution table -------------------------------------

print("\nBoundary constants for four weight distributions"
      " (analytic vs numeric maximiser):")
analytic = standard_table()
numeric = standard_table(mode="numeric")
print(f"  {'distribution':<22} {'constant':>9} {'fraction':>9}  numeric delta")
for a, b in zip(analytic, numeric):
    d = abs(a["rho_star"] - b["rho_star"])
    print(f"  {a['distribution']:<22} {a['rho_star']:9.4f} "
          f"{a['optimal_fraction']:9.3f}  {d:.2e}")

# -- two weight classes: composition sweep and the regime switch ----------------

r, ratio = 20, 6.5
cut = two_weight_threshold(r, ratio)
print(f"\nTwo-weight community of {r}, weight ratio {ratio}:")
print(f"  predicted switch point: heavy count > {cut:.2f} "
      f"means the heavy class alone is the best scan target")

rows = boundary_surface(65536, [0.65, 0.1],
                        compositions=[(m, r - m) for m in range(r + 1)])
prev = rows[0].regime
for row in rows:
    if row.regime != prev:
        m = row.composition[0]
        print(f"  surface flips at {m} heavy vertices "
              f"(rho* jumps to {row.rho_star:.3f}, regime '{row.regime}')")
        prev = row.regime
assert math.ceil(cut) == next(
    r.composition[0] for r in rows if r.regime != rows[0].regime
)
