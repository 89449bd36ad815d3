"""Exercise the likelihood-ratio oracle on instances small enough to enumerate.

The ratio for one candidate community multiplies, over its internal pairs,
rho where an edge is present and (1 - rho*p)/(1 - p) where it is absent.
Averaging over all communities of the target size gives the statistic of
the Bayes-optimal test for a uniformly placed community, and its null
expectation is exactly 1 (it is a martingale in disguise).  The risk of
that optimal test is 1 - E|L - 1|/2 under the null, which we estimate by
Monte Carlo using null draws alone.
"""

import math

from plantedscan import (
    GraphSample,
    Homogeneous,
    LrProblem,
    bayes_risk,
    derive_seed,
    likelihood_ratio_average,
    likelihood_ratio_single,
    sample_null,
)
import numpy as np


def graph_of(n, edges):
    bits = np.zeros(n * (n - 1) // 2, dtype=np.uint8)
    for i, j in edges:
        bits[i * (2 * n - i - 1) // 2 + j - i - 1] = 1
    return GraphSample(n, np.packbits(bits), 0, "imported")


model = Homogeneous(4, 0.5)

# single community, single pair: the two possible ratio values
problem = LrProblem(model, r=2, rho=1.5)
g_edge = graph_of(4, [(0, 1)])
g_none = graph_of(4, [])
print("One pair at p=0.5, lift rho=1.5:")
print(f"  edge present: L = {likelihood_ratio_single(problem, (0, 1), g_edge):.3f}"
      f"  (rho itself)")
print(f"  edge absent : L = {likelihood_ratio_single(problem, (0, 1), g_none):.3f}"
      f"  ((1 - rho p)/(1 - p) = 0.5)")

# averaging over the six communities of size 2 on the empty graph
avg = likelihood_ratio_average(problem, g_none)
print(f"  empty graph, averaged over all {avg.communities} communities: "
      f"{avg.value:.3f}  (every community contributes 0.5)")

# martingale check: the null mean of the averaged ratio is 1
model8 = Homogeneous(8, 0.3)
prob8 = LrProblem(model8, r=3, rho=1.8)
vals = [
    likelihood_ratio_average(prob8, sample_null(model8, derive_seed(7, "demo-mart", i))).value
    for i in range(2000)
]
mean = float(np.mean(vals))
se = float(np.std(vals, ddof=1)) / math.sqrt(len(vals))
print(f"\nNull mean of the averaged ratio over 2000 draws: "
      f"{mean:.4f} +/- {se:.4f}  (target 1)")

# Bayes risk along increasing lift: the optimal test only gets better
print("\nRisk of the optimal test, n=8, p=0.5, community size 3:")
print(f"  {'rho':>5} {'risk':>8} {'stderr':>8}")
for rho in (1.0, 1.5, 2.0):
    prob = LrProblem(Homogeneous(8, 0.5), r=3, rho=rho)
    res = bayes_risk(prob, 800, master_seed=17)
    print(f"  {rho:5.1f} {res.risk:8.4f} {res.stderr:8.4f}")

# past the exact-enumeration budget the oracle samples communities instead
big = LrProblem(Homogeneous(64, 0.1), r=4, rho=2.0, community_seed=5)
res = bayes_risk(big, 50, master_seed=3)
print(f"\nn=64, size-4 communities: C(64,4) = {math.comb(64, 4)} is over the "
      f"exact budget,")
print(f"  so the oracle samples {res.to_json()['M']} communities per draw "
      f"(mode '{res.mode}'): risk {res.risk:.3f} +/- {res.stderr:.3f}")
