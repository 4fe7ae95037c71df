"""
Consensus versus clustering
===========================

With a wide confidence bound (epsilon = 0.3) the population agrees.  With
a narrow one (epsilon = 0.05) some agents lose all neighbours, freeze, and
act as leaders; everyone else ends up inside the interval their values
span.
"""

import numpy as np

import opinion_action as oa

for eps in (0.3, 0.05):
    x0 = np.random.Generator(np.random.PCG64(2)).random(10)
    traj, rep = oa.run(oa.ModelParams(10, eps, 0.5), oa.initial_population(x0))
    print(f"epsilon={eps}: {rep.regime.value}, settles at t={rep.stabilization_time}")
    if rep.hull is not None:
        print("  leaders:", [v + 1 for v in rep.leaders])
        print(f"  hull: [{rep.hull.lo:.4f}, {rep.hull.hi:.4f}]")
        print("  containment residual:", rep.containment_residual)
        print("  leader drift:", rep.leader_drift)
    for value, members in rep.clusters:
        print(f"  cluster {value:.4f}: nodes {[m + 1 for m in members]}")
