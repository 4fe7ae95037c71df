"""
Recovering Hegselmann-Krause: phi = 1
=====================================

If actions simply copy opinions, and start equal to them, the model is the
classical bounded-confidence model.  Its fixed points are clusters more
than epsilon apart.
"""

import numpy as np

import opinion_action as oa

x0 = np.random.Generator(np.random.PCG64(3)).random(10)
traj = oa.simulate(oa.ModelParams(10, 0.15, 1.0), oa.initial_population(x0), horizon=40)
hk = oa.hk_simulate(x0, 0.15)

k = hk.trajectory.shape[0]
print("max deviation from HK:", np.abs(traj.x[:k] - hk.trajectory).max())
print("HK converged at step", hk.converged_at)
print("cluster values:", hk.cluster_values)
print("clusters more than epsilon apart:", hk.separated)
