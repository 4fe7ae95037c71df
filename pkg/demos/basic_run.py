"""
A single run of the opinion-action model
========================================

Ten agents with uniform random opinions, actions starting equal to
opinions.  We simulate, find when the interaction structure settles and
read off the regime.
"""

import numpy as np

import opinion_action as oa

rng = np.random.Generator(np.random.PCG64(1))
x0 = rng.random(10)
params = oa.ModelParams(n=10, epsilon=0.3, phi=0.5)

traj, report = oa.run(params, oa.initial_population(x0))

print("regime:", report.regime.value)
print("structure settles at t =", report.stabilization_time)
print("consensus value:", report.consensus_value)

# the spread of the augmented state shrinks towards zero
for t in (1, 5, 10, 20, 50):
    z = traj.augmented[t - 1].z
    print(f"t={t:3d}  spread={z.max() - z.min():.3e}")
