"""
Pure conformity: phi = 0
========================

When actions ignore opinions, every action jumps to the initial average
after one step.  Agents within epsilon of that average are pulled in, the
gap shrinking by a factor n each step; the others never move.
"""

import numpy as np

import opinion_action as oa

rng = np.random.Generator(np.random.PCG64(5))
state = oa.PopulationState(0, rng.random(6), rng.random(6))
traj = oa.simulate(oa.ModelParams(6, 0.15, 0.0), state, horizon=12)

check = oa.verify_lemma4(traj)
print("checks pass:", check.ok)
print("frozen agents:", check.frozen, "attracted agents:", check.attracted)

avg = oa.average_action(state)
for t in range(1, 6):
    gaps = np.abs(traj.x[t, list(check.attracted)] - avg)
    print(f"t={t}  gaps={gaps}")
