"""
The augmented state matrix
==========================

Stacking opinions with the previous actions turns one step of the model
into a product z(t+1) = P(t) z(t).  P(t) is row-stochastic, and its
positive entries are bounded below by constants that depend only on n and
phi.
"""

import numpy as np

import opinion_action as oa

params = oa.ModelParams(n=4, epsilon=0.2, phi=0.5)
z = oa.AugmentedState(1, [0.10, 0.25, 0.30, 0.80, 0.20, 0.35, 0.60, 0.90])

P = oa.assemble_state_matrix(z, params)
np.set_printoptions(precision=4, suppress=True)
print(P.entries)

ok, dev = oa.check_row_stochastic(P)
print("row-stochastic:", ok, "max deviation", dev)

bounds = oa.coefficient_bounds(params)
print("alpha =", bounds.alpha, "beta =", bounds.beta)
print("bounds hold:", oa.verify_bounds(P, bounds)[0])

# one matrix step agrees with the direct update
print("next state:", oa.matrix_step(z, params).z)
