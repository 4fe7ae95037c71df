"""
Interaction digraph and its strongly connected components
=========================================================

The positive entries of P(t) define a digraph on 2n nodes.  When every
agent has a neighbour it is strongly connected; otherwise the agents with
no neighbours become singleton source components feeding one sink.
"""

import opinion_action as oa

params = oa.ModelParams(n=3, epsilon=0.1, phi=0.5)

# agent 2 sits far from every action, the others are close
z = oa.AugmentedState(1, [0.20, 0.90, 0.22, 0.21, 0.25, 0.20])
g = oa.digraph_of(oa.assemble_state_matrix(z, params))
report = oa.classify_structure(g, z, params)

print("class:", report.structure_class.value)
print("components:", report.scc.canonical())
print("leaders (0-based opinion nodes):", report.leaders)
print("cut-balanced:", oa.cut_balance_exhaustive(g)[0])

# DOT text for graphviz; leader nodes carry leader=true
print(oa.to_dot(report))
