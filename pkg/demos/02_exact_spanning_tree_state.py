"""
The spanning-tree circuit prepares a cat state
==============================================

Fixed pi/4 ZZ and X rotations along a directed tree turn |+...+> into
(|z> + |~z>)/sqrt(2), where z is the cut the tree induces.
"""

import numpy as np

from stqaoa.quantum_sim import build_exact_st_circuit, circuit_to_text, evaluate, simulate
from stqaoa.signed_graph import DirectedSpanningTree, SignedGraph

edges = ((0, 1, -1), (1, 3, 1), (1, 2, -1), (2, 4, -1))
g = SignedGraph(5, edges)
t = DirectedSpanningTree(root=0, parent={c: (p, s) for p, c, s in edges}, edge_order=edges)

c = build_exact_st_circuit(t, g)
print(circuit_to_text(c))

state = simulate(c)
for label, amp in state.support().items():
    print(label, np.round(amp, 12))

print("<C> =", evaluate(c, (), g), "of", g.n_edges, "edges")
