"""
The variational spanning tree ansatz is classically simulable
==============================================================

Each tree edge contributes a correlation sin(2 gamma) sin(2 beta); two
vertices are correlated by the product along their tree path. That gives
the objective in O(n^2) and exact samples in O(n) each.
"""

import numpy as np

from stqaoa.experiments import random_signed_graph
from stqaoa.quantum_sim import build_vst_circuit, evaluate
from stqaoa.signed_graph import random_spanning_tree
from stqaoa.vst_classical import vst_objective, vst_sample, vst_zz_expectation

rng = np.random.default_rng(3)
g = random_signed_graph(10, rng)
t = random_spanning_tree(g, rng)
gamma = rng.uniform(-np.pi, np.pi, 9)
beta = rng.uniform(-np.pi, np.pi, 9)

closed = vst_objective(g, t, gamma, beta)
dense = evaluate(build_vst_circuit(t), np.concatenate([gamma, beta]), g)
print(f"closed form {closed:.12f}  statevector {dense:.12f}  diff {abs(closed - dense):.1e}")

# sampled pair correlation vs the path product
z = 1 - 2 * vst_sample(t, gamma, beta, 100_000, seed=4).astype(float)
print("<Z0 Z9> exact", round(vst_zz_expectation(t, gamma, beta, 0, 9), 4),
      "sampled", round(float(np.mean(z[:, 0] * z[:, 9])), 4))
