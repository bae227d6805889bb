"""
QAOA against spanning-tree QAOA on one graph
============================================

ST-QAOA starts from a classical cut: at (0, pi/4, pi/4) one round reproduces
it exactly, so optimizing can only improve on the classical answer. Two ST-QAOA
rounds can also imitate one QAOA round.
"""

import numpy as np

from stqaoa.classical_solvers import solve_brute_force, solve_gw, solve_random_tree
from stqaoa.optimizer import optimize
from stqaoa.quantum_sim import (
    ST_QAOA_CLASSICAL_POINT,
    build_qaoa_circuit,
    build_st_qaoa_circuit,
    evaluate,
    qaoa_embedding_params,
)
from stqaoa.signed_graph import random_regular_graph

g = random_regular_graph(12, 3, -1, seed=2)
print("optimum", solve_brute_force(g).value)

qaoa = {}
for p in (1, 2):
    rep = optimize(build_qaoa_circuit(g, p), g, starts=5, seed=p)
    qaoa[p] = rep
    print(f"QAOA p={p}: <C> = {rep.best_value:.4f}")

for name, res in (("random tree", solve_random_tree(g, 0)), ("GW", solve_gw(g, 0))):
    c1 = build_st_qaoa_circuit(g, res, 1)
    print(f"{name}: classical cut {res.value}, circuit at the classical point {evaluate(c1, ST_QAOA_CLASSICAL_POINT, g):.4f}")
    rep = optimize(c1, g, starts=5, seed=0, warm_starts=[ST_QAOA_CLASSICAL_POINT])
    print(f"  ST-QAOA r=1 optimized: {rep.best_value:.4f}  B = {rep.best_value / res.value:.4f}")
    c2 = build_st_qaoa_circuit(g, res, 2)
    emb = qaoa_embedding_params(qaoa[1].best_params)
    print(f"  r=2 at the embedded QAOA p=1 angles: {evaluate(c2, emb, g):.4f}")
