"""Classical evaluation and sampling of the variational spanning tree ansatz.

For the tree circuit built by :func:`quantum_sim.build_vst_circuit`, each
edge ``q`` correlates its endpoints by ``sin(2 gamma_q) sin(2 beta_q)``, and
two vertices are correlated by the product along their tree path. The
output amplitudes factor over tree edges, so the bitstring distribution is a
Markov chain rooted at the tree root: the root bit is a fair coin and a
child differs from its parent with probability ``(1 - sin 2g sin 2b) / 2``.
"""

from __future__ import annotations

import numpy as np

from .signed_graph import DirectedSpanningTree, SignedGraph

__all__ = ["edge_correlations", "vst_zz_expectation", "vst_objective", "vst_sample", "vst_params"]


def edge_correlations(gamma, beta) -> np.ndarray:
    return np.sin(2 * np.asarray(gamma, dtype=float)) * np.sin(2 * np.asarray(beta, dtype=float))


def _check_angles(t: DirectedSpanningTree, gamma, beta):
    gamma = np.asarray(gamma, dtype=float)
    beta = np.asarray(beta, dtype=float)
    m = len(t.edge_order)
    if gamma.shape != (m,) or beta.shape != (m,):
        raise ValueError(f"need {m} gamma and {m} beta angles")
    return gamma, beta


def vst_zz_expectation(t: DirectedSpanningTree, gamma, beta, i: int, j: int) -> float:
    """<Z_i Z_j> on the VST state, as a product over the tree path i <-> j."""
    if i == j:
        raise ValueError("need two distinct vertices")
    gamma, beta = _check_angles(t, gamma, beta)
    corr = edge_correlations(gamma, beta)
    return float(np.prod(corr[sorted(t.path(i, j))]))


def vst_objective(g: SignedGraph, t: DirectedSpanningTree, gamma, beta) -> float:
    """<C> on the VST state, summed over every edge of ``g``."""
    t.validate(g)
    gamma, beta = _check_angles(t, gamma, beta)
    corr = edge_correlations(gamma, beta)
    total = 0.0
    for u, v, s in g.edges:
        total += 0.5 * (1 + s * np.prod(corr[sorted(t.path(u, v))]))
    return float(total)


def vst_sample(t: DirectedSpanningTree, gamma, beta, k: int, seed=None) -> np.ndarray:
    """``k`` exact samples of the VST output distribution, as a ``(k, n)`` bit array.

    Ancestral sampling from the root down ``edge_order``; O(n) per sample.
    """
    if k < 1:
        raise ValueError("need at least one sample")
    gamma, beta = _check_angles(t, gamma, beta)
    flip = 0.5 * (1 - edge_correlations(gamma, beta))
    rng = np.random.default_rng(seed)
    out = np.empty((k, t.n_vertices), dtype=np.int8)
    out[:, t.root] = rng.integers(0, 2, size=k)
    u = rng.random((k, len(t.edge_order)))
    for q, (p, c, _) in enumerate(t.edge_order):
        out[:, c] = out[:, p] ^ (u[:, q] < flip[q])
    return out


def vst_params(t: DirectedSpanningTree, gamma, beta) -> np.ndarray:
    """Pack per-edge angles into the parameter vector of ``build_vst_circuit``."""
    gamma, beta = _check_angles(t, gamma, beta)
    return np.concatenate([gamma, beta])
