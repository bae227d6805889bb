"""Classical SIGNED MAXCUT solvers.

Every solver returns a cut together with a spanning tree of the subgraph the
cut satisfies (via :func:`tree_from_cut`), which is what the tree-based
circuits are built from.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .signed_graph import (
    Cut,
    DirectedSpanningTree,
    SignedGraph,
    balanced_cut_from_tree,
    random_spanning_tree,
    tree_from_cut,
)

__all__ = [
    "BRUTE_FORCE_LIMIT",
    "SolverResult",
    "GwConfig",
    "solve_brute_force",
    "solve_random_tree",
    "solve_gw",
    "solve_gw_best_of",
    "best_of_seeds",
    "local_search",
    "burer_monteiro",
]

log = logging.getLogger(__name__)

BRUTE_FORCE_LIMIT = 28


@dataclass(frozen=True)
class SolverResult:
    cut: Cut
    tree: DirectedSpanningTree
    meta: dict = field(default_factory=dict, hash=False, compare=False)

    @property
    def value(self) -> int:
        return self.cut.value


@dataclass(frozen=True)
class GwConfig:
    rank: int | None = None  # None -> ceil(sqrt(2n)) + 1
    max_iter: int = 5000
    grad_tol: float = 1e-8
    initial_step: float = 0.5
    rounding_rounds: int = 100
    local_search: bool = True

    def to_dict(self) -> dict:
        return asdict(self)


def _finish(g: SignedGraph, bits, meta: dict) -> SolverResult:
    cut, tree = tree_from_cut(g, bits)
    meta["repaired_gain"] = cut.value - meta.get("raw_value", cut.value)
    return SolverResult(cut, tree, meta)


def solve_brute_force(g: SignedGraph, chunk: int = 1 << 18) -> SolverResult:
    """Exact optimum by enumerating 2**(n-1) assignments with vertex 0 on side 0."""
    n = g.n_vertices
    if n > BRUTE_FORCE_LIMIT:
        raise MemoryError(f"brute force limited to {BRUTE_FORCE_LIMIT} vertices, got {n}")
    t0 = time.perf_counter()
    u, v, s = g.edge_arrays
    neg = s == -1
    total = 1 << (n - 1)
    best_value, best_code = -1, 0
    for start in range(0, total, chunk):
        # vertex 0 fixed to 0: bits of code shifted up by one
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64) << 1
        score = np.zeros(codes.size, dtype=np.int64)
        for a, b, is_neg in zip(u, v, neg):
            differ = ((codes >> a) ^ (codes >> b)) & 1
            score += differ if is_neg else 1 - differ
        k = int(np.argmax(score))
        if score[k] > best_value:
            best_value, best_code = int(score[k]), int(codes[k])
    bits = [(best_code >> q) & 1 for q in range(n)]
    meta = {"solver": "brute_force", "seed": None, "raw_value": best_value,
            "wall_time": time.perf_counter() - t0, "iterations": total}
    return _finish(g, bits, meta)


def solve_random_tree(g: SignedGraph, seed=None) -> SolverResult:
    """Cut induced by a random spanning tree, then connectivity repair."""
    t0 = time.perf_counter()
    tree = random_spanning_tree(g, seed)
    raw = balanced_cut_from_tree(g, tree)
    meta = {"solver": "rst", "seed": _seed_repr(seed), "raw_value": raw.value,
            "wall_time": time.perf_counter() - t0, "iterations": 1}
    return _finish(g, raw.assignment, meta)


def burer_monteiro(g: SignedGraph, rank: int, rng: np.random.Generator, cfg: GwConfig):
    """Low-rank SDP relaxation: maximise sum_e (1 + s_e <x_u, x_v>)/2 over unit vectors.

    Riemannian gradient ascent on the product of spheres with step halving
    whenever a step fails to improve. Returns ``(V, objective, iterations,
    grad_norm, converged)``; the gradient tolerance is clipped at the float
    resolution of the objective.
    """
    n = g.n_vertices
    u, v, s = g.edge_arrays
    A = np.zeros((n, n))
    A[u, v] = s / 2.0
    A[v, u] = s / 2.0
    const = g.n_edges / 2.0

    V = rng.standard_normal((n, rank))
    V /= np.linalg.norm(V, axis=1, keepdims=True)

    def objective(V):
        return const + 0.5 * float(np.sum(V * (A @ V)))

    def riemannian_grad(V):
        G = A @ V
        return G - np.sum(G * V, axis=1, keepdims=True) * V

    value = objective(V)
    # below this gradient norm a step's gain is lost in the rounding of the objective
    floor = 10 * math.sqrt(np.finfo(float).eps * max(abs(value), 1.0))
    tol = max(cfg.grad_tol, floor)
    step = cfg.initial_step
    it = 0
    gnorm = np.inf
    for it in range(1, cfg.max_iter + 1):
        R = riemannian_grad(V)
        gnorm = float(np.linalg.norm(R))
        if gnorm <= tol:
            break
        while True:
            W = V + step * R
            W /= np.linalg.norm(W, axis=1, keepdims=True)
            new = objective(W)
            if new > value or step < 1e-14:
                break
            step *= 0.5
        if new <= value:
            break
        V, value = W, new
        step = min(2 * step, cfg.initial_step)
    return V, value, it, gnorm, gnorm <= tol


def local_search(g: SignedGraph, bits) -> list[int]:
    """One pass of single-vertex flips in vertex order, taking any strict gain."""
    bits = list(bits)
    for w in range(g.n_vertices):
        gain = 0
        for x, s in g.adjacency[w]:
            sat = (bits[w] != bits[x]) == (s == -1)
            gain += -1 if sat else 1
        if gain > 0:
            bits[w] = 1 - bits[w]
    return bits


def solve_gw(g: SignedGraph, seed=None, config: GwConfig | None = None) -> SolverResult:
    """Goemans-Williamson: SDP relaxation then best of random-hyperplane roundings."""
    cfg = config or GwConfig()
    if not g.is_connected():
        raise ValueError("graph is disconnected")
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    n = g.n_vertices
    rank = cfg.rank or math.ceil(math.sqrt(2 * n)) + 1
    V, sdp_value, iters, gnorm, converged = burer_monteiro(g, rank, rng, cfg)
    if not converged:
        log.warning("Burer-Monteiro stopped at gradient norm %.3g after %d iterations", gnorm, iters)

    u, v, s = g.edge_arrays
    H = rng.standard_normal((cfg.rounding_rounds, rank))
    sides = (V @ H.T < 0).astype(np.int8)  # (n, rounds)
    differ = sides[u] != sides[v]
    values = np.where((s == -1)[:, None], differ, ~differ).sum(axis=0)
    best = int(np.argmax(values))  # first maximum wins
    bits = sides[:, best].tolist()
    rounded = int(values[best])
    if cfg.local_search:
        bits = local_search(g, bits)
    meta = {
        "solver": "gw",
        "seed": _seed_repr(seed),
        "rank": rank,
        "sdp_value": sdp_value,
        "sdp_iterations": iters,
        "sdp_grad_norm": gnorm,
        "sdp_converged": converged,
        "rounded_value": rounded,
        "raw_value": Cut.of(g, bits).value,
        "rounding_rounds": cfg.rounding_rounds,
        "local_search": cfg.local_search,
        "wall_time": time.perf_counter() - t0,
    }
    return _finish(g, bits, meta)


def best_of_seeds(seed, k: int) -> list:
    """Seeds for k repetitions; the first is ``seed`` itself and the list is nested in k."""
    if seed is None:
        return [None] * k
    children = np.random.SeedSequence(seed).spawn(k)
    return [seed] + [int(c.generate_state(1)[0]) for c in children[1:]]


def solve_gw_best_of(g: SignedGraph, k: int, seed=None, config: GwConfig | None = None) -> SolverResult:
    """Best of k independent GW runs (first maximum wins)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    best = None
    for sd in best_of_seeds(seed, k):
        res = solve_gw(g, sd, config)
        if best is None or res.value > best.value:
            best = res
    meta = dict(best.meta, solver=f"gw:{k}", repetitions=k, base_seed=_seed_repr(seed))
    return SolverResult(best.cut, best.tree, meta)


def _seed_repr(seed):
    return seed if seed is None or isinstance(seed, (int, np.integer)) else repr(seed)
