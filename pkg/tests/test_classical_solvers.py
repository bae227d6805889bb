import numpy as np
import pytest

from stqaoa.classical_solvers import (
    BRUTE_FORCE_LIMIT,
    GwConfig,
    best_of_seeds,
    local_search,
    solve_brute_force,
    solve_gw,
    solve_gw_best_of,
    solve_random_tree,
)
from stqaoa.experiments import random_signed_graph
from stqaoa.signed_graph import SignedGraph, cut_value, random_regular_graph

from test_signed_graph import K4, SQUARE, TRIANGLE, brute_max


def check_result(g, res):
    res.tree.validate(g)
    bits = res.cut.assignment
    assert res.value == cut_value(g, bits)
    assert all((bits[p] != bits[c]) == (s == -1) for p, c, s in res.tree.edge_order)
    assert res.value >= g.n_vertices - 1


def test_brute_force_examples():
    assert solve_brute_force(TRIANGLE).value == 2
    assert solve_brute_force(K4).value == 4
    assert solve_brute_force(SQUARE).value == 4


def test_brute_force_matches_enumeration_oracle():
    rng = np.random.default_rng(3)
    for _ in range(40):
        g = random_signed_graph(int(rng.integers(2, 10)), rng)
        res = solve_brute_force(g, chunk=7)  # small chunks exercise the chunk loop
        assert res.value == brute_max(g)
        check_result(g, res)


def test_brute_force_guard():
    n = BRUTE_FORCE_LIMIT + 1
    g = SignedGraph(n, tuple((i, i + 1, -1) for i in range(n - 1)))
    with pytest.raises(MemoryError):
        solve_brute_force(g)


def test_random_tree_examples():
    tree_graph = SignedGraph(5, ((0, 1, -1), (1, 2, 1), (1, 3, -1), (3, 4, -1)))
    for seed in range(10):
        assert solve_random_tree(tree_graph, seed).value == 4
        assert solve_random_tree(TRIANGLE, seed).value == 2
    g = random_regular_graph(12, 3, -1, 0)
    a, b = solve_random_tree(g, 9), solve_random_tree(g, 9)
    assert a.cut == b.cut and a.tree == b.tree
    check_result(g, a)


def test_random_tree_ensemble_ratio():
    ratios = []
    for seed in range(30):
        g = random_regular_graph(16, 3, -1, seed)
        if not g.is_connected():
            continue
        ratios.append(solve_random_tree(g, seed).value / solve_brute_force(g).value)
    assert np.mean(ratios) >= 2 / 3 * (1 - 1 / 16)


def test_gw_examples():
    assert solve_gw(SQUARE, 0).value == 4
    assert solve_gw(TRIANGLE, 0).value == 2
    no_ls = GwConfig(local_search=False)
    for seed in range(5):
        assert solve_gw(SQUARE, seed, no_ls).value == 4
        assert solve_gw(TRIANGLE, seed, no_ls).value == 2


def test_gw_signed_graphs_and_determinism():
    rng = np.random.default_rng(11)
    for _ in range(20):
        g = random_signed_graph(int(rng.integers(3, 11)), rng)
        res = solve_gw(g, 4)
        check_result(g, res)
        assert res.value >= 0.878 * brute_max(g)
        again = solve_gw(g, 4)
        assert again.cut == res.cut and again.tree == res.tree
        assert {k: v for k, v in again.meta.items() if k != "wall_time"} == \
               {k: v for k, v in res.meta.items() if k != "wall_time"}


def test_gw_sdp_bounds_optimum():
    # the relaxation value is an upper bound on every cut
    for seed in range(10):
        g = random_regular_graph(10, 3, -1, seed)
        if not g.is_connected():
            continue
        res = solve_gw(g, seed)
        assert res.meta["sdp_converged"]
        assert res.meta["sdp_value"] >= solve_brute_force(g).value - 1e-6


def test_gw_without_local_search_still_meets_bound():
    for seed in range(10):
        g = random_regular_graph(16, 3, -1, 100 + seed)
        if not g.is_connected():
            continue
        res = solve_gw(g, seed, GwConfig(local_search=False))
        assert res.value >= 0.878 * solve_brute_force(g).value


def test_gw_best_of():
    g = random_regular_graph(14, 3, -1, 5)
    one = solve_gw_best_of(g, 1, 17)
    base = solve_gw(g, 17)
    assert one.cut == base.cut and one.tree == base.tree
    values = [solve_gw_best_of(g, k, 17, GwConfig(local_search=False, rounding_rounds=2)).value for k in (1, 3, 5, 8)]
    assert values == sorted(values)
    assert best_of_seeds(17, 5)[:3] == best_of_seeds(17, 3)
    with pytest.raises(ValueError):
        solve_gw_best_of(g, 0, 1)


def test_local_search_is_one_improving_pass():
    bits = local_search(SQUARE, [0, 0, 0, 0])
    assert cut_value(SQUARE, bits) > 0
    rng = np.random.default_rng(2)
    for _ in range(30):
        g = random_signed_graph(8, rng)
        z = list(rng.integers(0, 2, 8))
        assert cut_value(g, local_search(g, z)) >= cut_value(g, z)
