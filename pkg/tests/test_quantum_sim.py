import math
from functools import reduce

import numpy as np
import pytest
from scipy.linalg import expm

from stqaoa.classical_solvers import solve_brute_force, solve_gw, solve_random_tree
from stqaoa.experiments import random_signed_graph
from stqaoa.quantum_sim import (
    MAX_QUBITS,
    ST_QAOA_CLASSICAL_POINT,
    Circuit,
    Gate,
    StateVector,
    apply_gate,
    build_exact_st_circuit,
    build_qaoa_circuit,
    build_st_qaoa_circuit,
    build_vst_circuit,
    circuit_from_text,
    circuit_to_text,
    compile_circuit,
    evaluate,
    index_to_label,
    label_to_index,
    objective_expectation,
    objective_vector,
    plus_state,
    qaoa_embedding_params,
    sample_bitstrings,
    simulate,
    z_expectations,
)
from stqaoa.signed_graph import (
    DirectedSpanningTree,
    SignedGraph,
    balanced_cut_from_tree,
    cut_value,
    random_regular_graph,
    random_spanning_tree,
    tree_from_cut,
)

from test_signed_graph import EQ6_EDGES, TRIANGLE

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def op_on(n, ops):
    """Dense operator with ``ops[q]`` on qubit q (little-endian: qubit 0 is the last kron factor)."""
    return reduce(np.kron, [ops.get(q, I2) for q in reversed(range(n))])


def reference_state(c: Circuit, params):
    """Matrix-exponential oracle, independent of the kernels."""
    n = c.n_qubits
    psi = np.full(1 << n, 2 ** (-n / 2), complex)
    for g in c.gates:
        theta = g.angle(params)
        if g.kind == "ZZ":
            h = g.coeff * op_on(n, {g.qubits[0]: Z, g.qubits[1]: Z})
        else:
            h = op_on(n, {g.qubits[0]: X})
        psi = expm(1j * theta * h) @ psi
    return psi


def reference_objective(g: SignedGraph, psi):
    n = g.n_vertices
    C = sum(0.5 * (np.eye(1 << n) + s * op_on(n, {u: Z, v: Z})) for u, v, s in g.edges)
    return float(np.real(psi.conj() @ C @ psi))


def same_up_to_phase(a, b, tol=1e-10):
    k = int(np.argmax(np.abs(b)))
    phase = a[k] / b[k]
    return abs(abs(phase) - 1) < tol and np.allclose(a, phase * b, atol=tol)


def eq6():
    g = SignedGraph(5, EQ6_EDGES)
    return g, DirectedSpanningTree(0, {c: (p, s) for p, c, s in EQ6_EDGES}, EQ6_EDGES)


def random_instance(rng, max_n=7):
    g = random_signed_graph(int(rng.integers(2, max_n + 1)), rng)
    return g, random_spanning_tree(g, rng)


def test_labels_are_qubit0_leftmost():
    assert label_to_index("01011") == 0b11010
    assert index_to_label(0b11010, 5) == "01011"


def test_plus_state():
    assert np.allclose(plus_state(1).amplitudes, [1 / math.sqrt(2)] * 2)
    assert np.allclose(plus_state(2).amplitudes, 0.5)
    assert abs(plus_state(16).norm() - 1) < 1e-12
    with pytest.raises(ValueError):
        plus_state(MAX_QUBITS + 1)
    with pytest.raises(ValueError):
        plus_state(0)


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate.zz(0, 0)
    with pytest.raises(ValueError):
        Circuit(2, (Gate.zz(0, 2),), 0)
    with pytest.raises(ValueError):
        Circuit(2, (Gate.x(0, 1),), 1)


def test_apply_gate_examples():
    s = plus_state(2)
    for g in (Gate.zz(0, 1, -1), Gate.x(1)):
        assert np.allclose(apply_gate(s, g, 0.0).amplitudes, s.amplitudes)
    out = apply_gate(apply_gate(s, Gate.zz(0, 1, -1), np.pi / 4), Gate.x(1), np.pi / 4)
    want = np.zeros(4, complex)
    want[[label_to_index("01"), label_to_index("10")]] = (1 + 1j) / 2
    assert np.allclose(out.amplitudes, want, atol=1e-12)
    out = apply_gate(apply_gate(s, Gate.zz(0, 1, 1), np.pi / 4), Gate.x(1), np.pi / 4)
    want = np.zeros(4, complex)
    want[[0, 3]] = 1 / math.sqrt(2)
    assert same_up_to_phase(out.amplitudes, want)


def test_apply_gate_matches_matrix_exponential_and_preserves_norm():
    rng = np.random.default_rng(0)
    n = 4
    amp = rng.normal(size=16) + 1j * rng.normal(size=16)
    s = StateVector(n, amp / np.linalg.norm(amp))
    for _ in range(30):
        theta = rng.uniform(-np.pi, np.pi)
        if rng.random() < 0.5:
            i, j = rng.choice(n, 2, replace=False)
            coeff = int(rng.choice((-1, 1)))
            g, h = Gate.zz(int(i), int(j), coeff), coeff * op_on(n, {int(i): Z, int(j): Z})
        else:
            q = int(rng.integers(n))
            g, h = Gate.x(q), op_on(n, {q: X})
        out = apply_gate(s, g, theta)
        assert np.allclose(out.amplitudes, expm(1j * theta * h) @ s.amplitudes, atol=1e-12)
        assert abs(out.norm() - 1) < 1e-12
        s = out


def test_objective_expectation_examples():
    g, t = eq6()
    assert abs(objective_expectation(plus_state(5), g) - g.n_edges / 2) < 1e-12
    assert abs(objective_expectation(simulate(build_exact_st_circuit(t, g)), g) - 4) < 1e-12
    amp = np.zeros(8, complex)
    amp[[label_to_index("001"), label_to_index("110")]] = 1 / math.sqrt(2)
    assert abs(objective_expectation(StateVector(3, amp), TRIANGLE) - cut_value(TRIANGLE, "001")) < 1e-12
    with pytest.raises(ValueError):
        objective_expectation(plus_state(2), TRIANGLE)


def test_sampling():
    amp = np.zeros(32, complex)
    amp[[label_to_index("01011"), label_to_index("10100")]] = 1 / math.sqrt(2)
    cat = StateVector(5, amp)
    samples = {"".join(map(str, row)) for row in sample_bitstrings(cat, 500, 1)}
    assert samples == {"01011", "10100"}
    a, b = sample_bitstrings(plus_state(3), 50, 9), sample_bitstrings(plus_state(3), 50, 9)
    assert np.array_equal(a, b)
    k = 80_000
    draws = sample_bitstrings(plus_state(3), k, 2)
    counts = np.bincount(draws @ (1 << np.arange(3)), minlength=8)
    chi2 = float(((counts - k / 8) ** 2 / (k / 8)).sum())
    assert chi2 < 24.3  # 7 dof, p = 0.001
    with pytest.raises(ValueError):
        sample_bitstrings(cat, 0)


def test_exact_st_pins():
    g, t = eq6()
    out = simulate(build_exact_st_circuit(t, g))
    want = np.zeros(32, complex)
    want[[label_to_index("01011"), label_to_index("10100")]] = -1 / math.sqrt(2)
    assert np.abs(out.amplitudes - want).max() <= 1e-12
    one = SignedGraph(2, ((0, 1, -1),))
    out = simulate(build_exact_st_circuit(DirectedSpanningTree(0, {1: (0, -1)}, ((0, 1, -1),)), one))
    assert abs(out.amplitude("01") - (1 + 1j) / 2) < 1e-12
    assert abs(out.amplitude("10") - (1 + 1j) / 2) < 1e-12


def test_exact_st_is_cat_state_of_tree_cut():
    rng = np.random.default_rng(1)
    for _ in range(50):
        g, t = random_instance(rng, 10)
        out = simulate(build_exact_st_circuit(t, g))
        z = balanced_cut_from_tree(g, t)
        support = out.support(1e-9)
        assert set(support) == {str(z), str(z.complement())}
        assert all(abs(abs(a) - 1 / math.sqrt(2)) < 1e-12 for a in support.values())
        assert abs(objective_expectation(out, g) - z.value) < 1e-10


def test_exact_st_on_optimal_tree_gives_optimum():
    rng = np.random.default_rng(2)
    for _ in range(10):
        g = random_signed_graph(int(rng.integers(3, 13)), rng)
        res = solve_brute_force(g)
        assert abs(evaluate(build_exact_st_circuit(res.tree, g), (), g) - res.value) < 1e-10


def test_vst_circuit():
    g, t = eq6()
    c = build_vst_circuit(t)
    assert c.n_params == 8
    assert np.allclose(simulate(c, np.zeros(8)).amplitudes, plus_state(5).amplitudes)
    signs = np.array([s for _, _, s in t.edge_order])
    # the sign carried by gamma reproduces the exact circuit, here even in global phase
    params = np.concatenate([signs * np.pi / 4, np.full(4, np.pi / 4)])
    assert np.allclose(simulate(c, params).amplitudes, simulate(build_exact_st_circuit(t, g)).amplitudes, atol=1e-12)


def test_qaoa_circuit():
    c = build_qaoa_circuit(TRIANGLE, 2)
    assert c.n_params == 4
    assert np.allclose(simulate(build_qaoa_circuit(TRIANGLE, 1), [0, 0]).amplitudes, plus_state(3).amplitudes)
    with pytest.raises(ValueError):
        build_qaoa_circuit(TRIANGLE, 0)


def test_qaoa_is_standard_form():
    """p=1 QAOA equals exp(-i b B) exp(-2i g C)|+> up to global phase, constant term included."""
    rng = np.random.default_rng(4)
    g = random_signed_graph(5, rng)
    n = g.n_vertices
    C = sum(0.5 * (np.eye(1 << n) + s * op_on(n, {u: Z, v: Z})) for u, v, s in g.edges)
    B = sum(op_on(n, {q: X}) for q in range(n))
    for _ in range(5):
        gamma, beta = rng.uniform(-np.pi, np.pi, 2)
        want = expm(-1j * beta * B) @ expm(-2j * gamma * C) @ np.full(1 << n, 2 ** (-n / 2), complex)
        got = simulate(build_qaoa_circuit(g, 1), [gamma, beta]).amplitudes
        assert same_up_to_phase(got, want)


def triangle_grid_max(step=1e-3):
    """Dense grid oracle for max over (g, b) of <C> after exp(-i b B) exp(-i g C)|+> on the triangle.

    C has integer spectrum, so g has period 2 pi; exp(-i b X) per qubit has period pi up to sign.
    """
    n = 3
    idx = np.arange(8)
    bits = (idx[:, None] >> np.arange(n)) & 1
    cost = sum((bits[:, u] != bits[:, v]).astype(float) for u, v, _ in TRIANGLE.edges)
    gammas = np.arange(-np.pi, np.pi, step)
    betas = np.arange(-np.pi / 2, np.pi / 2, step)
    # single-qubit mixer exp(-i b X) applied to all three qubits, for every beta at once
    c, s = np.cos(betas), -1j * np.sin(betas)
    m1 = np.stack([np.stack([c, s], -1), np.stack([s, c], -1)], -2)  # (nb, 2, 2)
    mix = np.einsum("bij,bkl,bmn->bikmjln", m1, m1, m1).reshape(len(betas), 8, 8)
    # little-endian: index bits (q2 q1 q0) match kron order (q2, q1, q0)
    best = -np.inf
    for gamma in gammas:
        psi = np.exp(-1j * gamma * cost) / math.sqrt(8)
        out = mix @ psi
        vals = (np.abs(out) ** 2) @ cost
        best = max(best, float(vals.max()))
    return best


def triangle_closed_form_max(step=1e-3):
    """Same maximum from the known p=1 edge formula (one triangle per edge, one other neighbour per end)."""
    g, b = np.meshgrid(np.arange(-np.pi, np.pi, step), np.arange(-np.pi / 2, np.pi / 2, step))
    edge = 0.5 + 0.25 * np.sin(4 * b) * np.sin(2 * g) - 0.5 * np.sin(2 * b) ** 2 * np.sin(g) ** 2
    return 3 * float(edge.max())


def test_triangle_qaoa_p1_optimum_oracles():
    # both oracles are independent of the simulator; <C> can never exceed the max cut of 2
    assert abs(triangle_grid_max(2e-3) - 2.0) < 1e-4
    assert abs(triangle_closed_form_max() - 2.0) < 1e-4


def test_st_qaoa_circuit_structure():
    g = random_regular_graph(8, 3, -1, 1)
    res = solve_random_tree(g, 0)
    c = build_st_qaoa_circuit(g, res, 3)
    assert c.n_params == 9
    assert build_st_qaoa_circuit(g, res.tree, 3) == c
    # per round: complement edges, root X, then tree ZZ/X pairs
    m_c = g.n_edges - (g.n_vertices - 1)
    first = c.gates[: m_c + 1 + 2 * (g.n_vertices - 1)]
    assert all(gt.kind == "ZZ" and gt.param_slot == 0 for gt in first[:m_c])
    assert first[m_c].kind == "X" and first[m_c].qubits == (res.tree.root,) and first[m_c].param_slot == 2
    assert np.allclose(simulate(c, np.zeros(9)).amplitudes, plus_state(8).amplitudes)


def test_st_qaoa_classical_point_reproduces_subroutine():
    rng = np.random.default_rng(5)
    for _ in range(20):
        g = random_signed_graph(int(rng.integers(3, 10)), rng)
        res = solve_gw(g, int(rng.integers(1000))) if rng.random() < 0.5 else solve_random_tree(g, rng)
        c = build_st_qaoa_circuit(g, res, 1)
        out = simulate(c, ST_QAOA_CLASSICAL_POINT)
        assert same_up_to_phase(out.amplitudes, simulate(build_exact_st_circuit(res.tree, g)).amplitudes)
        assert abs(evaluate(c, ST_QAOA_CLASSICAL_POINT, g) - res.value) < 1e-10


def test_st_qaoa_embeds_qaoa():
    rng = np.random.default_rng(6)
    for _ in range(10):
        g = random_signed_graph(int(rng.integers(3, 9)), rng)
        res = solve_random_tree(g, rng)
        p = int(rng.integers(1, 3))
        qp = rng.uniform(-np.pi, np.pi, 2 * p)
        st = simulate(build_st_qaoa_circuit(g, res, 2 * p), qaoa_embedding_params(qp)).amplitudes
        qa = simulate(build_qaoa_circuit(g, p), qp).amplitudes
        assert same_up_to_phase(st, qa)


def test_compiled_matches_reference_for_all_families():
    rng = np.random.default_rng(8)
    for _ in range(12):
        g, t = random_instance(rng, 6)
        res = solve_random_tree(g, rng)
        circuits = [build_vst_circuit(t), build_qaoa_circuit(g, 2), build_st_qaoa_circuit(g, res, 2),
                    build_exact_st_circuit(t, g)]
        for c in circuits:
            params = rng.uniform(-np.pi, np.pi, c.n_params)
            ref = reference_state(c, params)
            assert np.allclose(simulate(c, params).amplitudes, ref, atol=1e-11)
            assert abs(evaluate(c, params, g) - reference_objective(g, ref)) < 1e-10


def test_z2_symmetry_and_zero_params():
    rng = np.random.default_rng(9)
    for _ in range(10):
        g, t = random_instance(rng, 8)
        res = solve_random_tree(g, rng)
        for c in (build_vst_circuit(t), build_qaoa_circuit(g, 2), build_st_qaoa_circuit(g, res, 2)):
            out = simulate(c, rng.uniform(-np.pi, np.pi, c.n_params))
            assert np.abs(z_expectations(out)).max() < 1e-10
            assert abs(out.norm() - 1) < 1e-12
            assert abs(evaluate(c, np.zeros(c.n_params), g) - g.n_edges / 2) < 1e-12


def test_evaluate_checks_lengths():
    c = build_qaoa_circuit(TRIANGLE, 1)
    with pytest.raises(ValueError):
        evaluate(c, [0.1], TRIANGLE)
    with pytest.raises(ValueError):
        evaluate(c, [0.1, 0.2], SignedGraph(2, ((0, 1, -1),)))


def test_value_and_grad_matches_finite_differences():
    rng = np.random.default_rng(10)
    g = random_regular_graph(8, 3, -1, 2)
    res = solve_random_tree(g, 1)
    for c in (build_qaoa_circuit(g, 2), build_st_qaoa_circuit(g, res, 2), build_vst_circuit(res.tree)):
        x = rng.uniform(-np.pi, np.pi, c.n_params)
        value, grad = compile_circuit(c).value_and_grad(x, objective_vector(g))
        assert abs(value - evaluate(c, x, g)) < 1e-12
        h = 1e-5
        fd = np.array([(evaluate(c, x + h * e, g) - evaluate(c, x - h * e, g)) / (2 * h) for e in np.eye(c.n_params)])
        assert np.abs(grad - fd).max() < 1e-7


def test_circuit_text_round_trip():
    g = random_regular_graph(6, 3, -1, 0)
    res = solve_random_tree(g, 0)
    for c in (build_qaoa_circuit(g, 2), build_st_qaoa_circuit(g, res, 2), build_vst_circuit(res.tree),
              build_exact_st_circuit(res.tree, g)):
        text = circuit_to_text(c)
        assert circuit_from_text(text) == c
        assert circuit_to_text(circuit_from_text(text)) == text
    with pytest.raises(ValueError):
        circuit_from_text("ZZ 0 1 +1 0 1.0\n")
    with pytest.raises(ValueError):
        circuit_from_text("CIRCUIT 2 1\nY 0 0 1.0\n")


def test_circuit_text_golden():
    one = SignedGraph(2, ((0, 1, -1),))
    text = circuit_to_text(build_exact_st_circuit(DirectedSpanningTree(0, {1: (0, -1)}, ((0, 1, -1),)), one))
    assert text == "CIRCUIT 2 0\nZZ 0 1 -1 - 0.7853981633974483\nX 1 - 0.7853981633974483\n"


def test_tree_from_cut_then_exact_circuit_recovers_cut():
    rng = np.random.default_rng(12)
    for _ in range(20):
        g = random_signed_graph(int(rng.integers(3, 10)), rng)
        z = rng.integers(0, 2, g.n_vertices)
        cut, t = tree_from_cut(g, z)
        assert abs(evaluate(build_exact_st_circuit(t, g), (), g) - cut.value) < 1e-10
