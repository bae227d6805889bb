"""Dense statevector simulation for circuits built from ZZ phases and X rotations.

Basis index ``k`` encodes qubit ``q`` in bit ``q`` (little-endian). Labels
such as ``"01011"`` list qubit 0 first, i.e. vertex order.

Gate actions::

    ZZ(i, j, coeff):  exp(i * coeff * theta * Z_i Z_j)
    X(i):             exp(i * theta * X_i)

with ``theta = param_scale * params[param_slot]``, or ``theta = param_scale``
for fixed gates (``param_slot is None``).

A tree edge of sign ``s`` is the pair ``ZZ(p, c, coeff=s)`` then ``X(c)``. At
``theta = pi/4`` this maps ``|+>|+>`` to a Bell pair that is anti-correlated
for ``s = -1`` and correlated for ``s = +1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .signed_graph import DirectedSpanningTree, SignedGraph, balanced_cut_from_tree

__all__ = [
    "MAX_QUBITS",
    "StateVector",
    "Gate",
    "Circuit",
    "plus_state",
    "apply_gate",
    "objective_vector",
    "objective_expectation",
    "z_expectations",
    "sample_bitstrings",
    "build_exact_st_circuit",
    "build_vst_circuit",
    "build_qaoa_circuit",
    "build_st_qaoa_circuit",
    "qaoa_embedding_params",
    "ST_QAOA_CLASSICAL_POINT",
    "simulate",
    "evaluate",
    "compile_circuit",
    "CompiledCircuit",
    "circuit_to_text",
    "circuit_from_text",
]

MAX_QUBITS = 24

# (gamma_c, gamma_T, beta) reproducing the exact spanning-tree state in one round
ST_QAOA_CLASSICAL_POINT = (0.0, np.pi / 4, np.pi / 4)


@dataclass(frozen=True, eq=False)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def amplitude(self, label: str) -> complex:
        """Amplitude of a basis state written qubit 0 first, e.g. ``"01011"``."""
        if len(label) != self.n_qubits:
            raise ValueError(f"label {label!r} has wrong length")
        return complex(self.amplitudes[label_to_index(label)])

    def support(self, atol: float = 1e-12) -> dict[str, complex]:
        """Nonzero amplitudes keyed by basis label."""
        nz = np.flatnonzero(np.abs(self.amplitudes) > atol)
        return {index_to_label(int(k), self.n_qubits): complex(self.amplitudes[k]) for k in nz}


def label_to_index(label: str) -> int:
    return sum(int(ch) << q for q, ch in enumerate(label))


def index_to_label(k: int, n: int) -> str:
    return "".join(str((k >> q) & 1) for q in range(n))


def _check_size(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count {n} outside 1..{MAX_QUBITS}")


def plus_state(n: int) -> StateVector:
    _check_size(n)
    dim = 1 << n
    return StateVector(n, np.full(dim, dim ** -0.5, dtype=np.complex128))


@dataclass(frozen=True)
class Gate:
    kind: str  # "ZZ" or "X"
    qubits: tuple[int, ...]
    coeff: int = 1
    param_slot: int | None = None
    param_scale: float = 1.0

    def __post_init__(self):
        if self.kind == "ZZ":
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError(f"ZZ needs two distinct qubits, got {self.qubits}")
            if self.coeff not in (1, -1):
                raise ValueError("ZZ coeff must be +1 or -1")
        elif self.kind == "X":
            if len(self.qubits) != 1:
                raise ValueError("X acts on one qubit")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")

    @classmethod
    def zz(cls, i, j, coeff=1, slot=None, scale=1.0):
        return cls("ZZ", (int(i), int(j)), int(coeff), slot, float(scale))

    @classmethod
    def x(cls, i, slot=None, scale=1.0):
        return cls("X", (int(i),), 1, slot, float(scale))

    def angle(self, params) -> float:
        if self.param_slot is None:
            return self.param_scale
        return self.param_scale * float(params[self.param_slot])


@dataclass(frozen=True)
class Circuit:
    """Gates applied left to right to ``|+>^n``."""

    n_qubits: int
    gates: tuple[Gate, ...]
    n_params: int

    def __post_init__(self):
        _check_size(self.n_qubits)
        for g in self.gates:
            if any(not 0 <= q < self.n_qubits for q in g.qubits):
                raise ValueError(f"gate {g} acts outside {self.n_qubits} qubits")
            if g.param_slot is not None and not 0 <= g.param_slot < self.n_params:
                raise ValueError(f"gate {g} uses slot outside {self.n_params} params")


def apply_gate(s: StateVector, g: Gate, theta: float) -> StateVector:
    """Return the state after one gate at angle ``theta``."""
    amp = s.amplitudes.copy()
    if g.kind == "ZZ":
        par = _kernels.parity_vector(s.n_qubits, *g.qubits)
        amp *= np.exp(1j * g.coeff * theta * par)
    else:
        _kernels.apply_x_rotations(amp, np.array(g.qubits, dtype=np.int64), np.cos(theta), np.sin(theta))
    return StateVector(s.n_qubits, amp)


@lru_cache(maxsize=32)
def objective_vector(g: SignedGraph) -> np.ndarray:
    """Number of satisfied edges for every basis state."""
    _check_size(g.n_vertices)
    out = np.zeros(1 << g.n_vertices)
    for u, v, s in g.edges:
        out += 0.5 * (1 + s * _kernels.parity_vector(g.n_vertices, u, v))
    out.setflags(write=False)
    return out


def objective_expectation(s: StateVector, g: SignedGraph) -> float:
    if s.n_qubits != g.n_vertices:
        raise ValueError(f"state has {s.n_qubits} qubits, graph has {g.n_vertices} vertices")
    return float(_kernels.weighted_probability(s.amplitudes, objective_vector(g)))


def z_expectations(s: StateVector) -> np.ndarray:
    """Per-qubit <Z_q>."""
    p = s.probabilities()
    idx = np.arange(p.size)
    return np.array([p @ (1 - 2 * ((idx >> q) & 1)) for q in range(s.n_qubits)])


def sample_bitstrings(s: StateVector, k: int, seed=None) -> np.ndarray:
    """``k`` computational-basis samples as a ``(k, n)`` array of bits."""
    if k < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    p = s.probabilities()
    draws = rng.choice(p.size, size=k, p=p / p.sum())
    return ((draws[:, None] >> np.arange(s.n_qubits)) & 1).astype(np.int8)


def _tree_gates(t: DirectedSpanningTree, gamma_slot, beta_slot, fixed=None, signed=True):
    gates = []
    for q, (p, c, sgn) in enumerate(t.edge_order):
        coeff = sgn if signed else 1
        gs = gamma_slot(q) if gamma_slot else None
        bs = beta_slot(q) if beta_slot else None
        gates.append(Gate.zz(p, c, coeff, gs, fixed if gs is None else 1.0))
        gates.append(Gate.x(c, bs, fixed if bs is None else 1.0))
    return gates


def build_exact_st_circuit(t: DirectedSpanningTree, signs_from: SignedGraph) -> Circuit:
    """Fixed pi/4 circuit preparing (|z> + |~z>)/sqrt2 for the cut induced by ``t``."""
    t.validate(signs_from)
    gates = _tree_gates(t, None, None, fixed=np.pi / 4)
    return Circuit(signs_from.n_vertices, tuple(gates), 0)


def build_vst_circuit(t: DirectedSpanningTree) -> Circuit:
    """Variational spanning tree ansatz: every tree edge gets its own (gamma, beta).

    Slot ``q`` is gamma of ``edge_order[q]`` and slot ``(n-1) + q`` its beta.
    All ZZ couplings are +1; the edge signs are left for gamma to discover.
    """
    m = len(t.edge_order)
    gates = _tree_gates(t, lambda q: q, lambda q: m + q, signed=False)
    return Circuit(m + 1, tuple(gates), 2 * m)


def build_qaoa_circuit(g: SignedGraph, p: int) -> Circuit:
    """Standard QAOA with slots (2k, 2k+1) per round.

    Each round is exp(-i beta B) exp(-i gamma sum_e s_e Z_u Z_v), which is
    exp(-i beta B) exp(-2i gamma C) up to global phase: the constant part of
    C is dropped, and gamma is half the usual cost angle so every angle has
    period pi.
    """
    if p < 1:
        raise ValueError("need at least one round")
    gates = []
    for k in range(p):
        gates += [Gate.zz(u, v, -s, 2 * k, 1.0) for u, v, s in g.edges]
        gates += [Gate.x(q, 2 * k + 1, -1.0) for q in range(g.n_vertices)]
    return Circuit(g.n_vertices, tuple(gates), 2 * p)


def build_st_qaoa_circuit(g: SignedGraph, result, r: int) -> Circuit:
    """Spanning-tree QAOA with slots ``(gamma_c, gamma_T, beta)`` per round.

    ``result`` is a DirectedSpanningTree or anything carrying one as ``.tree``
    (e.g. a SolverResult). Each round applies the non-tree edges, then the
    root X rotation, then the tree edges in ``edge_order``.
    """
    if r < 1:
        raise ValueError("need at least one round")
    t = result if isinstance(result, DirectedSpanningTree) else result.tree
    t.validate(g)
    in_tree = t.undirected_edges()
    complement = sorted(
        (min(u, v), max(u, v), s) for u, v, s in g.edges if (min(u, v), max(u, v)) not in in_tree
    )
    gates = []
    for k in range(r):
        gc, gt, b = 3 * k, 3 * k + 1, 3 * k + 2
        gates += [Gate.zz(u, v, s, gc, 1.0) for u, v, s in complement]
        gates.append(Gate.x(t.root, b, 1.0))
        gates += _tree_gates(t, lambda q: gt, lambda q: b)
    return Circuit(g.n_vertices, tuple(gates), 3 * r)


def qaoa_embedding_params(qaoa_params) -> np.ndarray:
    """ST-QAOA angles over 2p rounds that reproduce a p-round QAOA state.

    Round 2k-1 carries the cost layer, round 2k the mixer. Signs flip because
    QAOA evolves with exp(-i ...) while ST-QAOA rotates with exp(+i ...).
    """
    qp = np.asarray(qaoa_params, dtype=float).reshape(-1, 2)
    out = []
    for gamma, beta in qp:
        out += [-gamma, -gamma, 0.0, 0.0, 0.0, -beta]
    return np.array(out)


def simulate(c: Circuit, params=()) -> StateVector:
    """Output state of ``c`` on ``|+>``."""
    params = _check_params(c, params)
    compiled = compile_circuit(c)
    return StateVector(c.n_qubits, compiled.full_state(compiled.run(params)))


def evaluate(c: Circuit, params, g: SignedGraph) -> float:
    """<C> of the circuit output."""
    if c.n_qubits != g.n_vertices:
        raise ValueError(f"circuit has {c.n_qubits} qubits, graph has {g.n_vertices} vertices")
    params = _check_params(c, params)
    return compile_circuit(c).expectation(params, objective_vector(g))


def _check_params(c: Circuit, params) -> np.ndarray:
    params = np.asarray(params, dtype=float).reshape(-1)
    if params.size != c.n_params:
        raise ValueError(f"circuit takes {c.n_params} params, got {params.size}")
    return params


# --- compiled execution ---------------------------------------------------


class _Block:
    __slots__ = ("kind", "slot", "scale", "qubits", "pairs", "idx", "values", "offset")

    def __init__(self, kind, slot, scale):
        self.kind = kind
        self.slot = slot
        self.scale = scale
        self.qubits: list[int] = []
        self.pairs: list[tuple[int, int, int]] = []

    def touches(self, q: int) -> bool:
        if self.kind == "X":
            return q in self.qubits
        return any(q == i or q == j for i, j, _ in self.pairs)

    def commutes_with(self, g: Gate) -> bool:
        if g.kind == "X":
            return self.kind == "X" or not self.touches(g.qubits[0])
        return self.kind == "ZZ" or not any(self.touches(q) for q in g.qubits)

    def accepts(self, g: Gate) -> bool:
        return g.kind == self.kind and g.param_slot == self.slot and g.param_scale == self.scale

    def add(self, g: Gate) -> None:
        if g.kind == "X":
            self.qubits.append(g.qubits[0])
        else:
            self.pairs.append((g.qubits[0], g.qubits[1], g.coeff))

    def finalize(self, n: int, dim: int) -> None:
        if self.kind == "X":
            self.qubits = np.array(self.qubits, dtype=np.int64)
            return
        values = np.zeros(dim, dtype=np.int64)
        for i, j, coeff in self.pairs:
            values += coeff * _kernels.parity_vector(n, i, j, dim)
        self.offset = int(np.abs(values).max())
        self.idx = values + self.offset
        self.values = values.astype(np.float64)


class CompiledCircuit:
    """Circuit regrouped into diagonal phase layers and X-rotation layers.

    A gate is moved backwards past layers it commutes with and merged into
    the first layer sharing its kind, slot and scale. For QAOA this gives one
    diagonal and one mixer layer per round; tree rounds collapse by depth.

    Every state reachable from ``|+>`` with ZZ and X generators is invariant
    under the global flip, so only the amplitudes with the top qubit at 0 are
    stored; :meth:`full_state` restores the rest.
    """

    def __init__(self, c: Circuit):
        self.n_qubits = c.n_qubits
        self.n_params = c.n_params
        self.dim = 1 << (c.n_qubits - 1)
        blocks: list[_Block] = []
        for g in c.gates:
            target = None
            for b in reversed(blocks):
                if b.accepts(g):
                    target = b
                    break
                if not b.commutes_with(g):
                    break
            if target is None:
                target = _Block(g.kind, g.param_slot, g.param_scale)
                blocks.append(target)
            target.add(g)
        for b in blocks:
            b.finalize(c.n_qubits, self.dim)
        self.blocks = blocks
        self._history = None

    def _theta(self, b: _Block, params) -> float:
        return b.scale if b.slot is None else b.scale * params[b.slot]

    def _apply(self, state, b: _Block, theta: float) -> None:
        if b.kind == "X":
            _kernels.apply_x_rotations(state, b.qubits, np.cos(theta), np.sin(theta))
        else:
            table = np.exp(1j * theta * np.arange(-b.offset, b.offset + 1))
            _kernels.apply_phase_table(state, b.idx, table)

    def _initial(self) -> np.ndarray:
        return np.full(self.dim, (2 * self.dim) ** -0.5, dtype=np.complex128)

    def run(self, params) -> np.ndarray:
        """Half state (top qubit 0) after the circuit."""
        state = self._initial()
        for b in self.blocks:
            self._apply(state, b, self._theta(b, params))
        return state

    @staticmethod
    def full_state(half: np.ndarray) -> np.ndarray:
        # index 2^n - 1 - k is the complement of k
        return np.concatenate([half, half[::-1]])

    def expectation(self, params, cost: np.ndarray) -> float:
        return 2.0 * float(_kernels.weighted_probability(self.run(params), cost[: self.dim]))

    def value_and_grad(self, params, cost: np.ndarray) -> tuple[float, np.ndarray]:
        """Expectation and exact gradient by reverse-mode (adjoint) sweep."""
        cost = cost[: self.dim]
        if self._history is None:
            n_slots = sum(b.slot is not None for b in self.blocks)
            self._history = np.empty((n_slots, self.dim), dtype=np.complex128)
        state = self._initial()
        thetas = [self._theta(b, params) for b in self.blocks]
        history = []
        row = 0
        for b, theta in zip(self.blocks, thetas):
            self._apply(state, b, theta)
            if b.slot is None:
                history.append(None)
            else:
                np.copyto(self._history[row], state)
                history.append(self._history[row])
                row += 1
        value = 2.0 * float(_kernels.weighted_probability(state, cost))
        lam = cost * state
        grad = np.zeros(self.n_params)
        for b, theta, psi in zip(reversed(self.blocks), reversed(thetas), reversed(history)):
            if psi is not None:
                if b.kind == "X":
                    ov = _kernels.x_overlap(lam, b.qubits, psi)
                else:
                    ov = _kernels.diag_overlap(lam, b.values, psi)
                # factor 2 from d<C> = 2 Re<lam|dpsi>, another 2 from the dropped half
                grad[b.slot] -= 4.0 * b.scale * ov.imag
            self._apply(lam, b, -theta)
        return value, grad


@lru_cache(maxsize=64)
def compile_circuit(c: Circuit) -> CompiledCircuit:
    return CompiledCircuit(c)


# --- text form ------------------------------------------------------------


def circuit_to_text(c: Circuit) -> str:
    """One gate per line: ``ZZ i j coeff slot scale`` / ``X i slot scale``.

    Fixed-angle gates write ``-`` for the slot and the angle as scale.
    """
    lines = [f"CIRCUIT {c.n_qubits} {c.n_params}"]
    for g in c.gates:
        slot = "-" if g.param_slot is None else str(g.param_slot)
        if g.kind == "ZZ":
            lines.append(f"ZZ {g.qubits[0]} {g.qubits[1]} {g.coeff:+d} {slot} {g.param_scale!r}")
        else:
            lines.append(f"X {g.qubits[0]} {slot} {g.param_scale!r}")
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str) -> Circuit:
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows or rows[0][0] != "CIRCUIT":
        raise ValueError("missing 'CIRCUIT n_qubits n_params' header")
    n, n_params = int(rows[0][1]), int(rows[0][2])
    gates = []
    for row in rows[1:]:
        if row[0] == "ZZ" and len(row) == 6:
            slot = None if row[4] == "-" else int(row[4])
            gates.append(Gate.zz(row[1], row[2], int(row[3]), slot, float(row[5])))
        elif row[0] == "X" and len(row) == 4:
            slot = None if row[2] == "-" else int(row[2])
            gates.append(Gate.x(row[1], slot, float(row[3])))
        else:
            raise ValueError(f"bad gate line: {' '.join(row)!r}")
    return Circuit(n, tuple(gates), n_params)


def exact_st_state(g: SignedGraph, t: DirectedSpanningTree) -> tuple[StateVector, str]:
    """Convenience: exact spanning-tree state together with its cut label."""
    cut = balanced_cut_from_tree(g, t)
    return simulate(build_exact_st_circuit(t, g)), str(cut)
