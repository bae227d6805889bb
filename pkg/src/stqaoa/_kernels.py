"""In-place statevector kernels (little-endian: qubit q is bit q of the index).

Complex arrays are passed as interleaved float64 views (``a.view(np.float64)``)
so the loops stay in real arithmetic.

The X kernels also accept a flip-symmetric half state: when ``1 << q`` equals
the array length, qubit ``q`` is the dropped top qubit and ``X_q`` pairs
index ``k`` with ``len - 1 - k`` (since psi(z) = psi(~z)).
"""

import numpy as np
from numba import njit


@njit(cache=True, fastmath=True)
def _x_rotations(v, qubits, c, s):
    n = v.shape[0] // 2
    for q in qubits:
        stride = 1 << q
        if stride >= n and n == 1:
            # single stored amplitude: X acts as +1 on the symmetric state
            ar = v[0]
            ai = v[1]
            v[0] = c * ar - s * ai
            v[1] = c * ai + s * ar
            continue
        if stride >= n:
            for k in range(n // 2):
                i0 = 2 * k
                i1 = 2 * (n - 1 - k)
                ar = v[i0]
                ai = v[i0 + 1]
                br = v[i1]
                bi = v[i1 + 1]
                v[i0] = c * ar - s * bi
                v[i0 + 1] = c * ai + s * br
                v[i1] = c * br - s * ai
                v[i1 + 1] = c * bi + s * ar
            continue
        for base in range(0, n, 2 * stride):
            for k in range(base, base + stride):
                i0 = 2 * k
                i1 = 2 * (k + stride)
                ar = v[i0]
                ai = v[i0 + 1]
                br = v[i1]
                bi = v[i1 + 1]
                v[i0] = c * ar - s * bi
                v[i0 + 1] = c * ai + s * br
                v[i1] = c * br - s * ai
                v[i1 + 1] = c * bi + s * ar


@njit(cache=True, fastmath=True)
def _phase_table(v, idx, tr, ti):
    for k in range(idx.shape[0]):
        j = idx[k]
        ar = v[2 * k]
        ai = v[2 * k + 1]
        v[2 * k] = ar * tr[j] - ai * ti[j]
        v[2 * k + 1] = ar * ti[j] + ai * tr[j]


@njit(cache=True, fastmath=True)
def _diag_overlap(bra, values, ket):
    re = 0.0
    im = 0.0
    for k in range(values.shape[0]):
        br = bra[2 * k]
        bi = bra[2 * k + 1]
        kr = ket[2 * k]
        ki = ket[2 * k + 1]
        re += values[k] * (br * kr + bi * ki)
        im += values[k] * (br * ki - bi * kr)
    return re, im


@njit(cache=True, fastmath=True)
def _x_overlap(bra, qubits, ket):
    n = ket.shape[0] // 2
    re = 0.0
    im = 0.0
    for q in qubits:
        stride = 1 << q
        if stride >= n:
            for k in range(n):
                i0 = 2 * k
                i1 = 2 * (n - 1 - k)
                re += bra[i0] * ket[i1] + bra[i0 + 1] * ket[i1 + 1]
                im += bra[i0] * ket[i1 + 1] - bra[i0 + 1] * ket[i1]
            continue
        for base in range(0, n, 2 * stride):
            for k in range(base, base + stride):
                i0 = 2 * k
                i1 = 2 * (k + stride)
                # conj(bra0) ket1 + conj(bra1) ket0
                re += bra[i0] * ket[i1] + bra[i0 + 1] * ket[i1 + 1]
                re += bra[i1] * ket[i0] + bra[i1 + 1] * ket[i0 + 1]
                im += bra[i0] * ket[i1 + 1] - bra[i0 + 1] * ket[i1]
                im += bra[i1] * ket[i0 + 1] - bra[i1 + 1] * ket[i0]
    return re, im


@njit(cache=True, fastmath=True)
def _weighted_probability(v, values):
    acc = 0.0
    for k in range(values.shape[0]):
        acc += (v[2 * k] * v[2 * k] + v[2 * k + 1] * v[2 * k + 1]) * values[k]
    return acc


def apply_x_rotations(state, qubits, c, s):
    """state <- prod_q (c + i s X_q) state, in place."""
    _x_rotations(state.view(np.float64), qubits, c, s)


def apply_phase_table(state, idx, table):
    """state[k] *= table[idx[k]], in place."""
    _phase_table(state.view(np.float64), idx, np.ascontiguousarray(table.real), np.ascontiguousarray(table.imag))


def diag_overlap(bra, values, ket):
    """<bra| diag(values) |ket>."""
    re, im = _diag_overlap(bra.view(np.float64), values, ket.view(np.float64))
    return complex(re, im)


def x_overlap(bra, qubits, ket):
    """<bra| sum_q X_q |ket>."""
    re, im = _x_overlap(bra.view(np.float64), qubits, ket.view(np.float64))
    return complex(re, im)


def weighted_probability(state, values):
    """sum_k |state[k]|^2 values[k]."""
    return _weighted_probability(state.view(np.float64), values)


def parity_vector(n, i, j, size=None):
    """+1 where bits i and j agree, -1 where they differ (first ``size`` entries)."""
    idx = np.arange(1 << n if size is None else size, dtype=np.int64)
    return 1 - 2 * (((idx >> i) ^ (idx >> j)) & 1)
