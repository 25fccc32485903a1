"""Shared oracle helpers for the test suite.

These deliberately rebuild gate action through dense matrices and explicit
bit arithmetic, independent of the engine's in-place kernels.
"""

import functools
import math
import operator

import numpy as np
import scipy.linalg

from qnmr.gates import GateKind, gate, gate_matrix


def embed(local, qubits, width):
    """Dense full-register matrix of a local operator (oracle path)."""
    dim = 1 << width
    full = np.zeros((dim, dim), dtype=complex)
    pair_mask = functools.reduce(operator.or_, (1 << q for q in qubits))
    rest_mask = (dim - 1) ^ pair_mask
    for row in range(dim):
        loc_row = sum(((row >> q) & 1) << p for p, q in enumerate(qubits))
        base = row & rest_mask
        for loc_col in range(1 << len(qubits)):
            col = base | sum(
                ((loc_col >> p) & 1) << q for p, q in enumerate(qubits)
            )
            full[row, col] = local[loc_row, loc_col]
    return full


def circuit_unitary(gates, width):
    """Product of embedded gate matrices, measurement gates skipped."""
    u = np.eye(1 << width, dtype=complex)
    for g in gates:
        if g.kind is GateKind.MEASURE:
            continue
        u = embed(gate_matrix(g), g.qubits, width) @ u
    return u


def random_state(rng, width):
    v = rng.normal(size=1 << width) + 1j * rng.normal(size=1 << width)
    return v / np.linalg.norm(v)


def random_gate(rng, width):
    kind = rng.choice([
        GateKind.PREPH, GateKind.PAULIX, GateKind.RZ, GateKind.SU2,
        GateKind.RXX, GateKind.RYY, GateKind.RZZ, GateKind.CZ, GateKind.SWAP,
    ])
    n_params = {GateKind.RZ: 1, GateKind.SU2: 3,
                GateKind.RXX: 1, GateKind.RYY: 1, GateKind.RZZ: 1}.get(kind, 0)
    two = kind in (GateKind.RXX, GateKind.RYY, GateKind.RZZ, GateKind.CZ, GateKind.SWAP)
    qubits = tuple(rng.choice(width, size=2 if two else 1, replace=False).tolist())
    params = tuple(rng.uniform(-2 * math.pi, 2 * math.pi, size=n_params).tolist())
    return gate(kind, *qubits, params=params)


def random_unitary(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def term_exponential_product(h, t):
    """Ordered product of per-term exponentials (independent of circuits)."""
    from qnmr.gates import MAT_X, MAT_Y, MAT_Z

    def single(k, op):
        ops = [np.eye(2, dtype=complex)] * h.n_spins
        ops[k] = op
        out = np.array([[1.0 + 0j]])
        for o in ops:
            out = np.kron(o, out)
        return out

    def pair(i, j, op):
        ops = [np.eye(2, dtype=complex)] * h.n_spins
        ops[i] = op
        ops[j] = op
        out = np.array([[1.0 + 0j]])
        for o in ops:
            out = np.kron(o, out)
        return out

    dim = 1 << h.n_spins
    u = np.eye(dim, dtype=complex)
    for k, omega in h.z_terms:
        u = scipy.linalg.expm(-0.5j * omega * t * single(k, MAT_Z)) @ u
    for i, j, c in h.coupling_terms:
        term = 0.25 * c * (pair(i, j, MAT_X) + pair(i, j, MAT_Y) + pair(i, j, MAT_Z))
        u = scipy.linalg.expm(-1j * term * t) @ u
    return u


def random_term_list(rng, n, coupling_density=0.6, z_scale=200.0, j_scale=60.0):
    from qnmr.hamiltonian import PauliTermList

    z_terms = tuple((k, float(rng.normal(scale=z_scale))) for k in range(n))
    coupling_terms = tuple(
        (i, j, float(rng.normal(scale=j_scale)))
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < coupling_density
    )
    return PauliTermList(n, z_terms, coupling_terms)
