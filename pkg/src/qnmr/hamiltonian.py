"""Rotating-frame Hamiltonian for liquid-state spin systems.

Conventions (shared across the package):

* spin operators are half Paulis, ``I = sigma / 2``;
* each spin ``k`` contributes an offset term ``omega_k * Z_k / 2`` with
  ``omega_k = gamma_k * B0 * shift_ppm[k] * 1e-6`` (rad/s), i.e. the
  rotating frame of every species sits at that species' 0 ppm reference;
* each nonzero coupling ``J_ij`` (Hz) contributes the full isotropic term
  ``c_ij * (X_i X_j + Y_i Y_j + Z_i Z_j) / 4`` with ``c_ij = 2*pi*J_ij``;
  no secular truncation is applied.

Term order is canonical everywhere: offset terms by spin index, then
coupling terms sorted by ``(i, j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, ValidationError
from .spins import FieldConfig, SpinSystem

DENSE_SPIN_LIMIT = 12


@dataclass(frozen=True)
class PauliTermList:
    """Hamiltonian as weighted Pauli terms (see module docstring for units)."""

    n_spins: int
    z_terms: tuple[tuple[int, float], ...]
    coupling_terms: tuple[tuple[int, int, float], ...]

    def __post_init__(self) -> None:
        covered = [k for k, _ in self.z_terms]
        if covered != list(range(self.n_spins)):
            raise ValidationError("z terms must cover each spin exactly once, in order")
        for i, j, _ in self.coupling_terms:
            if not (0 <= i < j < self.n_spins):
                raise ValidationError(f"coupling term ({i},{j}) out of range")

    @property
    def n_terms(self) -> int:
        return len(self.z_terms) + len(self.coupling_terms)


def offset_frequencies(system: SpinSystem, field: FieldConfig) -> np.ndarray:
    """Rotating-frame offsets omega_k in rad/s, one per spin.

    Linear in both the field and the shifts; zero shift maps to zero offset.
    """
    omegas = np.empty(system.n_spins)
    for k in range(system.n_spins):
        nu_k = field.larmor_frequency_hz(system.isotope(k))
        omegas[k] = 2.0 * math.pi * system.shifts_ppm[k] * 1e-6 * nu_k
    return omegas


def build_rotating_hamiltonian(system: SpinSystem, field: FieldConfig) -> PauliTermList:
    """Offset plus isotropic-coupling terms for the given system and field."""
    omegas = offset_frequencies(system, field)
    z_terms = tuple((k, float(omegas[k])) for k in range(system.n_spins))
    coupling_terms = tuple(
        (i, j, 2.0 * math.pi * jhz)
        for (i, j), jhz in sorted(system.couplings_hz.items())
    )
    return PauliTermList(system.n_spins, z_terms, coupling_terms)


def dense_hamiltonian(h: PauliTermList) -> np.ndarray:
    """Dense matrix of ``h`` in the computational basis (qubit 0 = low bit).

    Guarded to small systems; statevector paths never materialize this.
    """
    n = h.n_spins
    if n > DENSE_SPIN_LIMIT:
        raise CapabilityError(
            f"dense Hamiltonian limited to {DENSE_SPIN_LIMIT} spins, got {n}"
        )
    dim = 1 << n
    idx = np.arange(dim)
    diag = np.zeros(dim)
    mat = np.zeros((dim, dim), dtype=complex)
    for k, omega in h.z_terms:
        diag += 0.5 * omega * (1.0 - 2.0 * ((idx >> k) & 1))
    for i, j, c in h.coupling_terms:
        sign_i = 1.0 - 2.0 * ((idx >> i) & 1)
        sign_j = 1.0 - 2.0 * ((idx >> j) & 1)
        diag += 0.25 * c * sign_i * sign_j
        # (XX + YY)/2 exchanges anti-aligned bit pairs; coefficient c/4 * 2.
        mask = (1 << i) | (1 << j)
        anti = idx[sign_i * sign_j < 0]
        mat[anti ^ mask, anti] += 0.5 * c
    mat[idx, idx] += diag
    return mat


class ExactPropagator:
    """Reference time evolution by eigendecomposition, reused across times."""

    def __init__(self, h: PauliTermList):
        self.h = h
        self._evals, self._evecs = np.linalg.eigh(dense_hamiltonian(h))

    def state_at(self, t: float, psi0: np.ndarray) -> np.ndarray:
        phases = np.exp(-1j * self._evals * t)
        return self._evecs @ (phases * (self._evecs.conj().T @ psi0))


def exact_propagator_state(h: PauliTermList, t: float, psi0: np.ndarray) -> np.ndarray:
    """Apply exp(-i H t) to psi0 (reference path, small systems only)."""
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (1 << h.n_spins,):
        raise ValidationError(
            f"state has dimension {psi0.shape}, expected {(1 << h.n_spins,)}"
        )
    return ExactPropagator(h).state_at(t, psi0)
