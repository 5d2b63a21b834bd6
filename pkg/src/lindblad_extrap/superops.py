"""Dense superoperator matrices and step-size series on the dilated space.

Matrices act on row-major vectorizations: vec(A X B) = (A kron B^T) vec(X).
The dilated-step series expands the conjugation by exp(-i(eps^2 H_0 + eps H_1))
in powers of eps via the graded adjoint series

    e^{ad} X = sum_m ad^m X / m!,   ad = eps ad_{-i H_1} + eps^2 ad_{-i H_0},

collecting matrix coefficients per power of eps exactly (no symbolic algebra,
no truncation below the requested degree).
"""

from __future__ import annotations

import numpy as np

from .integrators import dilation_generators, partial_trace_ancilla
from .model import LindbladModel


def vec(a: np.ndarray) -> np.ndarray:
    return np.asarray(a, dtype=np.complex128).reshape(-1)


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v, dtype=np.complex128).reshape(dim, dim)


def conjugation_matrix(a: np.ndarray) -> np.ndarray:
    """Superoperator of X -> A X A^dag."""
    return np.kron(a, a.conj())


def lindblad_matrix(model: LindbladModel) -> np.ndarray:
    """Dense d^2 x d^2 matrix of the Lindblad generator."""
    d = model.dim
    eye = np.eye(d, dtype=np.complex128)
    h = model.hamiltonian
    out = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for l in model.jumps:
        ldl = l.conj().T @ l
        out += np.kron(l, l.conj())
        out -= 0.5 * (np.kron(ldl, eye) + np.kron(eye, ldl.T))
    return out


def kraus_effective_generator(model: LindbladModel) -> np.ndarray:
    """A = -iH - 1/2 sum_j L_j^dag L_j, the non-Hermitian part of F_0."""
    a = -1j * model.hamiltonian.copy()
    for l in model.jumps:
        a -= 0.5 * (l.conj().T @ l)
    return a


def kraus_m2_matrix(model: LindbladModel) -> np.ndarray:
    """Second-order coefficient superoperator of the Kraus step, X -> A X A^dag.

    The Kraus step is exactly I + tau*L + tau^2*M_2 (all higher coefficients
    vanish because each Kraus operator is at most linear in sqrt(tau)).
    """
    return conjugation_matrix(kraus_effective_generator(model))


def ad_series_coefficients(
    h0: np.ndarray, h1: np.ndarray, seed: np.ndarray, deg_max: int
) -> list[np.ndarray]:
    """Coefficients of eps^g in e^{-iH(eps)} seed e^{iH(eps)}, g = 0..deg_max.

    H(eps) = eps^2 h0 + eps h1.  The m-th adjoint power contributes only to
    degrees >= m, so summing m up to deg_max is exact.
    """
    dim = seed.shape[0]
    acc = [np.zeros((dim, dim), dtype=np.complex128) for _ in range(deg_max + 1)]
    acc[0] += seed
    term = {0: np.asarray(seed, dtype=np.complex128)}
    for m in range(1, deg_max + 1):
        new: dict[int, np.ndarray] = {}
        for g, mat in term.items():
            if g + 1 <= deg_max:
                c = -1j * (h1 @ mat - mat @ h1)
                new[g + 1] = new[g + 1] + c if g + 1 in new else c
            if g + 2 <= deg_max:
                c = -1j * (h0 @ mat - mat @ h0)
                new[g + 2] = new[g + 2] + c if g + 2 in new else c
        if not new:
            break
        term = {g: v / m for g, v in new.items()}
        for g, v in term.items():
            acc[g] += v
    return acc


def dilated_reduced_coefficients(
    model: LindbladModel, seed: np.ndarray, k_max: int
) -> tuple[list[np.ndarray], list[float]]:
    """Reduced tau-series coefficients of one dilated step applied to seed.

    Returns (coeffs, odd_trace_norms) where coeffs[k] is the partial trace
    over the ancilla of the eps^(2k) coefficient (so the dilated step equals
    sum_k tau^k coeffs[k] up to the truncation order) and odd_trace_norms
    records the max-entry magnitude of each odd-order partial trace, which
    vanishes by the ancilla block structure.
    """
    h0, h1 = dilation_generators(model)
    n_anc = len(model.jumps) + 1
    d = model.dim
    big = np.zeros((n_anc * d, n_anc * d), dtype=np.complex128)
    big[:d, :d] = seed
    series = ad_series_coefficients(h0, h1, big, 2 * k_max)
    coeffs = [partial_trace_ancilla(series[2 * k], n_anc, d) for k in range(k_max + 1)]
    odd = [
        float(np.max(np.abs(partial_trace_ancilla(series[g], n_anc, d))))
        for g in range(1, 2 * k_max + 1, 2)
    ]
    return coeffs, odd


def dilated_m_matrices(model: LindbladModel, n_max: int) -> list[np.ndarray]:
    """Coefficient superoperators M_0..M_n of the dilated step's tau-series.

    Built column by column from matrix units; M_0 is the identity and M_1
    equals the Lindblad generator.
    """
    d = model.dim
    mats = [np.zeros((d * d, d * d), dtype=np.complex128) for _ in range(n_max + 1)]
    unit = np.zeros((d, d), dtype=np.complex128)
    for a in range(d):
        for b in range(d):
            unit[a, b] = 1.0
            coeffs, _ = dilated_reduced_coefficients(model, unit, n_max)
            col = a * d + b
            for n in range(n_max + 1):
                mats[n][:, col] = vec(coeffs[n])
            unit[a, b] = 0.0
    return mats
