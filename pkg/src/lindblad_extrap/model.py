"""Core domain types for Lindblad dynamics.

A model is a Hermitian system Hamiltonian H plus a list of jump operators
L_j (decay rates absorbed into the operators), generating

    L rho = -i[H, rho] + sum_j ( L_j rho L_j^dag - 1/2 {L_j^dag L_j, rho} ).

States are density matrices (Hermitian, unit trace, PSD) and observables
are Hermitian matrices with a cached spectral-norm bound used for shot
planning.  All values are immutable after construction and all operations
are pure functions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

TOL_HERM = 1e-10
TOL_TRACE = 1e-10
TOL_PSD = 1e-8
TOL_EIG = 1e-9


class DimensionMismatchError(ValueError):
    """Operands live on Hilbert spaces of different dimension."""


class InvalidStateError(ValueError):
    """A matrix violates a density-matrix or Hermiticity invariant."""


def as_complex_matrix(a) -> np.ndarray:
    """Validate and return a square complex matrix with finite entries."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(np.float64))):
        raise ValueError("matrix entries must be finite")
    return m


def herm_defect(a: np.ndarray) -> float:
    """Max-norm deviation from Hermiticity, ||A - A^dag||_max."""
    return float(np.max(np.abs(a - a.conj().T)))


def spectral_norm(a: np.ndarray) -> float:
    """Largest singular value, via Hermitian eigendecomposition of A^dag A."""
    a = np.asarray(a, dtype=np.complex128)
    ev = np.linalg.eigvalsh(a.conj().T @ a)
    return float(np.sqrt(max(ev[-1], 0.0)))


def trace_norm(a) -> float:
    """Schatten 1-norm: the sum of singular values."""
    m = as_complex_matrix(a)
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


@dataclass(frozen=True)
class LindbladModel:
    """Hamiltonian plus jump operators on a d-dimensional system.

    Rates are absorbed into the jump operators, so each ``jumps[j]`` is
    sqrt(rate) times a bare operator.
    """

    hamiltonian: np.ndarray
    jumps: tuple[np.ndarray, ...]
    dim: int = field(init=False)

    def __post_init__(self):
        h = as_complex_matrix(self.hamiltonian)
        if herm_defect(h) > TOL_HERM:
            raise ValueError(
                f"hamiltonian is not Hermitian (defect {herm_defect(h):.3e})"
            )
        jumps = tuple(as_complex_matrix(l) for l in self.jumps)
        for l in jumps:
            if l.shape != h.shape:
                raise DimensionMismatchError(
                    f"jump operator shape {l.shape} != hamiltonian shape {h.shape}"
                )
        h.setflags(write=False)
        for l in jumps:
            l.setflags(write=False)
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "jumps", jumps)
        object.__setattr__(self, "dim", h.shape[0])


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, PSD matrix (tolerance-checked at construction)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        if herm_defect(m) > TOL_HERM:
            raise InvalidStateError(f"not Hermitian (defect {herm_defect(m):.3e})")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TOL_TRACE:
            raise InvalidStateError(f"trace {tr} deviates from 1 beyond {TOL_TRACE}")
        min_ev = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
        if min_ev < -TOL_PSD:
            raise InvalidStateError(f"minimum eigenvalue {min_ev:.3e} < -{TOL_PSD}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_pure(cls, vector) -> "DensityMatrix":
        v = np.asarray(vector, dtype=np.complex128).reshape(-1)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=np.complex128) / dim)


@dataclass(frozen=True)
class Observable:
    """Hermitian observable with its spectral norm as Hoeffding range."""

    matrix: np.ndarray
    bound_alpha: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        if herm_defect(m) > TOL_HERM:
            raise ValueError(f"observable not Hermitian (defect {herm_defect(m):.3e})")
        norm = spectral_norm(m)
        if self.bound_alpha is None:
            object.__setattr__(self, "bound_alpha", norm)
        elif abs(self.bound_alpha - norm) > TOL_EIG * max(1.0, norm):
            raise ValueError(
                f"bound_alpha {self.bound_alpha} != spectral norm {norm}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def lindblad_apply(model: LindbladModel, a) -> np.ndarray:
    """Apply the Lindblad generator to a matrix.

    Returns -i[H, a] + sum_j (L_j a L_j^dag - 1/2 {L_j^dag L_j, a}).
    """
    a = as_complex_matrix(a)
    if a.shape[0] != model.dim:
        raise DimensionMismatchError(f"matrix dim {a.shape[0]} != model dim {model.dim}")
    h = model.hamiltonian
    out = -1j * (h @ a - a @ h)
    for l in model.jumps:
        ld = l.conj().T
        ldl = ld @ l
        out += l @ a @ ld - 0.5 * (ldl @ a + a @ ldl)
    return out


def generator_bound(model: LindbladModel) -> float:
    """Upper bound on the generator's trace-norm-induced norm.

    2 ||H|| + 2 sum_j ||L_j||^2 with spectral norms.
    """
    return float(
        2.0 * spectral_norm(model.hamiltonian)
        + 2.0 * sum(spectral_norm(l) ** 2 for l in model.jumps)
    )


def expectation(rho: DensityMatrix, obs: Observable) -> float:
    """Re Tr(rho O).  Bounded by ``obs.bound_alpha`` for any valid state."""
    if rho.dim != obs.dim:
        raise DimensionMismatchError(f"state dim {rho.dim} != observable dim {obs.dim}")
    return float(np.trace(rho.matrix @ obs.matrix).real)


def rescale_model(model: LindbladModel, total_time: float) -> LindbladModel:
    """Fold a total evolution time into the generator.

    H -> T*H and L_j -> sqrt(T)*L_j, so the rescaled generator equals T*L
    and evolving the result to time 1 reproduces the original dynamics at
    time T.
    """
    if total_time <= 0:
        raise ValueError(f"total_time must be positive, got {total_time}")
    t = float(total_time)
    return LindbladModel(
        hamiltonian=t * model.hamiltonian,
        jumps=tuple(np.sqrt(t) * l for l in model.jumps),
    )


def matrix_to_json(a: np.ndarray) -> list:
    """Row-major nested lists of [re, im] pairs."""
    m = as_complex_matrix(a)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[0] != arr.shape[1] or arr.shape[2] != 2:
        raise ValueError(f"expected shape (d, d, 2), got {arr.shape}")
    return as_complex_matrix(arr[..., 0] + 1j * arr[..., 1])


def model_to_json(model: LindbladModel) -> dict:
    return {
        "dim": model.dim,
        "hamiltonian": matrix_to_json(model.hamiltonian),
        "jumps": [matrix_to_json(l) for l in model.jumps],
    }


def model_from_json(data) -> LindbladModel:
    if isinstance(data, str):
        data = json.loads(data)
    model = LindbladModel(
        hamiltonian=matrix_from_json(data["hamiltonian"]),
        jumps=tuple(matrix_from_json(l) for l in data.get("jumps", [])),
    )
    if model.dim != data["dim"]:
        raise ValueError(f"declared dim {data['dim']} != matrix dim {model.dim}")
    return model
