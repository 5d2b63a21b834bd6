"""Experimental systems: seeded random Lindbladians and the dissipative
transverse-field Ising chain with its normalized x-magnetization."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .model import DensityMatrix, LindbladModel, Observable, spectral_norm
from .sampling import rng_stream

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=np.complex128)


@dataclass(frozen=True)
class TfimParams:
    n_q: int = 4
    omega: float = 1.0
    omega_r: float = 0.8
    coupling_j: float = 0.3
    gamma: float = 0.4

    def __post_init__(self):
        if self.n_q < 1:
            raise ValueError(f"n_q must be >= 1, got {self.n_q}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")


def site_operator(op: np.ndarray, site: int, n_q: int) -> np.ndarray:
    """Embed a single-qubit operator at the given site of an n_q chain."""
    factors = [np.eye(2, dtype=np.complex128)] * n_q
    factors[site] = op
    return reduce(np.kron, factors)


def build_tfim(p: TfimParams) -> tuple[LindbladModel, Observable]:
    """Transverse-field Ising chain with per-site decay.

    H = sum_q (omega/2 sz_q + omega_r/2 sx_q) + sum_q J sx_q sx_{q+1},
    jumps sqrt(gamma) sminus_q, observable sum_q sx_q normalized to unit
    spectral norm.
    """
    n = p.n_q
    dim = 2**n
    h = np.zeros((dim, dim), dtype=np.complex128)
    total_sx = np.zeros((dim, dim), dtype=np.complex128)
    for q in range(n):
        h += 0.5 * p.omega * site_operator(SIGMA_Z, q, n)
        h += 0.5 * p.omega_r * site_operator(SIGMA_X, q, n)
        total_sx += site_operator(SIGMA_X, q, n)
    for q in range(n - 1):
        h += p.coupling_j * (
            site_operator(SIGMA_X, q, n) @ site_operator(SIGMA_X, q + 1, n)
        )
    jumps = tuple(
        np.sqrt(p.gamma) * site_operator(SIGMA_MINUS, q, n) for q in range(n)
    )
    # ||sum_q sx_q|| = n_q: the site terms commute and share eigenvalues +-1.
    obs = Observable(total_sx / n)
    return LindbladModel(hamiltonian=h, jumps=jumps), obs


def _ginibre(rng: np.random.Generator, dim: int) -> np.ndarray:
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def random_model(
    dim: int, n_jumps: int = 1, seed: int = 0, scale: float = 1.0
) -> tuple[LindbladModel, Observable]:
    """Seeded complex-Gaussian model: H and O symmetrized, every operator
    rescaled to the given spectral norm (observable to norm 1)."""
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    rng = rng_stream(seed, 0)
    g = _ginibre(rng, dim)
    h = (g + g.conj().T) / 2
    h = h * (scale / spectral_norm(h))
    jumps = []
    for _ in range(n_jumps):
        l = _ginibre(rng, dim)
        jumps.append(l * (scale / spectral_norm(l)))
    o = _ginibre(rng, dim)
    o = (o + o.conj().T) / 2
    o = o / spectral_norm(o)
    return LindbladModel(hamiltonian=h, jumps=tuple(jumps)), Observable(o)


def random_pure_state(dim: int, seed: int = 0) -> DensityMatrix:
    """Seeded Haar-like random pure state."""
    rng = rng_stream(seed, 1)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return DensityMatrix.from_pure(v)


def random_density_matrix(dim: int, seed: int = 0) -> DensityMatrix:
    """Seeded full-rank random mixed state (normalized G G^dag)."""
    rng = rng_stream(seed, 2)
    g = _ginibre(rng, dim)
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def ground_state(dim: int) -> DensityMatrix:
    """|0...0><0...0|."""
    v = np.zeros(dim, dtype=np.complex128)
    v[0] = 1.0
    return DensityMatrix.from_pure(v)


def by_name(name: str, params: dict | None = None, seed: int = 0):
    """Look up a zoo system: returns (model, observable, initial state)."""
    params = dict(params or {})
    if name == "tfim":
        model, obs = build_tfim(TfimParams(**params))
        return model, obs, ground_state(model.dim)
    if name == "random16":
        params.setdefault("dim", 16)
    if name in ("random16", "random"):
        dim = int(params.pop("dim"))
        model, obs = random_model(dim=dim, seed=seed, **params)
        return model, obs, random_pure_state(dim, seed=seed)
    raise ValueError(f"unknown model {name!r} (known: tfim, random16, random)")
