"""Shot-noise simulation and Hoeffding-based sample planning.

Measurement is exact Born sampling in the observable's eigenbasis: the
outcome distribution over eigenvalues is p_k = Tr(rho P_k), drawn with a
counter-based (Philox) generator keyed by (master seed, node index, trial
index) so that parallel execution is reproducible regardless of
scheduling.  A Gaussian surrogate with the matching worst-case variance is
available behind a flag for very large shot counts.

States produced by the raw Kraus map carry a small trace drift; their
estimates sample the normalized distribution and scale the mean back by
the trace, which keeps the estimator unbiased for Tr(rho O) without
renormalizing the state itself.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .grids import StepGrid
from .integrators import IntegratorKind, Trajectory, evolve
from .model import TOL_PSD, DensityMatrix, DimensionMismatchError, LindbladModel, Observable

BORN = "born"
GAUSSIAN = "gaussian"


class StateValidityError(ValueError):
    """Measurement probabilities fall outside tolerance."""


@dataclass(frozen=True)
class ShotEstimate:
    """Empirical mean of n_shots eigenvalue draws.

    ``alpha`` is the range bound of the draws (the observable's spectral
    norm, scaled by the state's trace when the state is a raw integrator
    output).
    """

    mean: float
    n_shots: int
    alpha: float
    seed: int
    node_index: int

    def __post_init__(self):
        if self.n_shots < 1:
            raise ValueError("n_shots must be >= 1")
        if abs(self.mean) > self.alpha * (1 + 1e-12) + 1e-15:
            raise ValueError(f"|mean|={abs(self.mean)} exceeds alpha={self.alpha}")


@dataclass(frozen=True)
class SamplingPlan:
    shots_per_node: int
    epsilon: float
    delta: float
    gamma_l1: float

    def __post_init__(self):
        if self.shots_per_node < 1:
            raise ValueError("shots_per_node must be >= 1")


def rng_stream(seed: int, *path: int) -> np.random.Generator:
    """Philox generator for the (seed, *path) stream."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=tuple(path)))
    )


def hoeffding_shots(alpha: float, gamma_l1: float, epsilon: float, delta: float) -> int:
    """Shots per node so the extrapolated estimator deviates by less than
    epsilon with probability at least 1 - delta:
    ceil(2 alpha^2 ||gamma||_1^2 / eps^2 * log(2/delta))."""
    if min(alpha, gamma_l1, epsilon, delta) <= 0 or delta >= 1:
        raise ValueError("inputs must be positive with delta < 1")
    return int(math.ceil(2 * alpha**2 * gamma_l1**2 / epsilon**2 * math.log(2 / delta)))


def _born_probabilities(matrix: np.ndarray, obs: Observable) -> tuple[np.ndarray, np.ndarray, float]:
    """(eigenvalues, outcome distribution, trace scale) for a state matrix.

    The matrix may carry a trace different from 1 (raw Kraus output); the
    distribution is normalized by the trace and the scale returned so the
    caller can keep its estimator aimed at Tr(rho O).
    """
    lam, v = np.linalg.eigh(obs.matrix)
    probs = np.einsum("ik,ij,jk->k", v.conj(), matrix, v).real
    scale = float(np.sum(probs))
    if scale <= 0:
        raise StateValidityError(f"state trace {scale} is not positive")
    p = probs / scale
    if np.any(p < -TOL_PSD) or np.any(p > 1 + TOL_PSD):
        raise StateValidityError(
            f"outcome probabilities outside [-{TOL_PSD}, 1+{TOL_PSD}]: "
            f"min={p.min():.3e}, max={p.max():.3e}"
        )
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    return lam, p, scale


def _measure_matrix(
    matrix: np.ndarray,
    obs: Observable,
    n_shots: int,
    rng: np.random.Generator,
    mode: str = BORN,
) -> tuple[float, float]:
    """(mean, range bound) of an n_shot estimate of Tr(matrix O)."""
    lam, p, scale = _born_probabilities(matrix, obs)
    if mode == BORN:
        counts = rng.multinomial(n_shots, p)
        mean = float(np.dot(counts, lam)) / n_shots * scale
    elif mode == GAUSSIAN:
        truth = float(np.dot(p, lam)) * scale
        spread = float(lam[-1] - lam[0]) * scale
        mean = truth + rng.standard_normal() * spread / (2 * math.sqrt(n_shots))
        # The surrogate is unbounded; clip to the exact-sampling range.
        mean = float(np.clip(mean, lam[0] * scale, lam[-1] * scale))
    else:
        raise ValueError(f"unknown sampling mode {mode!r}")
    return mean, obs.bound_alpha * max(scale, 1.0)


def measure_shots(
    rho: DensityMatrix,
    obs: Observable,
    n_shots: int,
    seed: int,
    node_index: int = 0,
    mode: str = BORN,
) -> ShotEstimate:
    """Unbiased n_shot estimate of Tr(rho O) by sampling the eigenbasis."""
    if rho.dim != obs.dim:
        raise DimensionMismatchError(f"state dim {rho.dim} != observable dim {obs.dim}")
    if n_shots < 1:
        raise ValueError(f"n_shots must be >= 1, got {n_shots}")
    mean, alpha = _measure_matrix(
        rho.matrix, obs, n_shots, rng_stream(seed, node_index), mode
    )
    return ShotEstimate(
        mean=mean, n_shots=n_shots, alpha=alpha, seed=seed, node_index=node_index
    )


def noisy_curve(
    model: LindbladModel,
    rho0: DensityMatrix,
    grid: StepGrid,
    obs: Observable,
    kind: IntegratorKind,
    n_shots: int,
    seed: int,
    mode: str = BORN,
) -> list[ShotEstimate]:
    """Shot-noise estimates of the observable curve over a quantized grid.

    Node j evolves with its integer step count and is measured on an
    independent stream keyed by (seed, j).
    """
    if not grid.quantized:
        raise ValueError("noisy_curve needs a quantized grid (integer step counts)")
    out = []
    for j, k_steps in enumerate(grid.step_counts):
        traj = evolve(model, rho0, grid.total_time, k_steps, kind)
        mean, alpha = _measure_matrix(
            traj.final_state, obs, n_shots, rng_stream(seed, j), mode
        )
        out.append(
            ShotEstimate(mean=mean, n_shots=n_shots, alpha=alpha, seed=seed, node_index=j)
        )
    return out


def noiseless_value(traj: Trajectory, obs: Observable) -> float:
    """Re Tr(rho O) on a trajectory's final (possibly raw) state."""
    return float(np.trace(traj.final_state @ obs.matrix).real)


def curve_to_csv(estimates: list[ShotEstimate], grid: StepGrid, path) -> None:
    """Write (node_index, tau, step_count, n_shots, mean, seed) rows."""
    if not grid.quantized or len(estimates) != grid.n_nodes:
        raise ValueError("estimates must match a quantized grid")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node_index", "tau", "step_count", "n_shots", "mean", "seed"])
        for est, tau, k in zip(estimates, grid.nodes, grid.step_counts):
            writer.writerow(
                [est.node_index, repr(tau), k, est.n_shots, repr(est.mean), est.seed]
            )
