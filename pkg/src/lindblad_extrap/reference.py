"""High-accuracy oracles: the exact propagator and backward-error coefficients.

The exact propagator e^{tL} is computed by exponentiating the vectorized
generator for small dimensions and by an adaptive embedded Runge-Kutta
integrator above that.  The backward-error coefficients Gamma_1, Gamma_2 of
an integrator's step-size expansion

    rho_tau(t) = rho(t) + tau Gamma_1(t) + tau^2 Gamma_2(t) + ...

solve linear ODEs driven by the integrator's own series coefficients M_i;
for the two first-order methods here the system closes over (rho, Gamma_1,
Gamma_2):

    rho'     = L rho
    Gamma_1' = L Gamma_1 + (M_2 - L^2/2) rho
    Gamma_2' = L Gamma_2 + (M_2 - L^2/2) Gamma_1
               + (M_3 + L^3/3 - 1/2 (L M_2 + M_2 L)) rho

with Gamma_k(0) = 0 (the Gamma_1 drive is checked against the scalar
closed form of K(tau)^(t/tau) and against the Richardson limit of the
integrator's error).  Coefficients beyond k = 2 would pull in higher
derivative substitutions and are out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .integrators import IntegratorKind
from .model import TOL_HERM, DensityMatrix, LindbladModel, herm_defect
from .superops import (
    dilated_m_matrices,
    kraus_m2_matrix,
    lindblad_matrix,
    unvec,
    vec,
)

# Dimension up to which the vectorized generator is exponentiated directly.
EXPM_MAX_DIM = 16
# Claimed accuracy of the matrix-exponential path (validated against closed
# forms and the semigroup property in the test suite).
EXPM_EST_ERROR = 1e-12


class SolverToleranceError(RuntimeError):
    """The requested tolerance could not be certified."""


@dataclass(frozen=True)
class ReferenceSolution:
    state: DensityMatrix
    time: float
    est_error: float


@dataclass(frozen=True)
class GammaSolution:
    k: int
    value_at_T: np.ndarray
    time: float

    def __post_init__(self):
        if self.k not in (1, 2):
            raise ValueError(f"k must be 1 or 2, got {self.k}")
        defect = herm_defect(self.value_at_T)
        if defect > TOL_HERM:
            raise ValueError(f"Gamma_{self.k} not Hermitian (defect {defect:.3e})")


def _integrate_linear(gen: np.ndarray, y0: np.ndarray, t: float, tol: float) -> np.ndarray:
    dim_state = int(np.sqrt(gen.shape[0]))
    local = tol * 1e-2 / max(np.sqrt(dim_state), 1.0)
    sol = solve_ivp(
        lambda _, y: gen @ y,
        (0.0, t),
        y0,
        method="DOP853",
        rtol=max(local, 1e-13),
        atol=max(local, 1e-14),
    )
    if not sol.success:
        raise SolverToleranceError(f"step controller failed: {sol.message}")
    return sol.y[:, -1]


def exact_evolve(
    model: LindbladModel,
    rho0: DensityMatrix,
    t: float,
    tol: float = 1e-10,
    method: str = "auto",
) -> ReferenceSolution:
    """Propagate rho0 to e^{tL} rho0 within trace-norm tolerance tol.

    ``method`` is "expm" (scaling-and-squaring on the vectorized generator),
    "rk" (adaptive DOP853), or "auto" (expm for dim <= 16).  Outputs are
    validated as density matrices and never projected: a PSD or trace
    violation beyond tolerance is an error, not something to repair.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if t == 0:
        return ReferenceSolution(state=rho0, time=0.0, est_error=0.0)
    if method == "auto":
        method = "expm" if model.dim <= EXPM_MAX_DIM else "rk"
    gen = lindblad_matrix(model)
    if method == "expm":
        if tol < EXPM_EST_ERROR:
            raise SolverToleranceError(
                f"tolerance {tol} below the certified accuracy {EXPM_EST_ERROR}"
            )
        out = unvec(expm(t * gen) @ vec(rho0.matrix), model.dim)
        est = EXPM_EST_ERROR
    elif method == "rk":
        out = unvec(_integrate_linear(gen, vec(rho0.matrix), t, tol), model.dim)
        est = tol
    else:
        raise ValueError(f"unknown method {method!r}")
    return ReferenceSolution(state=DensityMatrix(out), time=float(t), est_error=est)


def _gamma_block_generator(model: LindbladModel, kind: IntegratorKind, k: int) -> np.ndarray:
    lmat = lindblad_matrix(model)
    if kind == IntegratorKind.KRAUS_FIRST_ORDER:
        m2 = kraus_m2_matrix(model)
        m3 = np.zeros_like(lmat)
    elif kind == IntegratorKind.DILATED_HAMILTONIAN:
        mats = dilated_m_matrices(model, 3 if k == 2 else 2)
        m2 = mats[2]
        m3 = mats[3] if k == 2 else np.zeros_like(lmat)
    else:
        raise ValueError(f"unknown integrator kind {kind}")
    n = model.dim**2
    g = np.zeros(((k + 1) * n, (k + 1) * n), dtype=np.complex128)
    l2 = lmat @ lmat
    g[0:n, 0:n] = lmat
    g[n : 2 * n, 0:n] = m2 - 0.5 * l2
    g[n : 2 * n, n : 2 * n] = lmat
    if k == 2:
        w = m3 + (l2 @ lmat) / 3.0 - 0.5 * (lmat @ m2 + m2 @ lmat)
        g[2 * n : 3 * n, 0:n] = w
        g[2 * n : 3 * n, n : 2 * n] = m2 - 0.5 * l2
        g[2 * n : 3 * n, 2 * n : 3 * n] = lmat
    return g


def gamma_ode_solve(
    model: LindbladModel,
    kind: IntegratorKind,
    k: int,
    total_time: float,
    tol: float = 1e-10,
    rho0: DensityMatrix | None = None,
) -> GammaSolution:
    """Solve the coupled linear system for Gamma_k(T) along the trajectory
    started at rho0 (maximally mixed state if omitted).

    Supports k in {1, 2}; the closure over (rho, Gamma_1, Gamma_2) does not
    extend further.
    """
    if k not in (1, 2):
        raise ValueError(f"Gamma_k supported for k in {{1, 2}} only, got k={k}")
    if total_time <= 0:
        raise ValueError(f"total_time must be positive, got {total_time}")
    if rho0 is None:
        rho0 = DensityMatrix.maximally_mixed(model.dim)
    gen = _gamma_block_generator(model, kind, k)
    n = model.dim**2
    y0 = np.zeros((k + 1) * n, dtype=np.complex128)
    y0[:n] = vec(rho0.matrix)
    if gen.shape[0] <= (EXPM_MAX_DIM**2) * 3:
        if tol < EXPM_EST_ERROR:
            raise SolverToleranceError(
                f"tolerance {tol} below the certified accuracy {EXPM_EST_ERROR}"
            )
        y = expm(total_time * gen) @ y0
    else:
        y = _integrate_linear(gen, y0, total_time, tol)
    value = unvec(y[k * n : (k + 1) * n], model.dim)
    return GammaSolution(k=k, value_at_T=value, time=float(total_time))
