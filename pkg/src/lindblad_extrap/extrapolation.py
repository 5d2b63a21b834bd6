"""Zero-step-size extrapolation of observable curves.

Two weight constructions over a step grid:

* interpolation (Richardson): the Lagrange basis evaluated at zero, via
  the product formula gamma_j = prod_{k != j} tau_k / (tau_k - tau_j);
* regression: the unique linear functional sending node values to the
  least-squares polynomial fit of a given degree evaluated at zero.

Both reproduce constants (sum gamma_j = 1).  The 1-norm of the weights is
the Lebesgue constant at zero: the amplification factor for independent
per-node statistical noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import DUPLICATE_REL_TOL, StepGrid

INTERPOLATION = "interpolation"
REGRESSION = "regression"

# Relative spread of singular values beyond which a regression basis is
# reported as numerically rank deficient.
CONDITION_LIMIT = 1e13


class ConditioningError(ValueError):
    """Least-squares basis is too ill-conditioned to trust the weights."""


@dataclass(frozen=True)
class ExtrapolationWeights:
    """Linear functional gamma over grid nodes estimating the value at 0."""

    gammas: tuple[float, ...]
    grid: StepGrid
    method: str
    degree: int | None = None
    gamma_l1: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if len(self.gammas) != self.grid.n_nodes:
            raise ValueError("one weight per grid node required")
        total = sum(self.gammas)
        if abs(total - 1.0) > 1e-10 * max(1.0, sum(abs(g) for g in self.gammas)):
            raise ValueError(f"weights must sum to 1, got {total}")
        l1 = float(sum(abs(g) for g in self.gammas))
        object.__setattr__(self, "gamma_l1", l1)


@dataclass(frozen=True)
class ExtrapolationResult:
    value_at_zero: float
    weights: ExtrapolationWeights
    residual: float | None = None

    def to_json(self) -> dict:
        return {
            "value_at_zero": self.value_at_zero,
            "gammas": list(self.weights.gammas),
            "gamma_l1": self.weights.gamma_l1,
            "method": self.weights.method
            if self.weights.degree is None
            else f"{self.weights.method}(degree={self.weights.degree})",
            "residual": self.residual,
        }


def _check_distinct(nodes: tuple[float, ...]):
    scale = max(abs(t) for t in nodes)
    arr = sorted(nodes)
    for a, b in zip(arr, arr[1:]):
        if abs(b - a) <= DUPLICATE_REL_TOL * scale:
            raise ValueError(f"duplicate nodes {a} and {b}")


def richardson_weights(grid: StepGrid) -> ExtrapolationWeights:
    """Lagrange basis of the grid nodes evaluated at zero (product form).

    Exact on polynomials of degree <= n_nodes - 1.
    """
    nodes = grid.nodes
    _check_distinct(nodes)
    gammas = []
    for j, tj in enumerate(nodes):
        g = 1.0
        for k, tk in enumerate(nodes):
            if k != j:
                g *= tk / (tk - tj)
        gammas.append(g)
    return ExtrapolationWeights(gammas=tuple(gammas), grid=grid, method=INTERPOLATION)


def _scaled_vandermonde(nodes: tuple[float, ...], degree: int) -> tuple[np.ndarray, float]:
    # Work in u = tau/scale; column scaling leaves the least-squares
    # projection (hence the weights) unchanged but keeps powers tame.
    scale = max(nodes)
    u = np.asarray(nodes, dtype=np.float64) / scale
    v = np.vander(u, degree + 1, increasing=True)
    return v, scale


def regression_weights(grid: StepGrid, degree: int) -> ExtrapolationWeights:
    """Weights of the degree-m least-squares fit evaluated at zero.

    Requires degree < n_nodes - 1 (a full-degree fit is interpolation and
    must use ``richardson_weights``).  Exact on polynomials of degree <= m.
    """
    nodes = grid.nodes
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    if degree >= grid.n_nodes - 1:
        raise ValueError(
            f"degree {degree} needs fewer than n_nodes-1 = {grid.n_nodes - 1}; "
            "use richardson_weights for full-degree interpolation"
        )
    _check_distinct(nodes)
    v, _ = _scaled_vandermonde(nodes, degree)
    sv = np.linalg.svd(v, compute_uv=False)
    if sv[0] / sv[-1] > CONDITION_LIMIT:
        raise ConditioningError(
            f"regression basis condition number {sv[0] / sv[-1]:.3e} exceeds "
            f"{CONDITION_LIMIT:.0e}"
        )
    # Fitted value at u=0 is the constant coefficient:
    # gamma^T = e_0^T pinv(V).
    gammas = np.linalg.pinv(v)[0, :]
    return ExtrapolationWeights(
        gammas=tuple(float(g) for g in gammas),
        grid=grid,
        method=REGRESSION,
        degree=degree,
    )


def extrapolate(weights: ExtrapolationWeights, values) -> ExtrapolationResult:
    """Combine node values into the extrapolated value at step size zero."""
    vals = np.asarray(values, dtype=np.float64)
    if vals.shape != (len(weights.gammas),):
        raise ValueError(f"expected {len(weights.gammas)} values, got shape {vals.shape}")
    value = float(np.dot(weights.gammas, vals))
    residual = None
    if weights.method == REGRESSION:
        v, _ = _scaled_vandermonde(weights.grid.nodes, weights.degree)
        coeffs, *_ = np.linalg.lstsq(v, vals, rcond=None)
        residual = float(np.sqrt(np.mean((v @ coeffs - vals) ** 2)))
    return ExtrapolationResult(value_at_zero=value, weights=weights, residual=residual)


def regression_fit_coefficients(weights: ExtrapolationWeights, values) -> tuple[np.ndarray, float]:
    """Least-squares polynomial coefficients in the scaled variable u = tau/scale.

    Returns (coefficients low-to-high degree, scale).  Only meaningful for
    regression weights; for interpolation the polynomial passes through
    every point and is better evaluated in barycentric form.
    """
    if weights.method != REGRESSION:
        raise ValueError("fit coefficients are defined for regression weights only")
    vals = np.asarray(values, dtype=np.float64)
    v, scale = _scaled_vandermonde(weights.grid.nodes, weights.degree)
    coeffs, *_ = np.linalg.lstsq(v, vals, rcond=None)
    return coeffs, scale


def fitted_curve(weights: ExtrapolationWeights, values, taus) -> np.ndarray:
    """Evaluate the extrapolating polynomial at arbitrary step sizes.

    Interpolation uses the barycentric second form on the grid nodes;
    regression evaluates the least-squares fit.  The curve agrees with
    ``extrapolate`` at tau = 0.
    """
    vals = np.asarray(values, dtype=np.float64)
    taus = np.asarray(taus, dtype=np.float64)
    nodes = np.asarray(weights.grid.nodes, dtype=np.float64)
    if weights.method == REGRESSION:
        coeffs, scale = regression_fit_coefficients(weights, vals)
        return np.polynomial.polynomial.polyval(taus / scale, coeffs)
    # Barycentric weights w_j = 1 / prod_{k != j}(tau_j - tau_k).
    scale = nodes.max()
    u = nodes / scale
    w = np.array([1.0 / np.prod(u[j] - np.delete(u, j)) for j in range(len(u))])
    out = np.empty_like(taus)
    for i, t in enumerate(taus / scale):
        diff = t - u
        exact = np.nonzero(np.abs(diff) < 1e-300)[0]
        if exact.size:
            out[i] = vals[exact[0]]
        else:
            terms = w / diff
            out[i] = np.dot(terms, vals) / np.sum(terms)
    return out


def lebesgue_at_zero(grid: StepGrid, method: str = INTERPOLATION, degree: int | None = None) -> float:
    """Sum of |gamma_j| for the chosen weight construction."""
    if method == INTERPOLATION:
        return richardson_weights(grid).gamma_l1
    if method == REGRESSION:
        if degree is None:
            raise ValueError("regression requires a degree")
        return regression_weights(grid, degree).gamma_l1
    raise ValueError(f"unknown method {method!r}")
