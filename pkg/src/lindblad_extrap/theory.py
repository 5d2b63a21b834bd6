"""Constructive verification of the coefficient machinery.

The backward-error coefficients of both integrators obey polynomial bounds
||Gamma_k^(i)(t)|| <= sum_j c_{i,j,k} t^j whose coefficients come from
variant-specific three-index recursions (built here by dynamic programming),
and the whole table is dominated by C1^(i+k) C2^k / j! for suitable
constants.  This module builds the tables, checks the domination bound
entrywise, derives the Gevrey envelope constants used to size extrapolation
intervals, expands the dilated step's reduced density operator in powers of
the step size, and evaluates the depth/sample formulas as plain numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .grids import UnsupportedRegimeError
from .model import (
    DensityMatrix,
    LindbladModel,
    herm_defect,
    lindblad_apply,
    spectral_norm,
    trace_norm,
)
from .sampling import hoeffding_shots
from .superops import dilated_reduced_coefficients

E = math.e


class SequenceVariant(Enum):
    KRAUS = "kraus"
    DILATED = "dilated"


@dataclass(frozen=True)
class GeneratingSequence:
    """Table c_{i,j,k} for one integrator variant.

    ``aux`` is the variant's second parameter: the second-order coefficient
    bound B for the Kraus form, the ancilla count J+1 for the dilation.
    Entries with j > k do not exist; c_{i,j,0} = delta_{j,0} l^i and
    c_{0,0,k} = 0 for k >= 1.
    """

    variant: SequenceVariant
    l: float
    aux: float
    table: dict[tuple[int, int, int], float]
    i_max: int
    k_max: int

    def value(self, i: int, j: int, k: int) -> float:
        return self.table[(i, j, k)]


@dataclass(frozen=True)
class BoundReport:
    passed: bool
    max_ratio: float
    argmax: tuple[int, int, int]
    c1: float
    c2: float
    entries: int

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "max_ratio": self.max_ratio,
            "argmax": list(self.argmax),
            "c1": self.c1,
            "c2": self.c2,
            "entries": self.entries,
            "log_base": "e",
        }


@dataclass(frozen=True)
class GevreyConstants:
    c1: float
    c2: float
    sigma: float
    nu: float
    tau_max: float

    def to_json(self) -> dict:
        return {
            "c1": self.c1,
            "c2": self.c2,
            "sigma": self.sigma,
            "nu": self.nu,
            "tau_max": self.tau_max,
            "log_base": "e",
        }


@dataclass(frozen=True)
class DilationExpansion:
    """Reduced step-size-series coefficients of one dilated step."""

    coefficients: tuple[np.ndarray, ...]
    lam: float

    def __post_init__(self):
        for c in self.coefficients:
            if herm_defect(c) > 1e-10:
                raise ValueError("dilation coefficients must be Hermitian")


@dataclass(frozen=True)
class ResourceReport:
    n: int
    n_points: int
    tau_max: float
    interval_effective: float
    d_max: float
    gamma_l1: float
    n_shots: int
    t_required: float
    t_given: float
    epsilon: float
    delta: float
    sigma: float

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "n_points": self.n_points,
            "tau_max": self.tau_max,
            "interval_effective": self.interval_effective,
            "d_max": self.d_max,
            "gamma_l1": self.gamma_l1,
            "n_shots": self.n_shots,
            "t_required": self.t_required,
            "t_given": self.t_given,
            "t_satisfied": bool(self.t_given >= self.t_required),
            "epsilon": self.epsilon,
            "delta": self.delta,
            "sigma": self.sigma,
            "log_base": "e",
        }


def _require_l(l: float):
    if l < 1:
        raise UnsupportedRegimeError(
            f"generating sequences assume l >= 1, got l={l}"
        )


def build_sequence(
    variant: SequenceVariant, l: float, aux: float, i_max: int, k_max: int
) -> GeneratingSequence:
    """Populate the table by dynamic programming in increasing k.

    Entries at level k reference larger first indices at lower levels
    (c_{i+p, j, k-p}), so each level is built with first index extended by
    the remaining depth.
    """
    _require_l(l)
    if i_max < 0 or k_max < 0:
        raise ValueError("i_max and k_max must be >= 0")
    if aux <= 0:
        raise ValueError(f"aux must be positive, got {aux}")
    c: dict[tuple[int, int, int], float] = {}

    def i_cap(k: int) -> int:
        return i_max + (k_max - k) + 1

    for i in range(i_cap(0) + 1):
        c[(i, 0, 0)] = l**i
    for k in range(1, k_max + 1):
        # i = 0 row, j = 1..k (c_{0,0,k} = 0 is given).
        c[(0, 0, k)] = 0.0
        for j in range(1, k + 1):
            if variant is SequenceVariant.KRAUS:
                val = (aux / j) * c[(0, j - 1, k - 1)]
                if j == 1:
                    val += l ** (k + 1) / math.factorial(k + 1)
                for p in range(1, k - j + 1):
                    val += c[(p + 1, j - 1, k - p)] / (j * math.factorial(p + 1))
            else:
                val = 0.0
                if j == 1:
                    val += l ** (k + 1) / math.factorial(k + 1)
                for p in range(1, k - j + 1):
                    val += (
                        aux
                        * l ** (p + 1)
                        / (j * math.factorial(p + 1))
                        * c[(0, j - 1, k - p)]
                    )
                    val += c[(p + 1, j - 1, k - p)] / (j * math.factorial(p + 1))
            c[(0, j, k)] = val
        for i in range(1, i_cap(k) + 1):
            for j in range(0, k):
                if variant is SequenceVariant.KRAUS:
                    val = l * c[(i - 1, j, k)] + aux * c[(i - 1, j, k - 1)]
                    if j == 0:
                        val += l ** (i + k) / math.factorial(k + 1)
                    for p in range(1, k - j + 1):
                        val += c[(i + p, j, k - p)] / math.factorial(p + 1)
                else:
                    val = l * c[(i - 1, j, k)]
                    if j == 0:
                        val += l ** (i + k) / math.factorial(k + 1)
                    for p in range(1, k - j + 1):
                        val += (
                            aux
                            * l ** (p + 1)
                            / math.factorial(p + 1)
                            * c[(i - 1, j, k - p)]
                        )
                        val += c[(i + p, j, k - p)] / math.factorial(p + 1)
                c[(i, j, k)] = val
            c[(i, k, k)] = l * c[(i - 1, k, k)]
    table = {
        (i, j, k): v
        for (i, j, k), v in c.items()
        if i <= i_max and k <= k_max
    }
    for key, v in table.items():
        if not math.isfinite(v):
            raise OverflowError(f"table entry {key} overflowed; reduce i_max/k_max")
    return GeneratingSequence(
        variant=variant, l=l, aux=aux, table=table, i_max=i_max, k_max=k_max
    )


def default_constants(seq: GeneratingSequence) -> tuple[float, float]:
    """(C1, C2) for the sequence's variant.

    C1 = max{B, l(e+1), 1} for Kraus (with B = aux) and
    C1 = max{l(J+1), l(e+1), 1} for the dilation (with J+1 = aux);
    C2 = (e+1) max{log C1, C1} satisfies every constraint the bounds cite.
    """
    if seq.variant is SequenceVariant.KRAUS:
        c1 = max(seq.aux, seq.l * (E + 1), 1.0)
    else:
        c1 = max(seq.l * seq.aux, seq.l * (E + 1), 1.0)
    c2 = (E + 1) * max(math.log(c1), c1)
    return c1, c2


def verify_bound(seq: GeneratingSequence, c1: float, c2: float) -> BoundReport:
    """Check c_{i,j,k} <= C1^(i+k) C2^k / j! over the whole table."""
    max_ratio = 0.0
    argmax = (0, 0, 0)
    for (i, j, k), v in seq.table.items():
        bound = c1 ** (i + k) * c2**k / math.factorial(j)
        ratio = v / bound if bound > 0 else math.inf
        if ratio > max_ratio:
            max_ratio = ratio
            argmax = (i, j, k)
    return BoundReport(
        passed=max_ratio <= 1.0 + 1e-12,
        max_ratio=max_ratio,
        argmax=argmax,
        c1=c1,
        c2=c2,
        entries=len(seq.table),
    )


def m2_bound(model: LindbladModel) -> float:
    """(||H|| + 1/2 sum_j ||L_j||^2)^2, dominating the Kraus step's
    second-order coefficient."""
    return float(
        (
            spectral_norm(model.hamiltonian)
            + 0.5 * sum(spectral_norm(l) ** 2 for l in model.jumps)
        )
        ** 2
    )


def check_m2_bound(
    model: LindbladModel, seed: int = 0, taus=(1e-2, 1e-3), n_states: int = 10
) -> float:
    """Empirical max of ||K(tau) rho - rho - tau L rho|| / tau^2 over random
    states; at most ``m2_bound(model)`` up to higher-order terms."""
    from .integrators import kraus_step
    from .zoo import random_density_matrix

    worst = 0.0
    for s in range(n_states):
        rho = random_density_matrix(model.dim, seed=seed + s)
        lrho = lindblad_apply(model, rho.matrix)
        for tau in taus:
            resid = kraus_step(model, rho.matrix, tau) - rho.matrix - tau * lrho
            worst = max(worst, trace_norm(resid) / tau**2)
    return worst


def gevrey_constants(
    l: float, b: float, obs_norm: float, total_time: float
) -> GevreyConstants:
    """Envelope constants: |f^(k)| <= sigma nu^k k! on [0, tau_max].

    sigma = 2e ||O||, nu = 2 C1 C2 scaled by T^2 log T for total times
    beyond 1 (log clamped to >= 1 for T <= e), tau_max = 1/(2 nu).
    """
    if l <= 1:
        raise UnsupportedRegimeError(f"gevrey constants need l > 1, got {l}")
    c1 = max(b, l * (E + 1), 1.0)
    c2 = (E + 1) * max(math.log(c1), c1)
    sigma = 2 * E * obs_norm
    scale = total_time**2 * max(math.log(total_time), 1.0) if total_time > 1 else 1.0
    nu = 2 * c1 * c2 * scale
    return GevreyConstants(c1=c1, c2=c2, sigma=sigma, nu=nu, tau_max=1.0 / (2 * nu))


def dilation_lambda(model: LindbladModel) -> float:
    """Lambda = 2 Lambda_0 + 2 Lambda_1^2 with Lambda_0 = 2||H_S|| and
    Lambda_1 = max_j ||L_j||."""
    lam0 = 2.0 * spectral_norm(model.hamiltonian)
    lam1 = max((spectral_norm(l) for l in model.jumps), default=0.0)
    return 2.0 * lam0 + 2.0 * lam1**2


def dilation_expansion(
    model: LindbladModel, rho: DensityMatrix, k_max: int
) -> DilationExpansion:
    """Reduced coefficients rho_R^(2k), k = 0..k_max, of one dilated step.

    Asserts the structure the construction guarantees: the zeroth
    coefficient is the input state, the first is the Lindblad generator
    applied to it, and every odd-order partial trace vanishes.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    coeffs, odd = dilated_reduced_coefficients(model, rho.matrix, k_max)
    if float(np.max(np.abs(coeffs[0] - rho.matrix))) != 0.0:
        raise AssertionError("zeroth reduced coefficient must equal the input state")
    defect = trace_norm(coeffs[1] - lindblad_apply(model, rho.matrix))
    if defect > 1e-10:
        raise AssertionError(
            f"first reduced coefficient deviates from L rho by {defect:.3e}"
        )
    worst_odd = max(odd) if odd else 0.0
    if worst_odd > 1e-12:
        raise AssertionError(f"odd-order partial trace of size {worst_odd:.3e}")
    return DilationExpansion(
        coefficients=tuple(coeffs), lam=dilation_lambda(model)
    )


def resource_estimates(
    l: float,
    total_time: float,
    epsilon: float,
    delta: float,
    obs_norm: float,
) -> ResourceReport:
    """Evaluate the depth/sample formulas as numbers (natural logs).

    n from the Chebyshev bias bound n >= log(sigma/eps)/(3 log 2) - 2/3,
    d_max = (T^2/tau_max) n^2, shots from the Hoeffding bound at the
    measured weight 1-norm of an (n+1)-point Chebyshev grid, and the two
    sides of the total-time requirement
    T >= log(1/eps) sqrt(log log(1/eps)) / (l sqrt(log l)).
    """
    if min(l, total_time, epsilon, delta, obs_norm) <= 0 or epsilon >= 1:
        raise ValueError("inputs must be positive with epsilon < 1")
    if l <= 1:
        raise UnsupportedRegimeError(f"resource formulas need l > 1, got {l}")
    from .extrapolation import richardson_weights
    from .grids import chebyshev_grid, recommended_interval

    sigma = 2 * E * obs_norm
    n = max(1, math.ceil(math.log(sigma / epsilon) / (3 * math.log(2)) - 2.0 / 3.0))
    tau_max = 1.0 / max(total_time**2 * l**2 * math.log(l), 1.0)
    interval = recommended_interval(l, total_time)
    d_max = (total_time**2 / tau_max) * n**2
    # Interpolation weights depend only on node ratios, so any interval
    # yields the same 1-norm.
    gamma_l1 = richardson_weights(chebyshev_grid(1.0, n)).gamma_l1
    n_shots = hoeffding_shots(obs_norm, gamma_l1, epsilon, delta)
    log_inv = math.log(1.0 / epsilon)
    t_required = (
        log_inv
        * math.sqrt(max(math.log(log_inv), 0.0))
        / (l * math.sqrt(math.log(l)))
    )
    return ResourceReport(
        n=n,
        n_points=n + 1,
        tau_max=tau_max,
        interval_effective=interval,
        d_max=d_max,
        gamma_l1=gamma_l1,
        n_shots=n_shots,
        t_required=t_required,
        t_given=float(total_time),
        epsilon=epsilon,
        delta=delta,
        sigma=sigma,
    )
