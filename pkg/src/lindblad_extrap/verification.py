"""Numerical verification suites behind the ``verify`` CLI command.

Each check returns a record with the measured margin (how much headroom the
inequality has); a failed inequality is a reported result, not a crash.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grids import chebyshev_grid, quantize_grid
from .integrators import IntegratorKind, dilated_step, evolve
from .model import LindbladModel, Observable, generator_bound, trace_norm
from .sampling import rng_stream
from .theory import (
    SequenceVariant,
    build_sequence,
    default_constants,
    dilation_expansion,
    gevrey_constants,
    m2_bound,
    verify_bound,
)
from .zoo import TfimParams, build_tfim, random_density_matrix, random_model

DEFAULT_L_VALUES = (1.5, 2.0, 4.0, 8.0)


@dataclass
class CheckResult:
    name: str
    passed: bool
    margin: float
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "margin": self.margin,
            "details": self.details,
        }


def check_sequences(
    l_values=DEFAULT_L_VALUES, i_max: int = 12, k_max: int = 12
) -> list[CheckResult]:
    """Entrywise domination c_{i,j,k} <= C1^(i+k) C2^k / j! for both variants.

    Kraus second-order bounds B range over the values a model with
    generator bound l can realize, [l^2/16, l^2/4]; the dilation sweeps a
    few ancilla counts.
    """
    out = []
    for l in l_values:
        for b in (l**2 / 16, 9 * l**2 / 64, l**2 / 4):
            seq = build_sequence(SequenceVariant.KRAUS, l, b, i_max, k_max)
            rep = verify_bound(seq, *default_constants(seq))
            out.append(
                CheckResult(
                    name=f"kraus l={l} B={b:.4g}",
                    passed=rep.passed,
                    margin=1.0 - rep.max_ratio,
                    details=rep.to_json(),
                )
            )
        for n_anc in (2, 3, 5):
            seq = build_sequence(SequenceVariant.DILATED, l, float(n_anc), i_max, k_max)
            rep = verify_bound(seq, *default_constants(seq))
            out.append(
                CheckResult(
                    name=f"dilated l={l} J+1={n_anc}",
                    passed=rep.passed,
                    margin=1.0 - rep.max_ratio,
                    details=rep.to_json(),
                )
            )
    return out


def observable_curve_value(
    model: LindbladModel,
    rho0,
    obs: Observable,
    total_time: float,
    n_steps: int,
    kind: IntegratorKind = IntegratorKind.KRAUS_FIRST_ORDER,
) -> float:
    traj = evolve(model, rho0, total_time, n_steps, kind)
    return float(np.trace(traj.final_state @ obs.matrix).real)


def finite_difference_derivatives(
    model: LindbladModel,
    rho0,
    obs: Observable,
    total_time: float,
    center: float,
    half_width: float,
    n_points: int = 8,
    kind: IntegratorKind = IntegratorKind.KRAUS_FIRST_ORDER,
) -> dict[int, float]:
    """|f^(k)(center)| for k = 1..3 from a local polynomial fit.

    The curve f(tau) is sampled only at step sizes total_time/m with
    integer m (the integrator is defined nowhere else), so the stencil
    snaps each target to the nearest integer divisor.
    """
    targets = np.linspace(center - half_width, center + half_width, n_points)
    ms = sorted({int(round(total_time / t)) for t in targets if t > 0})
    taus = np.array([total_time / m for m in ms])
    if len(taus) < 5:
        raise ValueError("stencil collapsed; widen the window")
    vals = np.array(
        [observable_curve_value(model, rho0, obs, total_time, m, kind) for m in ms]
    )
    # Fit in the shifted/scaled variable u = (tau - center)/half_width.
    u = (taus - center) / half_width
    deg = min(len(taus) - 1, 6)
    coeffs = np.polynomial.polynomial.polyfit(u, vals, deg)
    return {
        k: abs(float(coeffs[k])) * math.factorial(k) / half_width**k
        for k in (1, 2, 3)
    }


def check_gevrey(seed: int = 0, dim: int = 4, total_time: float = 1.0) -> list[CheckResult]:
    """Finite-difference derivative magnitudes vs the sigma nu^k k! envelope
    at the midpoint of the certified interval."""
    model, obs = random_model(dim=dim, seed=seed)
    rho0 = random_density_matrix(dim, seed=seed + 1)
    l = generator_bound(model)
    consts = gevrey_constants(l, m2_bound(model), obs.bound_alpha, total_time)
    center = consts.tau_max / 2
    derivs = finite_difference_derivatives(
        model, rho0, obs, total_time, center, half_width=consts.tau_max / 4
    )
    out = []
    for k, measured in derivs.items():
        envelope = consts.sigma * consts.nu**k * math.factorial(k)
        out.append(
            CheckResult(
                name=f"gevrey |f^({k})| at tau_max/2",
                passed=measured <= envelope,
                margin=envelope - measured,
                details={"measured": measured, "envelope": envelope, "tau": center},
            )
        )
    return out


def check_dilation(k_max: int = 6, seed: int = 0) -> list[CheckResult]:
    """Structure and norm bounds of the dilated step's reduced expansion."""
    out = []
    tfim, _ = build_tfim(TfimParams(n_q=2))
    cases = [
        ("tfim n_q=2", tfim, random_density_matrix(tfim.dim, seed=seed)),
        *(
            (f"random 4-dim seed={s}", *_random_case(s))
            for s in range(seed + 1, seed + 4)
        ),
    ]
    for name, model, rho in cases:
        exp = dilation_expansion(model, rho, k_max)  # raises on structure defects
        n_anc = len(model.jumps) + 1
        worst = math.inf
        for k in range(k_max + 1):
            bound = n_anc * exp.lam**k / math.factorial(k)
            worst = min(worst, bound - trace_norm(exp.coefficients[k]))
        out.append(
            CheckResult(
                name=f"dilation coefficient bound [{name}]",
                passed=worst >= 0,
                margin=worst,
                details={"lambda": exp.lam, "k_max": k_max},
            )
        )
        # Truncation tail at a step size with l*tau <= 0.5.
        l = generator_bound(model)
        tau = min(0.5 / l, 0.05)
        step = dilated_step(model, rho, tau).matrix
        worst = math.inf
        for trunc in range(2, min(k_max, 5) + 1):
            approx = sum(tau**k * exp.coefficients[k] for k in range(trunc + 1))
            tail = 2 * n_anc * (l * tau) ** (trunc + 1) / math.factorial(trunc + 1)
            worst = min(worst, tail - trace_norm(step - approx))
        out.append(
            CheckResult(
                name=f"dilation truncation tail [{name}]",
                passed=worst >= 0,
                margin=worst,
                details={"tau": tau, "l": l},
            )
        )
    return out


def _random_case(seed: int):
    model, _ = random_model(dim=4, seed=seed)
    return model, random_density_matrix(4, seed=seed)


def check_nodes(n_trials: int = 1000, seed: int = 0) -> list[CheckResult]:
    """Quantization guarantees over random configurations above the
    distinctness threshold total_time > pi^2 * interval_hi * n^2."""
    rng = rng_stream(seed, 9)
    failures = 0
    worst_gap = math.inf
    for _ in range(n_trials):
        n = int(rng.integers(2, 65))
        hi = float(10.0 ** rng.uniform(-5, -1))
        t_hat = math.pi**2 * hi * n**2 * float(rng.uniform(1.001, 50.0))
        grid = chebyshev_grid(hi, n)
        try:
            q = quantize_grid(grid, t_hat)
        except Exception:
            failures += 1
            continue
        counts = q.step_counts
        ok = (
            not q.threshold_warning
            and all(a > b for a, b in zip(counts, counts[1:]))
            and all(a < b for a, b in zip(q.nodes, q.nodes[1:]))
            and all(t <= x for t, x in zip(q.nodes, grid.nodes))
        )
        if not ok:
            failures += 1
        else:
            worst_gap = min(
                worst_gap, min(a - b for a, b in zip(counts, counts[1:]))
            )
    return [
        CheckResult(
            name=f"quantized nodes ({n_trials} trials)",
            passed=failures == 0,
            margin=float(worst_gap if failures == 0 else -failures),
            details={"failures": failures, "min_count_gap": worst_gap},
        )
    ]


SCOPES = {
    "sequences": check_sequences,
    "gevrey": check_gevrey,
    "dilation": check_dilation,
    "nodes": check_nodes,
}


def run_checks(scope: str = "all", **overrides) -> list[CheckResult]:
    if scope == "all":
        out = []
        for fn in SCOPES.values():
            out.extend(fn())
        return out
    if scope not in SCOPES:
        raise ValueError(f"unknown scope {scope!r} (known: {', '.join(SCOPES)}, all)")
    return SCOPES[scope](**overrides)
