"""First-order discrete solution operators for Lindblad dynamics.

Two one-step maps approximating exp(tau L):

* Kraus form: rho -> F_0 rho F_0^dag + sum_j F_j rho F_j^dag with
  F_0 = I + (-iH - 1/2 sum_j L_j^dag L_j) tau and F_j = L_j sqrt(tau).
  Completely positive; trace preserved only to O(tau^2).
* Dilated Hamiltonian: embed the system with a (J+1)-level ancilla, apply
  the unitary exp(-i(eps^2 H_0 + eps H_1)) with eps = sqrt(tau), and trace
  out the ancilla.  Exactly trace preserving and completely positive.

Multi-step evolution applies the chosen step n times with tau = T/n and
records the worst trace drift along the way.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass

import numpy as np

from .model import (
    DensityMatrix,
    DimensionMismatchError,
    LindbladModel,
    Observable,
    as_complex_matrix,
)


class IntegratorKind(enum.Enum):
    KRAUS_FIRST_ORDER = "kraus"
    DILATED_HAMILTONIAN = "dilated"


@dataclass(frozen=True)
class Trajectory:
    """Snapshots of a fixed-step evolution.

    ``states`` holds raw matrices (the Kraus step drifts off unit trace by
    design; the drift is recorded, not silently repaired).  When an
    observable is attached, ``observable_values`` carries Re Tr(rho O) per
    snapshot.
    """

    states: tuple[np.ndarray, ...]
    step_indices: tuple[int, ...]
    tau: float
    n_steps: int
    total_time: float
    trace_drift: float
    kind: IntegratorKind
    observable_values: tuple[float, ...] | None = None

    def __post_init__(self):
        if abs(self.n_steps * self.tau - self.total_time) > 1e-12 * self.total_time:
            raise ValueError("n_steps * tau must equal total_time")

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def final_density_matrix(self) -> DensityMatrix:
        return DensityMatrix(self.final_state)


def _kraus_ops(model: LindbladModel, tau: float):
    a = -1j * model.hamiltonian.copy()
    for l in model.jumps:
        a -= 0.5 * (l.conj().T @ l)
    f0 = np.eye(model.dim, dtype=np.complex128) + tau * a
    fs = [np.sqrt(tau) * l for l in model.jumps]
    return f0, fs


def kraus_step(model: LindbladModel, rho, tau: float) -> np.ndarray:
    """One Kraus-form step.  PSD-preserving; trace drifts by O(tau^2)."""
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    rho = as_complex_matrix(rho)
    if rho.shape[0] != model.dim:
        raise DimensionMismatchError(f"state dim {rho.shape[0]} != model dim {model.dim}")
    f0, fs = _kraus_ops(model, tau)
    out = f0 @ rho @ f0.conj().T
    for f in fs:
        out += f @ rho @ f.conj().T
    return out


def dilated_hamiltonian(model: LindbladModel, tau: float) -> np.ndarray:
    """Hermitian generator on the ancilla-extended space at step size tau.

    eps^2 |0><0| x H_S + eps sum_j (|j><0| x L_j + |0><j| x L_j^dag) with
    eps = sqrt(tau); the ancilla has dimension J+1 and is the first tensor
    factor.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    eps = np.sqrt(tau)
    h0, h1 = dilation_generators(model)
    return eps**2 * h0 + eps * h1


def dilation_generators(model: LindbladModel) -> tuple[np.ndarray, np.ndarray]:
    """Step-size-independent blocks (H_0, H_1) of the dilated Hamiltonian."""
    d = model.dim
    n_anc = len(model.jumps) + 1
    h0 = np.zeros((n_anc * d, n_anc * d), dtype=np.complex128)
    h0[:d, :d] = model.hamiltonian
    h1 = np.zeros_like(h0)
    for j, l in enumerate(model.jumps, start=1):
        h1[j * d : (j + 1) * d, :d] = l
        h1[:d, j * d : (j + 1) * d] = l.conj().T
    return h0, h1


def embed_with_ancilla(rho: np.ndarray, n_ancilla: int) -> np.ndarray:
    """|0><0| x rho on the ancilla-extended space."""
    d = rho.shape[0]
    out = np.zeros((n_ancilla * d, n_ancilla * d), dtype=np.complex128)
    out[:d, :d] = rho
    return out


def partial_trace_ancilla(m, d_ancilla: int, d_system: int) -> np.ndarray:
    """Trace out the leading d_ancilla-dimensional tensor factor."""
    m = as_complex_matrix(m)
    if m.shape[0] != d_ancilla * d_system:
        raise DimensionMismatchError(
            f"matrix dim {m.shape[0]} != {d_ancilla} * {d_system}"
        )
    return np.einsum("asat->st", m.reshape(d_ancilla, d_system, d_ancilla, d_system))


def _dilated_unitary(model: LindbladModel, tau: float) -> np.ndarray:
    # Exact unitary via Hermitian eigendecomposition: U = V e^{-i lam} V^dag.
    h = dilated_hamiltonian(model, tau)
    lam, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * lam)) @ v.conj().T


def _dilated_block_kraus(model: LindbladModel, tau: float) -> list[np.ndarray]:
    # With the ancilla prepared in |0>, tracing it out after the unitary is
    # the channel sum_a K_a rho K_a^dag with K_a = <a| U |0>, the d x d
    # blocks of the unitary's first block column.
    u = _dilated_unitary(model, tau)
    d = model.dim
    n_anc = len(model.jumps) + 1
    return [np.ascontiguousarray(u[a * d : (a + 1) * d, :d]) for a in range(n_anc)]


def dilated_step(model: LindbladModel, rho: DensityMatrix, tau: float) -> DensityMatrix:
    """One dilated-Hamiltonian step: unitary conjugation of the ancilla-
    extended state followed by the partial trace over the ancilla."""
    if rho.dim != model.dim:
        raise DimensionMismatchError(f"state dim {rho.dim} != model dim {model.dim}")
    ks = _dilated_block_kraus(model, tau)
    out = np.zeros_like(rho.matrix)
    for k in ks:
        out += k @ rho.matrix @ k.conj().T
    out = (out + out.conj().T) / 2
    return DensityMatrix(out)


def evolve(
    model: LindbladModel,
    rho0: DensityMatrix,
    total_time: float,
    n_steps: int,
    kind: IntegratorKind,
    *,
    snapshot_stride: int | None = None,
    renormalize: bool = False,
    observable: Observable | None = None,
) -> Trajectory:
    """Apply the chosen one-step map n_steps times with tau = T/n_steps.

    Only requested snapshots are stored (final state by default; a stride
    of s keeps steps 0, s, 2s, ... and the final step).  ``renormalize``
    divides each Kraus step output by its trace; it is a physical
    post-processing option and must stay off wherever the raw map's
    step-size expansion is being measured.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if total_time <= 0:
        raise ValueError(f"total_time must be positive, got {total_time}")
    if rho0.dim != model.dim:
        raise DimensionMismatchError(f"state dim {rho0.dim} != model dim {model.dim}")
    tau = total_time / n_steps

    if kind == IntegratorKind.KRAUS_FIRST_ORDER:
        f0, fs = _kraus_ops(model, tau)
        f0h = f0.conj().T
        fsh = [f.conj().T for f in fs]

        def step(r):
            out = f0 @ r @ f0h
            for f, fh in zip(fs, fsh):
                out += f @ r @ fh
            if renormalize:
                out = out / np.trace(out).real
            return out

    elif kind == IntegratorKind.DILATED_HAMILTONIAN:
        ks = _dilated_block_kraus(model, tau)
        ksh = [k.conj().T for k in ks]

        def step(r):
            out = ks[0] @ r @ ksh[0]
            for k, kh in zip(ks[1:], ksh[1:]):
                out += k @ r @ kh
            return out

    else:
        raise ValueError(f"unknown integrator kind {kind}")

    keep = {0, n_steps}
    if snapshot_stride is not None:
        if snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")
        keep.update(range(0, n_steps + 1, snapshot_stride))

    rho = rho0.matrix.copy()
    states = []
    indices = []
    drift = abs(np.trace(rho).real - 1.0)
    if 0 in keep:
        states.append(rho.copy())
        indices.append(0)
    for i in range(1, n_steps + 1):
        rho = step(rho)
        drift = max(drift, abs(np.trace(rho).real - 1.0))
        if i in keep:
            states.append(rho.copy())
            indices.append(i)

    obs_values = None
    if observable is not None:
        if observable.dim != model.dim:
            raise DimensionMismatchError("observable dim != model dim")
        obs_values = tuple(
            float(np.trace(s @ observable.matrix).real) for s in states
        )
    return Trajectory(
        states=tuple(states),
        step_indices=tuple(indices),
        tau=tau,
        n_steps=n_steps,
        total_time=float(total_time),
        trace_drift=float(drift),
        kind=kind,
        observable_values=obs_values,
    )


def trajectory_to_csv(traj: Trajectory, path) -> None:
    """Write snapshots as (step_index, time, trace[, observable_value])."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["step_index", "time", "trace"]
        if traj.observable_values is not None:
            header.append("observable_value")
        writer.writerow(header)
        for i, idx in enumerate(traj.step_indices):
            row = [
                idx,
                repr(idx * traj.tau),
                repr(float(np.trace(traj.states[i]).real)),
            ]
            if traj.observable_values is not None:
                row.append(repr(traj.observable_values[i]))
            writer.writerow(row)
