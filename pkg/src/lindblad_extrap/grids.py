"""Step-size grids: equidistant, Chebyshev, and integer-quantized nodes.

A grid is pure geometry on an interval (0, interval_hi].  Quantization
perturbs each node tau_j to total_time / ceil(total_time / tau_j) so that
every node divides the total evolution time into an integer number of
steps; the step counts are kept alongside the nodes.  The theory constants
(generator bound, total time) enter only through ``recommended_interval``,
which computes the right endpoint; grid builders never see them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

DUPLICATE_REL_TOL = 1e-14


class QuantizationCollisionError(ValueError):
    """Two quantized nodes landed on the same integer step count."""


class UnsupportedRegimeError(ValueError):
    """Inputs outside the regime the formulas cover (e.g. l <= 1)."""


@dataclass(frozen=True)
class StepGrid:
    """Strictly increasing step sizes, optionally with integer step counts.

    ``step_counts`` is present iff the grid is quantized, in which case
    node j equals total_time / step_counts[j] exactly.
    ``threshold_warning`` is set when quantization succeeded even though
    the distinctness guarantee total_time > pi^2 * interval_hi * n^2 did
    not hold.
    """

    nodes: tuple[float, ...]
    interval_hi: float
    step_counts: tuple[int, ...] | None = None
    total_time: float | None = None
    threshold_warning: bool = False

    def __post_init__(self):
        if len(self.nodes) < 1:
            raise ValueError("grid needs at least one node")
        prev = 0.0
        for t in self.nodes:
            if not t > prev:
                raise ValueError(f"nodes must be strictly increasing and positive: {self.nodes}")
            prev = t
        if self.nodes[-1] > self.interval_hi * (1 + 1e-12):
            raise ValueError(f"node {self.nodes[-1]} exceeds interval_hi {self.interval_hi}")
        if (self.step_counts is None) != (self.total_time is None):
            raise ValueError("step_counts and total_time must be given together")
        if self.step_counts is not None and len(self.step_counts) != len(self.nodes):
            raise ValueError("step_counts length must match nodes")

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def quantized(self) -> bool:
        return self.step_counts is not None

    def to_json(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "step_counts": list(self.step_counts) if self.step_counts else None,
            "interval_hi": self.interval_hi,
            "total_time": self.total_time,
        }

    @classmethod
    def from_json(cls, data: dict) -> "StepGrid":
        return cls(
            nodes=tuple(data["nodes"]),
            interval_hi=data["interval_hi"],
            step_counts=tuple(data["step_counts"]) if data.get("step_counts") else None,
            total_time=data.get("total_time"),
        )


def equidistant_grid(interval_hi: float, n: int) -> StepGrid:
    """n+1 equally spaced nodes j*h, h = interval_hi/(n+1), j = 1..n+1."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if interval_hi <= 0:
        raise ValueError(f"interval_hi must be positive, got {interval_hi}")
    h = interval_hi / (n + 1)
    return StepGrid(nodes=tuple(j * h for j in range(1, n + 2)), interval_hi=interval_hi)


def chebyshev_grid(interval_hi: float, n: int) -> StepGrid:
    """n+1 first-kind Chebyshev nodes mapped to (0, interval_hi).

    Node k is (interval_hi/2) * (1 - cos theta_k) with
    theta_k = (2k-1) pi / (2(n+1)), k = 1..n+1; all nodes are strictly
    interior and symmetric about interval_hi/2.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if interval_hi <= 0:
        raise ValueError(f"interval_hi must be positive, got {interval_hi}")
    nodes = tuple(
        (interval_hi / 2.0) * (1.0 - math.cos((2 * k - 1) * math.pi / (2 * (n + 1))))
        for k in range(1, n + 2)
    )
    return StepGrid(nodes=nodes, interval_hi=interval_hi)


def _steps_for(total_time: float, node: float) -> int:
    # Snap near-integer ratios before the ceiling so that re-quantizing an
    # already-quantized grid is the identity; the final bump keeps the
    # quantized node at or below the input node even when representation
    # noise pushed the ratio just past an integer.
    r = total_time / node
    nearest = round(r)
    if nearest >= 1 and abs(r - nearest) <= 1e-9 * max(1.0, abs(r)):
        k = int(nearest)
    else:
        k = int(math.ceil(r))
    if total_time / k > node:
        k += 1
    return k


def quantize_grid(grid: StepGrid, total_time: float) -> StepGrid:
    """Perturb nodes so each divides total_time into an integer step count.

    k_j = ceil(total_time / tau_j), new node = total_time / k_j.  Under the
    threshold total_time > pi^2 * interval_hi * n^2 the step counts are
    guaranteed pairwise distinct and decreasing; below the threshold a
    collision raises and an accidental success carries a warning flag.
    """
    if total_time <= 0:
        raise ValueError(f"total_time must be positive, got {total_time}")
    n = grid.n_nodes - 1
    threshold_ok = total_time > math.pi**2 * grid.interval_hi * n**2
    counts = [_steps_for(total_time, t) for t in grid.nodes]
    for a, b in zip(counts, counts[1:]):
        if a <= b:
            raise QuantizationCollisionError(
                f"step counts not strictly decreasing: {counts} "
                f"(threshold satisfied: {threshold_ok})"
            )
    return StepGrid(
        nodes=tuple(total_time / k for k in counts),
        interval_hi=grid.interval_hi,
        step_counts=tuple(counts),
        total_time=float(total_time),
        threshold_warning=not threshold_ok,
    )


def recommended_interval(l: float, total_time: float) -> float:
    """Right endpoint for the step-size interval at generator bound l.

    Evaluates 1/(T^2 l^2 log l) * 1/(T^2 log T) with each factor clamped
    so it never exceeds 1 (log T additionally clamped to >= 1, so small
    total times do not blow up the interval).
    """
    if l <= 1:
        raise UnsupportedRegimeError(
            f"generator bound l={l} <= 1: the interval formula needs l > 1; "
            "choose the interval manually"
        )
    if total_time <= 0:
        raise ValueError(f"total_time must be positive, got {total_time}")
    t = float(total_time)
    first = 1.0 / max(t**2 * l**2 * math.log(l), 1.0)
    second = 1.0 / max(t**2 * max(math.log(t), 1.0), 1.0)
    return first * second
