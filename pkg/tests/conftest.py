import numpy as np


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against log(x)."""
    return float(np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)[0])


def brute_force_superoperator(apply_fn, dim: int) -> np.ndarray:
    """Matrix of a linear map on row-major vectorized matrices, built column
    by column from matrix units."""
    out = np.zeros((dim * dim, dim * dim), dtype=np.complex128)
    unit = np.zeros((dim, dim), dtype=np.complex128)
    for a in range(dim):
        for b in range(dim):
            unit[a, b] = 1.0
            out[:, a * dim + b] = apply_fn(unit).reshape(-1)
            unit[a, b] = 0.0
    return out
