"""Dense least squares and L1-penalized regression used by training.

The readout solve goes through an SVD-based pseudoinverse (numpy lstsq with
the max(N, L) * eps singular-value cutoff). The L1 solver is a plain cyclic
coordinate-descent with soft thresholding on the objective

    sum_j (y_j - x_j . p)**2 + alpha * sum_k |p_k|

per output column, after removing the column-mean intercept. Note the
residual term is an unnormalized sum of squares, so the soft threshold for a
coordinate with squared column norm c is alpha / (2 * c).
"""

from __future__ import annotations

import numpy as np

LASSO_TOL = 1e-8
LASSO_MAX_SWEEPS = 10_000


def _as_2d(a: np.ndarray, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def least_squares(h: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Minimum-norm least-squares solution of H @ beta ~= T.

    Rank-revealing: singular values below max(N, L) * eps * sigma_max are
    treated as zero, so rank-deficient H is handled.
    """
    h = _as_2d(h, "H")
    t = _as_2d(t, "T")
    if h.shape[0] < 1 or h.shape[1] < 1:
        raise ValueError("H must have at least one row and one column")
    if t.shape[0] != h.shape[0]:
        raise ValueError(f"row mismatch: H has {h.shape[0]} rows, T has {t.shape[0]}")
    beta, *_ = np.linalg.lstsq(h, t, rcond=None)
    return beta


def lasso_objective(x: np.ndarray, y_centered: np.ndarray, p: np.ndarray, alpha: float) -> float:
    """Unnormalized L1 objective summed over output columns."""
    resid = y_centered - x @ p
    return float(np.sum(resid * resid) + alpha * np.sum(np.abs(p)))


def _soft_threshold(rho: float, t: float) -> float:
    if rho > t:
        return rho - t
    if rho < -t:
        return rho + t
    return 0.0


def lasso_fit(
    x: np.ndarray,
    y: np.ndarray,
    alpha: float,
    *,
    tol: float = LASSO_TOL,
    max_sweeps: int = LASSO_MAX_SWEEPS,
) -> tuple[np.ndarray, np.ndarray]:
    """Fit an L1-penalized linear model with per-output intercepts.

    Parameters
    ----------
    x : (N, d) design matrix (typically the +-1 view of encoded inputs).
    y : (N, m) targets.
    alpha : L1 penalty weight, >= 0.

    Returns
    -------
    (p, u) where u[i] is the mean of y[:, i] and p is the (d, m) coefficient
    matrix fit on the mean-centered targets by cyclic coordinate descent.
    Converged when the largest coefficient change in a sweep is below `tol`,
    giving up after `max_sweeps` sweeps.
    """
    x = _as_2d(x, "X")
    y = _as_2d(y, "Y")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    n, d = x.shape
    if n < 2:
        raise ValueError("need at least 2 samples")
    if y.shape[0] != n:
        raise ValueError(f"row mismatch: X has {n} rows, Y has {y.shape[0]}")
    m = y.shape[1]

    u = y.mean(axis=0)
    yc = y - u
    col_sq = np.einsum("ij,ij->j", x, x)
    p = np.zeros((d, m))
    for out in range(m):
        target = yc[:, out]
        coef = p[:, out]
        resid = target.copy()
        for _ in range(max_sweeps):
            max_delta = 0.0
            for k in range(d):
                c = col_sq[k]
                if c == 0.0:
                    continue
                xk = x[:, k]
                old = coef[k]
                rho = xk @ resid + c * old
                new = _soft_threshold(rho, alpha / 2.0) / c
                if new != old:
                    resid -= (new - old) * xk
                    coef[k] = new
                    max_delta = max(max_delta, abs(new - old))
            if max_delta < tol:
                break
    return p, u
