"""Proximal L1 machinery: soft-thresholding, ISTA, graphical LASSO,
precision matrices."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import NumericalError, RankDeficiencyWarning

__all__ = [
    "LassoConfig",
    "GlassoConfig",
    "LassoResult",
    "soft_threshold",
    "lasso_ista",
    "glasso",
    "precision_matrix",
    "normalize_precision",
]


@dataclass(frozen=True)
class LassoConfig:
    """ISTA settings: L1 weight rho, iteration cap, relative-change tol."""

    rho: float = 0.0
    max_iter: int = 1000
    tol: float = 1e-8
    debug: bool = False

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("rho must be >= 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")


@dataclass(frozen=True)
class GlassoConfig:
    rho: float = 0.0
    max_sweeps: int = 100
    eps: float = 0.0001

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("rho must be >= 0")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if not self.eps > 0:
            raise ValueError("eps must be > 0")


@dataclass(frozen=True)
class LassoResult:
    coefficients: np.ndarray
    iterations: int
    converged: bool

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coefficients, dtype=dtype)


def soft_threshold(y, t):
    """Shrink toward zero: y+t below -t, 0 inside [-t, t], y-t above t."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("threshold must be >= 0")
    y = np.asarray(y, dtype=float)
    return np.sign(y) * np.maximum(np.abs(y) - t, 0.0)


def _largest_eigenvalue(g: np.ndarray) -> float:
    # power iteration; deterministic start breaks eigenvector orthogonality
    n = g.shape[0]
    z = np.ones(n) + 1e-4 * np.arange(n)
    z /= np.linalg.norm(z)
    lam = 0.0
    for _ in range(500):
        gz = g @ z
        norm = np.linalg.norm(gz)
        if norm == 0.0:
            return 0.0
        z = gz / norm
        lam_new = float(z @ g @ z)
        if abs(lam_new - lam) <= 1e-6 * max(abs(lam_new), 1e-300):
            return lam_new
        lam = lam_new
    return lam


def lasso_ista(a, y, cfg: LassoConfig) -> LassoResult:
    """Minimize ||y - A x||_2^2 + rho ||x||_1 by iterative soft-thresholding.

    Step size is 1/(2 lambda_max(A'A)); the iterate starts at A'y and the
    loop stops on relative change below cfg.tol or at cfg.max_iter.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    y = np.asarray(y, dtype=float).reshape(-1)
    if a.shape[0] != y.size:
        raise ValueError("row count of a must match length of y")
    if not np.any(a):
        raise ValueError("a must have at least one nonzero entry")

    gram = a.T @ a
    alpha = 1.0 / (2.0 * _largest_eigenvalue(gram))
    x = a.T @ y
    obj_prev = np.inf
    iterations = 0
    converged = False
    for k in range(cfg.max_iter):
        iterations = k + 1
        residual = y - a @ x
        x_new = soft_threshold(x + 2.0 * alpha * (a.T @ residual), alpha * cfg.rho)
        if cfg.debug:
            obj = float(np.sum((y - a @ x_new) ** 2) + cfg.rho * np.sum(np.abs(x_new)))
            if obj > obj_prev + 1e-12 * max(1.0, obj_prev):
                raise NumericalError(
                    f"objective increased at iteration {iterations}: "
                    f"{obj_prev!r} -> {obj!r}")
            obj_prev = obj
        delta = np.linalg.norm(x_new - x) / max(np.linalg.norm(x), 1e-12)
        x = x_new
        if delta < cfg.tol:
            converged = True
            break
    return LassoResult(x, iterations, converged)


def _psd_root_and_pinv_root(v11: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # symmetric PSD square root; negative eigenvalues clamp to 0, and the
    # inverse root is the pseudo-inverse in the same eigenbasis
    vals, vecs = np.linalg.eigh((v11 + v11.T) / 2.0)
    vals = np.maximum(vals, 0.0)
    roots = np.sqrt(vals)
    inv_roots = np.where(roots > 1e-12 * max(roots.max(), 1e-300), 1.0 / np.maximum(roots, 1e-300), 0.0)
    return (vecs * roots) @ vecs.T, (vecs * inv_roots) @ vecs.T


def glasso(r, cfg: GlassoConfig) -> np.ndarray:
    """Sparse precision estimate by coordinate sweeps over an augmented
    covariance V = R + rho I.

    Each sweep updates one row/column at a time from an L1-penalized
    regression on the remaining block; sweeping stops when the mean
    absolute change falls below eps scaled by the mean off-diagonal
    magnitude of R. Returns the inverse of the converged V.
    """
    r = np.asarray(r, dtype=float)
    n = r.shape[0]
    if r.ndim != 2 or r.shape[1] != n:
        raise ValueError("r must be square")
    scale = max(np.max(np.abs(r)), 1.0)
    if np.max(np.abs(r - r.T)) > 1e-9 * scale:
        raise ValueError("r must be symmetric")
    r = (r + r.T) / 2.0
    eigs = np.linalg.eigvalsh(r)
    if eigs[0] < -1e-8 * scale:
        raise ValueError("r must be positive semidefinite")
    if n == 1:
        return np.array([[1.0 / (r[0, 0] + cfg.rho)]])

    off = r.copy()
    np.fill_diagonal(off, 0.0)
    c_p = np.mean(np.abs(off)) * cfg.eps
    v = r + cfg.rho * np.eye(n)
    inner = LassoConfig(rho=cfg.rho, max_iter=1000, tol=1e-8)
    keep = [np.delete(np.arange(n), j) for j in range(n)]
    for _ in range(cfg.max_sweeps):
        v_start = v.copy()
        for j in range(n - 1, -1, -1):
            idx = keep[j]
            v11 = v[np.ix_(idx, idx)]
            r12 = r[idx, j]
            a_mat, a_pinv = _psd_root_and_pinv_root(v11)
            if not np.any(a_mat) or not np.any(r12):
                beta = np.zeros(n - 1)
            else:
                beta = lasso_ista(a_mat, a_pinv @ r12, inner).coefficients
            v12 = v11 @ beta
            v[idx, j] = v12
            v[j, idx] = v12
        if np.mean(np.abs(v - v_start)) < c_p:
            break
    cond = np.linalg.cond(v)
    if not np.isfinite(cond) or cond > 1e14:
        raise NumericalError(
            f"augmented covariance is numerically singular (condition number {cond:.3e})")
    return np.linalg.inv(v)


def precision_matrix(r, rank_tol: float = 1e-10) -> np.ndarray:
    """Inverse of a symmetric matrix; falls back to the pseudo-inverse with a
    RankDeficiencyWarning when the spectrum indicates rank deficiency."""
    r = np.asarray(r, dtype=float)
    n = r.shape[0]
    if r.ndim != 2 or r.shape[1] != n:
        raise ValueError("r must be square")
    if np.max(np.abs(r - r.T)) > 1e-9 * max(np.max(np.abs(r)), 1.0):
        raise ValueError("r must be symmetric")
    r = (r + r.T) / 2.0
    eigs = np.abs(np.linalg.eigvalsh(r))
    if eigs.max() == 0.0 or eigs.min() <= rank_tol * eigs.max():
        warnings.warn("matrix is rank deficient; returning the pseudo-inverse",
                      RankDeficiencyWarning)
        return np.linalg.pinv(r, rcond=rank_tol, hermitian=True)
    return np.linalg.inv(r)


def normalize_precision(q) -> np.ndarray:
    """Scale to unit diagonal: out_mn = q_mn / sqrt(q_mm q_nn)."""
    q = np.asarray(q, dtype=float)
    d = np.diag(q)
    if np.any(d <= 0):
        raise ValueError("diagonal entries must be positive")
    s = np.sqrt(d)
    return q / np.outer(s, s)
