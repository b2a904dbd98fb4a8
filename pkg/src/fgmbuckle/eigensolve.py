"""Smallest positive critical factor of (K + lambda * K_G) x = 0.

K must be symmetric positive definite (after constraints) and K_G symmetric
with at least one destabilizing direction. The problem is recast as the
generalized symmetric eigenproblem (-K_G) x = mu K x whose largest
eigenvalue gives lambda = 1/mu_max. The dense path factorizes K (Cholesky
congruence inside LAPACK) and is the reference; the sparse Lanczos path
must reproduce it and falls back to dense on convergence trouble.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

DENSE_CUTOFF = 600


class NoBucklingError(RuntimeError):
    """The applied reference load produces no positive critical factor."""


@dataclass(frozen=True)
class BucklingSolution:
    """Critical factor, its mode (unit max-norm) and the relative residual."""

    factor: float
    mode: np.ndarray
    residual: float
    method: str


def _as_dense(m) -> np.ndarray:
    return m.toarray() if sp.issparse(m) else np.asarray(m, dtype=float)


def _dense_solve(k, kg) -> tuple[float, np.ndarray]:
    kd = _as_dense(k)
    kgd = _as_dense(kg)
    try:
        mu, vecs = sla.eigh(-kgd, kd)
    except sla.LinAlgError as exc:
        raise NoBucklingError(f"stiffness matrix is not positive definite: {exc}") from exc
    mu_max = mu[-1]
    if mu_max <= 0.0:
        raise NoBucklingError("load does not induce buckling "
                              "(no positive critical factor)")
    return 1.0 / mu_max, vecs[:, -1]


def _sparse_solve(k, kg, n_modes: int) -> tuple[float, np.ndarray]:
    n = k.shape[0]
    k_csc = sp.csc_matrix(k)
    a = sp.csr_matrix(-kg)
    v0 = np.full(n, 1.0 / np.sqrt(n))
    mu, vecs = spla.eigsh(a, k=min(n_modes, n - 1), M=k_csc, which="LA", v0=v0)
    order = np.argsort(mu)
    mu_max = mu[order[-1]]
    if mu_max <= 0.0:
        raise NoBucklingError("load does not induce buckling "
                              "(no positive critical factor)")
    return 1.0 / mu_max, vecs[:, order[-1]]


def smallest_positive_factor(k, kg, method: str = "auto",
                             n_modes: int = 6) -> BucklingSolution:
    """Smallest positive lambda with K x = lambda (-K_G) x and its mode.

    The mode is scaled to unit max-norm with its largest-magnitude entry
    positive. When eigenvalues are nearly degenerate the smaller factor is
    returned and the mode is an arbitrary member of the eigenspace.
    """
    n = k.shape[0]
    if method not in ("auto", "dense", "sparse"):
        raise ValueError(f"unknown method {method!r}")
    use_dense = method == "dense" or (method == "auto" and n <= DENSE_CUTOFF)
    chosen = "dense"
    if use_dense:
        lam, vec = _dense_solve(k, kg)
    else:
        try:
            lam, vec = _sparse_solve(k, kg, n_modes)
            chosen = "sparse"
        except (spla.ArpackNoConvergence, spla.ArpackError):
            lam, vec = _dense_solve(k, kg)

    imax = int(np.argmax(np.abs(vec)))
    vec = vec / vec[imax]

    kd = k @ vec
    resid = np.linalg.norm(kd + lam * (kg @ vec)) / np.linalg.norm(kd)
    if resid > 1e-8:
        raise RuntimeError(f"eigen residual {resid:.3e} exceeds 1e-8")
    return BucklingSolution(factor=float(lam), mode=vec, residual=float(resid),
                            method=chosen)
