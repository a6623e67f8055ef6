"""Orthonormal polynomials and Christoffel-Darboux kernel diagonals from a Cholesky factor.

With M_n = L L^H, row i of L^{-1} holds the coefficients of the orthonormal
polynomial phi_i(z) = sum_j rows[i, j] z^j, and the kernel diagonal
K_n(z0, z0) = sum_i |phi_i(z0)|^2 is ||L^{-1} k||^2 with k = (1, z0, ..., z0^n).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import KernelOverflow
from .hermitian_core import CholeskyFactor, forward_solve

OVERFLOW_LOG = 600.0


@dataclass(frozen=True)
class OrthonormalBasis:
    rows: np.ndarray

    @property
    def order(self) -> int:
        return self.rows.shape[0] - 1


@dataclass(frozen=True)
class KernelValue:
    z0: complex
    order: int
    value: float
    phi_tail: float


def orthonormal_coeffs(f: CholeskyFactor) -> OrthonormalBasis:
    n = f.L.shape[0]
    rows = sla.solve_triangular(f.L, np.eye(n, dtype=complex), lower=True, check_finite=False)
    return OrthonormalBasis(np.tril(rows))


def eval_phi(b: OrthonormalBasis, z: complex) -> np.ndarray:
    """(phi_0(z), ..., phi_n(z)) by Horner's rule on each row."""
    rows = b.rows
    acc = rows[:, -1].copy()
    for j in range(rows.shape[1] - 2, -1, -1):
        acc = acc * z + rows[:, j]
    return acc


def power_vectors(z0, n: int):
    """Columns (z^j / rho)_{j<=n} for each point and the log of each scale rho.

    rho = max(1, |z|)^n keeps the largest entry at modulus one.
    """
    z0 = np.atleast_1d(np.asarray(z0, dtype=complex))
    logrho = n * np.log(np.maximum(1.0, np.abs(z0)))
    j = np.arange(n + 1)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.abs(z0)
        # (z/|z|)^j * |z|^(j - n) for |z| > 1, plain z^j otherwise
        big = r > 1
        k = np.power(z0[None, :], j)
        if big.any():
            u = z0[big] / r[big]
            k[:, big] = np.power(u[None, :], j) * np.power(r[big][None, :], (j - n).astype(float))
    return k, logrho


def kernel_sweep(f: CholeskyFactor, z0):
    """Cumulative log kernel diagonals log K_m(z0, z0), m = 0..order, per point.

    Returns ``(logK, log_tail)`` arrays of shape (order+1, npoints);
    ``log_tail[m]`` is log |phi_m(z0)|^2.
    """
    n = f.order
    k, logrho = power_vectors(z0, n)
    x = forward_solve(f, k)
    sq = np.abs(x) ** 2
    with np.errstate(divide="ignore"):
        logK = np.log(np.cumsum(sq, axis=0)) + 2 * logrho[None, :]
        log_tail = np.log(sq) + 2 * logrho[None, :]
    return logK, log_tail


def kernel_diag(f: CholeskyFactor, z0: complex) -> KernelValue:
    """K_n(z0, z0) by forward substitution against the factor (no inverse)."""
    z0 = complex(z0)
    n = f.order
    if abs(z0) > 1 and n * math.log(abs(z0)) > OVERFLOW_LOG:
        raise KernelOverflow(f"|z0|^n overflows: n log|z0| = {n * math.log(abs(z0)):.1f}")
    logK, log_tail = kernel_sweep(f, z0)
    return KernelValue(z0, n, _exp(logK[-1, 0]), _exp(log_tail[-1, 0]))


def _exp(v):
    try:
        return math.exp(v)
    except OverflowError:
        return math.inf


def monic_norms(f: CholeskyFactor) -> np.ndarray:
    """||Phi_k||^2 = L[k, k]^2 for k = 0..n."""
    return f.diag ** 2
