"""Dense Hermitian kernels: incremental Cholesky, triangular solves, eigenvalues.

Sections are plain complex ndarrays of shape (n+1, n+1) with exact
Hermitian symmetry; the order of a section is ``len(s) - 1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import NoConvergence, NotPositiveDefinite

PIVOT_TOL = 1e-13


def hermitize(a) -> np.ndarray:
    """Copy of ``a`` with the upper triangle mirrored from the lower one."""
    a = np.array(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("section must be square")
    out = np.tril(a, -1)
    out = out + out.conj().T
    out[np.diag_indices_from(out)] = a.diagonal().real
    return out


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular ``L`` with ``L @ L^H`` equal to the source section.

    ``max_diag`` is the largest diagonal entry of the source section seen so
    far; pivots are certified against ``pivot_tol * max_diag``.
    """

    L: np.ndarray
    max_diag: float
    pivot_tol: float = PIVOT_TOL

    @property
    def order(self) -> int:
        return self.L.shape[0] - 1

    @property
    def diag(self) -> np.ndarray:
        return self.L.diagonal().real


def _new_row(L, row, max_diag, pivot_tol):
    i = L.shape[0]
    row = np.asarray(row, dtype=complex)
    if row.shape != (i + 1,):
        raise ValueError(f"expected a row of length {i + 1}, got {row.shape}")
    d = row[i].real
    max_diag = max(max_diag, d)
    if i:
        # L[:i,:i] conj(l) = conj(row[:i])
        l = sla.solve_triangular(L, row[:i].conj(), lower=True, check_finite=False).conj()
        pivot = d - np.vdot(l, l).real
    else:
        l = np.zeros(0, dtype=complex)
        pivot = d
    if not pivot > pivot_tol * max_diag:
        raise NotPositiveDefinite(i, pivot)
    out = np.zeros((i + 1, i + 1), dtype=complex)
    out[:i, :i] = L
    out[i, :i] = l
    out[i, i] = np.sqrt(pivot)
    return out, max_diag


def cholesky_extend(f: CholeskyFactor | None, new_row, pivot_tol: float | None = None) -> CholeskyFactor:
    """Factor of the section grown by one order; ``new_row`` is its last row.

    The leading block of the result is a bitwise copy of ``f.L``.
    ``f=None`` starts a factorization from a 1x1 section.
    """
    if f is None:
        L0 = np.zeros((0, 0), dtype=complex)
        tol = PIVOT_TOL if pivot_tol is None else pivot_tol
        L, md = _new_row(L0, new_row, 0.0, tol)
        return CholeskyFactor(L, md, tol)
    tol = f.pivot_tol if pivot_tol is None else pivot_tol
    L, md = _new_row(f.L, new_row, f.max_diag, tol)
    return CholeskyFactor(L, md, tol)


def cholesky(s, pivot_tol: float = PIVOT_TOL) -> CholeskyFactor:
    """Row-by-row Cholesky of a Hermitian section.

    Raises :class:`NotPositiveDefinite` with the first order whose pivot is
    not above ``pivot_tol`` times the largest diagonal entry up to that order.
    """
    f, breakdown = cholesky_sweep(s, pivot_tol)
    if breakdown is not None:
        raise NotPositiveDefinite(breakdown)
    return f


def cholesky_sweep(s, pivot_tol: float = PIVOT_TOL):
    """Factor as many leading orders of ``s`` as stay positive definite.

    Returns ``(factor, breakdown_order)``; ``breakdown_order`` is None when
    the whole section factored.  ``factor`` is None if order 0 already fails.
    Pivot tolerance is relative to the running maximum diagonal, so the
    verdict for order i never depends on rows beyond i.
    """
    s = np.asarray(s, dtype=complex)
    n = s.shape[0]
    L = np.zeros((n, n), dtype=complex)
    max_diag = 0.0
    for i in range(n):
        row = s[i, : i + 1]
        max_diag = max(max_diag, row[i].real)
        if i:
            l = sla.solve_triangular(L[:i, :i], row[:i].conj(), lower=True, check_finite=False).conj()
            pivot = row[i].real - np.vdot(l, l).real
        else:
            l, pivot = None, row[0].real
        if not pivot > pivot_tol * max_diag:
            if i == 0:
                return None, 0
            return CholeskyFactor(L[:i, :i].copy(), max_diag, pivot_tol), i
        if i:
            L[i, :i] = l
        L[i, i] = np.sqrt(pivot)
    return CholeskyFactor(L, max_diag, pivot_tol), None


def forward_solve(f: CholeskyFactor, b) -> np.ndarray:
    """Solve ``L x = b`` by forward substitution (``b`` may have columns)."""
    b = np.asarray(b, dtype=complex)
    if b.shape[0] != f.L.shape[0]:
        raise ValueError(f"right-hand side has {b.shape[0]} rows, factor has order {f.order}")
    return sla.solve_triangular(f.L, b, lower=True, check_finite=False)


def det_ratio(f: CholeskyFactor, k: int) -> float:
    """|M_k| / |M_{k-1}| (the k-th squared pivot); M[0,0] for k = 0."""
    if not 0 <= k <= f.order:
        raise ValueError(f"k={k} outside 0..{f.order}")
    return float(f.L[k, k].real ** 2)


def smallest_eigenvalue(s) -> float:
    s = np.asarray(s, dtype=complex)
    try:
        w = sla.eigvalsh(s, subset_by_index=[0, 0], check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return float(w[0])


def leading_eigenvalues(s) -> np.ndarray:
    """Smallest eigenvalue of every leading block s[:n+1, :n+1]."""
    s = np.asarray(s, dtype=complex)
    return np.array([smallest_eigenvalue(s[: n + 1, : n + 1]) for n in range(s.shape[0])])
