"""Binomial similarity matrices for affine changes of variable.

Under z -> alpha z + beta the moment section transforms as

    M~_n = A^T M_n conj(A),    A[j, k] = C(k, j) alpha**j beta**(k - j)  (j <= k)

with ``A`` upper triangular.  In the row-vector convention (p = v . (1, z, ...),
||p||^2 = v M v^*) the same identity reads M~ = A M A^*, the form usually
printed; here sections are indexed as c[j, k] = int z^j conj(z)^k, which puts
the transpose on the other side.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConditioningWarning
from .hermitian_core import hermitize

MAX_BINOMIAL_ORDER = 1029


@dataclass(frozen=True)
class AffineMap:
    alpha: complex = 1 + 0j
    beta: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        if self.alpha == 0:
            raise ValueError("alpha must be nonzero")

    def __call__(self, z):
        return self.alpha * z + self.beta

    def then(self, other: "AffineMap") -> "AffineMap":
        """The map z -> other(self(z))."""
        return AffineMap(other.alpha * self.alpha, other.alpha * self.beta + other.beta)

    def inverse(self) -> "AffineMap":
        return AffineMap(1 / self.alpha, -self.beta / self.alpha)


@dataclass(frozen=True)
class BinomialMatrix:
    map: AffineMap
    data: np.ndarray

    @property
    def order(self) -> int:
        return self.data.shape[0] - 1


def _pascal(n):
    C = np.zeros((n + 1, n + 1))
    C[:, 0] = 1.0
    for k in range(1, n + 1):
        C[k, 1 : k + 1] = C[k - 1, : k] + C[k - 1, 1 : k + 1]
    return C  # C[k, j] = binom(k, j)


def binomial_matrix(n: int, m: AffineMap) -> BinomialMatrix:
    if n < 0:
        raise ValueError("order must be nonnegative")
    if n > MAX_BINOMIAL_ORDER:
        raise ValueError(f"binomial coefficients overflow beyond order {MAX_BINOMIAL_ORDER}")
    C = _pascal(n)
    j = np.arange(n + 1)
    apow = m.alpha ** j
    A = np.zeros((n + 1, n + 1), dtype=complex)
    for k in range(n + 1):
        A[: k + 1, k] = C[k, : k + 1] * apow[: k + 1] * m.beta ** (k - j[: k + 1])
    return BinomialMatrix(m, A)


def inverse_binomial(b: BinomialMatrix) -> BinomialMatrix:
    """Closed form: A(alpha, beta)^-1 = A(1/alpha, -beta/alpha)."""
    return binomial_matrix(b.order, b.map.inverse())


def conjugate_section(s, m: AffineMap) -> np.ndarray:
    """Moment section of the image measure under ``m``, from the original section."""
    s = np.asarray(s, dtype=complex)
    A = binomial_matrix(s.shape[0] - 1, m).data
    return hermitize(A.T @ s @ A.conj())


class CrossCheck(NamedTuple):
    direct: np.ndarray
    conjugated: np.ndarray
    max_rel_gap: float
    schur_from: int | None = None


def gamma_shift_crosscheck(o, z0: complex, N: int, gap_warn: float = 1e-6) -> CrossCheck:
    """Localized index at z0 two ways: kernel at z0, and gamma of the shifted matrix.

    The shifted sections are far worse conditioned than the originals, so
    their Cholesky sweep can break down early.  From that order on the
    conjugated side falls back to an LU Schur complement of each section;
    ``schur_from`` records where.
    """
    from .indexes import factor_sweep, gamma_at_sequence, gamma_direct_ls, gamma_sequence
    from .matrix_source import ConjugatedOracle

    if N < 1:
        raise ValueError("N must be at least 1")
    direct = gamma_at_sequence(o, z0, N).values
    shifted = ConjugatedOracle(o, 1.0, -complex(z0))
    sw = factor_sweep(shifted, N)
    conj = gamma_sequence(shifted, N, "truncate", sw).values
    schur_from = sw.breakdown_order
    if schur_from is not None:
        S = shifted.section(N)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConditioningWarning)
            tail = [gamma_direct_ls(S[: n + 1, : n + 1]) for n in range(max(schur_from, 1), N + 1)]
        head = conj[:schur_from] if schur_from else np.array([S[0, 0].real])
        conj = np.concatenate([head, tail])
    n = min(len(direct), len(conj))
    gap = float(np.max(np.abs(direct[:n] - conj[:n]) / np.abs(direct[:n])))
    if gap > gap_warn:
        warnings.warn(f"two-path gap {gap:.2e} at z0={z0}: conjugation is ill-conditioned", ConditioningWarning, stacklevel=2)
    return CrossCheck(direct, conj, gap, schur_from)
