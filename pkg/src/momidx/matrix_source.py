"""Lazy entry oracles for infinite Hermitian matrices.

Every oracle exposes ``entry(j, k)`` and ``section(n)``.  Sections are built
from the lower triangle and mirrored, so they are exactly Hermitian.
"""
from __future__ import annotations

import json
import threading
import warnings
from typing import Callable, Mapping

import numpy as np

from . import measures as ms
from .errors import IndexOutOfRange
from .hermitian_core import hermitize
from .similarity import AffineMap, conjugate_section


class MatrixOracle:
    def entry(self, j: int, k: int) -> complex:
        n = max(j, k)
        return complex(self.section(n)[j, k])

    def section(self, n: int) -> np.ndarray:
        raise NotImplementedError


class MomentOracle(MatrixOracle):
    """c[j, k] = moment(measure, j, k), memoized row by row.

    Rows are computed once and never revised, so ``section(n+1)`` always
    extends ``section(n)`` bit for bit.
    """

    def __init__(self, measure, quad: ms.QuadratureConfig | None = None):
        self.measure = measure
        self.quad = quad or ms.QuadratureConfig()
        self._rows: list[np.ndarray] = []
        self._err: list[np.ndarray] = []
        self._lock = threading.Lock()
        self.nonconverged = 0

    def _ensure(self, n):
        if len(self._rows) > n:
            return
        with self._lock:
            start = len(self._rows)
            if start > n:
                return
            jj = np.concatenate([np.full(j + 1, j) for j in range(start, n + 1)])
            kk = np.concatenate([np.arange(j + 1) for j in range(start, n + 1)])
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                vals, err, ok = ms.moments(self.measure, jj, kk, self.quad)
            for w in caught:
                warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
            self.nonconverged += int((~ok).sum())
            pos = 0
            for j in range(start, n + 1):
                row = vals[pos : pos + j + 1].copy()
                row[j] = row[j].real
                self._rows.append(row)
                self._err.append(err[pos : pos + j + 1].copy())
                pos += j + 1

    def entry(self, j, k):
        if j < k:
            return self.entry(k, j).conjugate()
        self._ensure(j)
        return complex(self._rows[j][k])

    def section(self, n):
        self._ensure(n)
        out = np.zeros((n + 1, n + 1), dtype=complex)
        for j in range(n + 1):
            out[j, : j + 1] = self._rows[j]
        return hermitize(out)

    def error_bounds(self, n) -> np.ndarray:
        self._ensure(n)
        out = np.zeros((n + 1, n + 1))
        for j in range(n + 1):
            out[j, : j + 1] = self._err[j]
        return np.maximum(out, out.T)


class ToeplitzSymbol(MatrixOracle):
    """c[j, k] = coeff(j - k) for a conjugate-symmetric coefficient map.

    ``coeffs`` is either a finite mapping (missing orders are zero) or a
    callable ``order -> complex``.
    """

    def __init__(self, coeffs: Mapping[int, complex] | Callable[[int], complex]):
        if callable(coeffs):
            self._coeff = coeffs
            self.coeffs = None
        else:
            cs = {int(n): complex(c) for n, c in coeffs.items()}
            for n, c in cs.items():
                if abs(cs.get(-n, 0j) - c.conjugate()) > 1e-14 * max(1.0, abs(c)):
                    raise ValueError(f"Toeplitz coefficients not conjugate-symmetric at order {n}")
            self.coeffs = cs
            self._coeff = lambda n: cs.get(n, 0j)

    @classmethod
    def from_density(cls, d: ms.DensitySpec) -> "ToeplitzSymbol":
        # moment c[j,k] of w dt/2pi on the unit circle is w_hat(k - j)
        return cls(lambda n: ms.fourier_coefficient(d, -n))

    @classmethod
    def geometric(cls, a: float) -> "ToeplitzSymbol":
        return cls.from_density(ms.geometric(a))

    def coeff(self, n: int) -> complex:
        return complex(self._coeff(n))

    def entry(self, j, k):
        return self.coeff(j - k)

    def section(self, n):
        col = np.array([self.coeff(d) for d in range(n + 1)])
        out = np.zeros((n + 1, n + 1), dtype=complex)
        for d in range(n + 1):
            idx = np.arange(d, n + 1)
            out[idx, idx - d] = col[d]
        return hermitize(out)


class ExplicitMatrix(MatrixOracle):
    def __init__(self, entries, tol: float = 1e-12):
        a = np.array(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("explicit matrix must be square")
        scale = max(1.0, float(np.abs(a).max()))
        if np.abs(a - a.conj().T).max() > tol * scale:
            raise ValueError("explicit matrix is not Hermitian")
        self.data = hermitize(a)

    @property
    def size(self) -> int:
        return self.data.shape[0]

    def entry(self, j, k):
        if not (0 <= j < self.size and 0 <= k < self.size):
            raise IndexOutOfRange(f"({j}, {k}) outside stored {self.size}x{self.size} matrix")
        return complex(self.data[j, k])

    def section(self, n):
        if n >= self.size:
            raise IndexOutOfRange(f"order {n} exceeds stored order {self.size - 1}")
        return self.data[: n + 1, : n + 1].copy()

    @classmethod
    def from_json(cls, obj) -> "ExplicitMatrix":
        n = int(obj["n"])
        rows = [[complex(*e) if isinstance(e, (list, tuple)) else complex(e) for e in row] for row in obj["entries"]]
        if len(rows) != n + 1 or any(len(r) != n + 1 for r in rows):
            raise ValueError(f"explicit matrix entries must be {n + 1}x{n + 1}")
        return cls(rows)

    @classmethod
    def load(cls, path) -> "ExplicitMatrix":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def to_json(self) -> dict:
        return matrix_to_json(self.data)


def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {
        "n": a.shape[0] - 1,
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in a],
    }


class ConjugatedOracle(MatrixOracle):
    """Moment matrix of the image under z -> alpha z + beta, via binomial conjugation."""

    def __init__(self, inner: MatrixOracle, alpha: complex, beta: complex):
        self.inner = inner
        self.map = AffineMap(alpha, beta)

    def section(self, n):
        return conjugate_section(self.inner.section(n), self.map)


class SumOracle(MatrixOracle):
    def __init__(self, parts):
        parts = tuple((o, float(s)) for o, s in parts)
        if not parts or any(not s > 0 for _, s in parts):
            raise ValueError("sum needs parts with positive scales")
        self.parts = parts

    def entry(self, j, k):
        return sum(s * o.entry(j, k) for o, s in self.parts)

    def section(self, n):
        out = sum(s * o.section(n) for o, s in self.parts)
        return hermitize(out)


def oracle_for(measure, quad: ms.QuadratureConfig | None = None) -> MatrixOracle:
    """Moment oracle; measure sums become :class:`SumOracle` so audits can see the parts."""
    if isinstance(measure, ms.MeasureSum):
        return SumOracle(tuple((oracle_for(p, quad), s) for p, s in measure.parts))
    return MomentOracle(measure, quad)
