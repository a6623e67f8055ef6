"""Bundled example measures and matrices used by tests, scripts and configs."""
from __future__ import annotations

import numpy as np

from . import measures as ms
from .matrix_source import ToeplitzSymbol


def lebesgue_circle() -> ms.CircleDensity:
    return ms.CircleDensity(ms.LEBESGUE)


def geometric_circle(a: float = 0.5) -> ms.CircleDensity:
    """Unit circle with w(t) = (1 - a^2) / (1 + 2a cos t + a^2); a = 1/2 gives 3 / (5 + 4 cos t)."""
    return ms.CircleDensity(ms.geometric(a))


def geometric_toeplitz(a: float = 0.5) -> ToeplitzSymbol:
    """Toeplitz matrix with entries (-a)^|j-k|."""
    return ToeplitzSymbol.geometric(a)


def roots_of_unity_atomic(n_atoms: int = 40) -> ms.Atomic:
    """Atoms at exp(2 pi i / n) with weight 2^-n, n = 1..n_atoms; the tail beyond is declared."""
    n = np.arange(1, n_atoms + 1)
    pts = np.exp(2j * np.pi / n)
    return ms.Atomic(
        tuple(zip(pts, 2.0 ** -n)),
        declared_tail_mass=2.0 ** -n_atoms,
        support_radius_bound=1.0,
    )


def perturbed_atomic(r: float = 0.1, n_atoms: int = 40) -> ms.MeasureSum:
    return ms.MeasureSum(((roots_of_unity_atomic(n_atoms), 1.0), (lebesgue_circle(), r)))


def ellipse(a: float = 1.0, b: float = 0.6, center: complex = 0j, rotation: float = 0.0) -> ms.CurveDensity:
    """Constant density in the curve parameter on an ellipse."""
    return ms.CurveDensity(ms.Ellipse(center, (a, b), rotation), ms.LEBESGUE)


def two_point(p=1.0, q=-1.0, wp=0.5, wq=0.5) -> ms.Atomic:
    return ms.Atomic(((p, wp), (q, wq)))


BUNDLED = {
    "lebesgue": lebesgue_circle,
    "geometric": geometric_circle,
    "atomic40": roots_of_unity_atomic,
    "perturbed_atomic": perturbed_atomic,
    "ellipse": ellipse,
    "two_point": two_point,
}
