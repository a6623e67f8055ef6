"""Compactly supported measures on the complex plane and their moments.

A measure is one of four frozen dataclasses (:class:`CircleDensity`,
:class:`CurveDensity`, :class:`Atomic`, :class:`MeasureSum`).  Moments are

    c[j, k] = integral of z**j * conj(z)**k  d mu

Density variants are integrated against the normalized parameter measure
dt / (2 pi) on [0, 2 pi), so the Lebesgue circle has unit mass.  For
``CurveDensity`` the density is taken as given: any arc-length factor
|z'(t)| must already be folded into it.
"""
from __future__ import annotations

import cmath
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .errors import NegativeDensity, NonConvergedQuadrature, UnsupportedTransform


# --------------------------------------------------------------------------
# densities


@dataclass(frozen=True)
class NamedFamily:
    name: str
    params: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.name == "lebesgue":
            if self.params:
                raise ValueError("lebesgue takes no parameters")
        elif self.name == "geometric":
            if len(self.params) != 1 or not abs(self.params[0]) < 1:
                raise ValueError("geometric(a) needs exactly one parameter with |a| < 1")
        else:
            raise ValueError(f"unknown density family {self.name!r}")


@dataclass(frozen=True)
class FourierCoefficients:
    """w(t) = sum_n coeffs[n] * exp(i n t); finitely many nonzero terms."""

    coeffs: dict

    def __post_init__(self):
        cs = {int(n): complex(c) for n, c in dict(self.coeffs).items()}
        object.__setattr__(self, "coeffs", cs)
        c0 = cs.get(0, 0j)
        if abs(c0.imag) > 1e-14 * max(1.0, abs(c0)) or not c0.real > 0:
            raise ValueError("coefficient of order 0 must be real and positive")
        for n, c in cs.items():
            other = cs.get(-n, 0j)
            if abs(other - c.conjugate()) > 1e-14 * max(1.0, abs(c)):
                raise ValueError(f"coefficients not conjugate-symmetric at order {n}")

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items(), key=lambda kv: kv[0])))


@dataclass(frozen=True)
class SampledGrid:
    """Density values on the uniform grid t_m = 2 pi m / len(values)."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) < 2:
            raise ValueError("sampled density needs at least two samples")
        if min(vals) < 0:
            raise NegativeDensity("sampled density has negative values")
        object.__setattr__(self, "values", vals)


DensitySpec = Union[NamedFamily, FourierCoefficients, SampledGrid]

LEBESGUE = NamedFamily("lebesgue")


def geometric(a: float) -> NamedFamily:
    """w(t) = sum_n (-a)**|n| e^{int} = (1 - a^2) / (1 + 2 a cos t + a^2)."""
    return NamedFamily("geometric", (a,))


def density_values(d: DensitySpec, t: np.ndarray) -> np.ndarray:
    """Evaluate a density on parameter values ``t`` (real array)."""
    t = np.asarray(t, dtype=float)
    if isinstance(d, NamedFamily):
        if d.name == "lebesgue":
            return np.ones_like(t)
        (a,) = d.params
        return (1.0 - a * a) / (1.0 + 2.0 * a * np.cos(t) + a * a)
    if isinstance(d, FourierCoefficients):
        w = np.zeros(t.shape, dtype=complex)
        for n, c in d.coeffs.items():
            w += c * np.exp(1j * n * t)
        return w.real
    if isinstance(d, SampledGrid):
        vals = np.asarray(d.values)
        m = len(vals)
        idx = np.rint(t * m / (2 * np.pi)).astype(int)
        if not np.allclose(idx * 2 * np.pi / m, t, rtol=0, atol=1e-12):
            raise ValueError("sampled density can only be evaluated on its own grid")
        return vals[idx % m]
    raise TypeError(f"not a density: {d!r}")


def fourier_coefficient(d: DensitySpec, n: int) -> complex:
    """n-th Fourier coefficient of a closed-form density (named or Fourier)."""
    if isinstance(d, NamedFamily):
        if d.name == "lebesgue":
            return 1.0 + 0j if n == 0 else 0j
        (a,) = d.params
        return complex((-a) ** abs(n))
    if isinstance(d, FourierCoefficients):
        return d.coeffs.get(n, 0j)
    raise TypeError("sampled densities have no closed-form Fourier coefficients")


# --------------------------------------------------------------------------
# curves


@dataclass(frozen=True)
class Circle:
    center: complex = 0j
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    def point(self, t):
        return self.center + self.radius * np.exp(1j * np.asarray(t))

    def contains(self, z) -> bool:
        return abs(complex(z) - self.center) < self.radius


@dataclass(frozen=True)
class Ellipse:
    center: complex = 0j
    semiaxes: tuple = (1.0, 1.0)
    rotation: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        a, b = (float(s) for s in self.semiaxes)
        if not (a > 0 and b > 0):
            raise ValueError("semiaxes must be positive")
        object.__setattr__(self, "semiaxes", (a, b))
        object.__setattr__(self, "rotation", float(self.rotation))

    def point(self, t):
        t = np.asarray(t)
        a, b = self.semiaxes
        return self.center + cmath.exp(1j * self.rotation) * (a * np.cos(t) + 1j * b * np.sin(t))

    def contains(self, z) -> bool:
        a, b = self.semiaxes
        w = (complex(z) - self.center) * cmath.exp(-1j * self.rotation)
        return (w.real / a) ** 2 + (w.imag / b) ** 2 < 1.0


CurveFamily = Union[Circle, Ellipse]


# --------------------------------------------------------------------------
# measures


@dataclass(frozen=True)
class CircleDensity:
    density: DensitySpec = LEBESGUE
    radius: float = 1.0
    center: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    @property
    def curve(self) -> Circle:
        return Circle(self.center, self.radius)


@dataclass(frozen=True)
class CurveDensity:
    curve: CurveFamily
    density: DensitySpec = LEBESGUE


@dataclass(frozen=True)
class Atomic:
    """Finite list of point masses plus a declared bound on the omitted tail.

    ``declared_tail_mass`` and ``support_radius_bound`` are supplied by the
    caller; they bound the contribution of atoms left out of ``atoms``.
    """

    atoms: tuple
    declared_tail_mass: float = 0.0
    support_radius_bound: float | None = None

    def __post_init__(self):
        atoms = tuple((complex(p), float(w)) for p, w in self.atoms)
        if not atoms:
            raise ValueError("atomic measure needs at least one atom")
        if any(not w > 0 for _, w in atoms):
            raise ValueError("atom weights must be positive")
        if self.declared_tail_mass < 0:
            raise ValueError("declared_tail_mass must be nonnegative")
        rmax = max(abs(p) for p, _ in atoms)
        bound = self.support_radius_bound
        if bound is None:
            bound = max(rmax, 1e-300)
        if not bound > 0:
            raise ValueError("support_radius_bound must be positive")
        if rmax > bound * (1 + 1e-12):
            raise ValueError("atom outside support_radius_bound")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "support_radius_bound", float(bound))

    @property
    def points(self) -> np.ndarray:
        return np.array([p for p, _ in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms])


@dataclass(frozen=True)
class MeasureSum:
    parts: tuple

    def __post_init__(self):
        parts = tuple((m, float(s)) for m, s in self.parts)
        if not parts:
            raise ValueError("sum needs at least one part")
        if any(not s > 0 for _, s in parts):
            raise ValueError("scales must be positive")
        object.__setattr__(self, "parts", parts)


MeasureSpec = Union[CircleDensity, CurveDensity, Atomic, MeasureSum]


@dataclass(frozen=True)
class QuadratureConfig:
    initial_nodes: int = 512
    max_nodes: int = 65536
    rel_tol: float = 1e-12

    def __post_init__(self):
        for name in ("initial_nodes", "max_nodes"):
            v = getattr(self, name)
            if v < 1 or v & (v - 1):
                raise ValueError(f"{name} must be a power of two")
        if self.initial_nodes > self.max_nodes:
            raise ValueError("initial_nodes exceeds max_nodes")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")


class MomentResult(NamedTuple):
    value: complex
    error_bound: float
    converged: bool = True


# --------------------------------------------------------------------------
# moments


def _grid_eval(curve, density, n):
    t = 2 * np.pi * np.arange(n) / n
    w = density_values(density, t)
    if np.any(w < 0):
        raise NegativeDensity(f"density negative at {int(np.sum(w < 0))} of {n} nodes")
    return curve.point(t), w


def _trapezoid(z, w, js, ks):
    maxdeg = int(max(js.max(), ks.max()))
    powers = np.power(z[None, :], np.arange(maxdeg + 1)[:, None])
    vals = np.einsum("pn,pn,n->p", powers[js], powers[ks].conj(), w) / len(z)
    return vals, w.mean()


def _density_moments(m, js, ks, q):
    curve, density = m.curve, m.density
    if isinstance(density, SampledGrid):
        n = len(density.values)
        z, w = _grid_eval(curve, density, n)
        vals, mass = _trapezoid(z, w, js, ks)
        if n % 2 == 0:
            half, hmass = _trapezoid(z[::2], w[::2], js, ks)
            err = np.abs(vals - half)
        else:
            err = np.full(len(js), np.inf)
        ok = err < q.rel_tol * (np.abs(vals) + mass)
        return vals, err, ok

    # per-pair freeze keeps each entry independent of how pairs are batched
    need = 2 * (js + ks) + 2
    vals = np.zeros(len(js), dtype=complex)
    err = np.full(len(js), np.inf)
    done = np.zeros(len(js), dtype=bool)
    prev = np.full(len(js), np.nan + 0j)
    n = q.initial_nodes
    while n <= q.max_nodes and not done.all():
        active = ~done & (need <= n)
        if active.any():
            idx = np.flatnonzero(active)
            z, w = _grid_eval(curve, density, n)
            cur, mass = _trapezoid(z, w, js[idx], ks[idx])
            diff = np.abs(cur - prev[idx])
            conv = diff < q.rel_tol * (np.abs(cur) + mass)
            vals[idx] = cur
            err[idx] = np.where(np.isnan(diff), np.inf, diff)
            done[idx[conv]] = True
            prev[idx] = cur
        n *= 2
    return vals, err, done


def moments(m: MeasureSpec, js, ks, q: QuadratureConfig | None = None):
    """Vectorized moments for index arrays ``js``, ``ks`` of equal length.

    Returns ``(values, error_bounds, converged)`` arrays.  Warns with
    :class:`NonConvergedQuadrature` when any pair hit ``max_nodes``.
    """
    q = q or QuadratureConfig()
    js = np.atleast_1d(np.asarray(js, dtype=int))
    ks = np.atleast_1d(np.asarray(ks, dtype=int))
    if js.shape != ks.shape or (js < 0).any() or (ks < 0).any():
        raise ValueError("moment indices must be nonnegative and paired")
    vals, err, ok = _moments(m, js, ks, q)
    if not ok.all():
        bad = int((~ok).sum())
        warnings.warn(
            f"quadrature did not reach rel_tol={q.rel_tol:g} for {bad} moment(s) "
            f"(max error bound {float(np.max(err)):.3e})",
            NonConvergedQuadrature,
            stacklevel=2,
        )
    return vals, err, ok


def _moments(m, js, ks, q):
    if isinstance(m, (CircleDensity, CurveDensity)):
        return _density_moments(m, js, ks, q)
    if isinstance(m, Atomic):
        p, w = m.points, m.weights
        maxdeg = int(max(js.max(), ks.max()))
        powers = np.power(p[None, :], np.arange(maxdeg + 1)[:, None])
        vals = np.einsum("pa,pa,a->p", powers[js], powers[ks].conj(), w)
        err = m.declared_tail_mass * m.support_radius_bound ** (js + ks).astype(float)
        return vals, err, np.ones(len(js), dtype=bool)
    if isinstance(m, MeasureSum):
        vals = np.zeros(len(js), dtype=complex)
        err = np.zeros(len(js))
        ok = np.ones(len(js), dtype=bool)
        for part, scale in m.parts:
            v, e, o = _moments(part, js, ks, q)
            vals += scale * v
            err += scale * e
            ok &= o
        return vals, err, ok
    raise TypeError(f"not a measure: {m!r}")


def moment(m: MeasureSpec, j: int, k: int, q: QuadratureConfig | None = None) -> MomentResult:
    """Single moment c[j, k] with its error bound."""
    vals, err, ok = moments(m, [j], [k], q)
    return MomentResult(complex(vals[0]), float(err[0]), bool(ok[0]))


def total_mass(m: MeasureSpec, q: QuadratureConfig | None = None) -> float:
    return moment(m, 0, 0, q).value.real


def moment_matrix(m: MeasureSpec, n: int, q: QuadratureConfig | None = None):
    """Full (n+1)x(n+1) moment section and elementwise error bounds.

    Lower triangle computed, upper triangle mirrored.
    """
    jj, kk = np.tril_indices(n + 1)
    vals, err, _ = moments(m, jj, kk, q)
    out = np.zeros((n + 1, n + 1), dtype=complex)
    bound = np.zeros((n + 1, n + 1))
    out[jj, kk] = vals
    out[kk, jj] = vals.conj()
    out[np.diag_indices(n + 1)] = out.diagonal().real
    bound[jj, kk] = err
    bound[kk, jj] = err
    return out, bound


# --------------------------------------------------------------------------
# affine images


def _push_curve(curve, alpha, beta):
    if isinstance(curve, Circle):
        if alpha.imag == 0 and alpha.real > 0:
            return Circle(alpha * curve.center + beta, alpha.real * curve.radius)
        # a rotated circle keeps its measure only if the parameter rotates too
        r = abs(alpha) * curve.radius
        return Ellipse(alpha * curve.center + beta, (r, r), cmath.phase(alpha))
    if isinstance(curve, Ellipse):
        a, b = curve.semiaxes
        return Ellipse(
            alpha * curve.center + beta,
            (abs(alpha) * a, abs(alpha) * b),
            curve.rotation + cmath.phase(alpha),
        )
    raise UnsupportedTransform(f"no affine image for curve {curve!r}")


def pushforward(m: MeasureSpec, alpha: complex, beta: complex) -> MeasureSpec:
    """Image measure of ``m`` under z -> alpha z + beta.  Mass is preserved."""
    alpha, beta = complex(alpha), complex(beta)
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    if isinstance(m, CircleDensity):
        curve = _push_curve(m.curve, alpha, beta)
        if isinstance(curve, Circle):
            return CircleDensity(m.density, curve.radius, curve.center)
        return CurveDensity(curve, m.density)
    if isinstance(m, CurveDensity):
        return CurveDensity(_push_curve(m.curve, alpha, beta), m.density)
    if isinstance(m, Atomic):
        return Atomic(
            tuple((alpha * p + beta, w) for p, w in m.atoms),
            m.declared_tail_mass,
            abs(alpha) * m.support_radius_bound + abs(beta),
        )
    if isinstance(m, MeasureSum):
        return MeasureSum(tuple((pushforward(p, alpha, beta), s) for p, s in m.parts))
    raise UnsupportedTransform(f"cannot push forward {m!r}")


# --------------------------------------------------------------------------
# geometry helpers used by the verdicts


def on_unit_circle(m: MeasureSpec, tol: float = 1e-12) -> bool:
    if isinstance(m, CircleDensity):
        return abs(m.radius - 1) <= tol and abs(m.center) <= tol
    if isinstance(m, CurveDensity):
        c = m.curve
        if isinstance(c, Circle):
            return abs(c.radius - 1) <= tol and abs(c.center) <= tol
        a, b = c.semiaxes
        return abs(a - 1) <= tol and abs(b - 1) <= tol and abs(c.center) <= tol
    if isinstance(m, Atomic):
        return bool(np.all(np.abs(np.abs(m.points) - 1) <= tol)) and m.support_radius_bound <= 1 + tol
    if isinstance(m, MeasureSum):
        return all(on_unit_circle(p, tol) for p, _ in m.parts)
    return False


def enclosing_curve(m: MeasureSpec):
    """The Jordan curve carrying ``m`` for the density variants, else None."""
    if isinstance(m, CircleDensity):
        return m.curve
    if isinstance(m, CurveDensity):
        return m.curve
    return None


# --------------------------------------------------------------------------
# JSON schema


def _cx(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    re, im = v
    return complex(float(re), float(im))


def _cx_out(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def density_from_json(obj) -> DensitySpec:
    if not isinstance(obj, dict) or len(obj.keys() - {"params"}) != 1:
        raise ValueError(f"bad density {obj!r}")
    if "family" in obj:
        return NamedFamily(obj["family"], tuple(obj.get("params", ())))
    if "fourier" in obj:
        return FourierCoefficients({int(n): _cx(c) for n, c in obj["fourier"].items()})
    if "samples" in obj:
        return SampledGrid(tuple(obj["samples"]))
    raise ValueError(f"bad density {obj!r}")


def density_to_json(d: DensitySpec) -> dict:
    if isinstance(d, NamedFamily):
        return {"family": d.name, "params": list(d.params)}
    if isinstance(d, FourierCoefficients):
        return {"fourier": {str(n): _cx_out(c) for n, c in sorted(d.coeffs.items())}}
    return {"samples": list(d.values)}


def curve_from_json(obj) -> CurveFamily:
    kind = obj.get("type")
    if kind == "circle":
        return Circle(_cx(obj.get("center", 0)), float(obj.get("radius", 1.0)))
    if kind == "ellipse":
        return Ellipse(_cx(obj.get("center", 0)), tuple(obj["semiaxes"]), float(obj.get("rotation", 0.0)))
    raise ValueError(f"unknown curve type {kind!r}")


def curve_to_json(c: CurveFamily) -> dict:
    if isinstance(c, Circle):
        return {"type": "circle", "center": _cx_out(c.center), "radius": c.radius}
    return {"type": "ellipse", "center": _cx_out(c.center), "semiaxes": list(c.semiaxes), "rotation": c.rotation}


def measure_from_json(obj) -> MeasureSpec:
    kind = obj.get("type")
    if kind == "circle_density":
        return CircleDensity(
            density_from_json(obj.get("density", {"family": "lebesgue"})),
            float(obj.get("radius", 1.0)),
            _cx(obj.get("center", 0)),
        )
    if kind == "curve_density":
        return CurveDensity(curve_from_json(obj["curve"]), density_from_json(obj.get("density", {"family": "lebesgue"})))
    if kind == "atomic":
        return Atomic(
            tuple((_cx(a["point"]), float(a["weight"])) for a in obj["atoms"]),
            float(obj.get("declared_tail_mass", 0.0)),
            obj.get("support_radius_bound"),
        )
    if kind == "sum":
        return MeasureSum(tuple((measure_from_json(p["measure"]), float(p.get("scale", 1.0))) for p in obj["parts"]))
    raise ValueError(f"unknown measure type {kind!r}")


def measure_to_json(m: MeasureSpec) -> dict:
    if isinstance(m, CircleDensity):
        return {"type": "circle_density", "density": density_to_json(m.density), "radius": m.radius, "center": _cx_out(m.center)}
    if isinstance(m, CurveDensity):
        return {"type": "curve_density", "curve": curve_to_json(m.curve), "density": density_to_json(m.density)}
    if isinstance(m, Atomic):
        return {
            "type": "atomic",
            "atoms": [{"point": _cx_out(p), "weight": w} for p, w in m.atoms],
            "declared_tail_mass": m.declared_tail_mass,
            "support_radius_bound": m.support_radius_bound,
        }
    return {"type": "sum", "parts": [{"measure": measure_to_json(p), "scale": s} for p, s in m.parts]}
