"""Index sequences (lambda, gamma, alpha, gamma at z0), limit estimates and verdicts.

All four indexes are infima over finitely supported vectors; the finite
sections give monotone sequences whose limits are the indexes:

* lambda_n  smallest eigenvalue of M_n
* gamma_n   1 / K_n(0, 0), the squared M-distance of 1 to polynomials vanishing at 0
* alpha_n   |M_n| / |M_{n-1}|, squared norm of the monic orthogonal polynomial
* gamma_n(z0) = 1 / K_n(z0, z0), the Christoffel function at z0

gamma, alpha and gamma(z0) all come out of a single Cholesky sweep.
"""
from __future__ import annotations

import csv
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import measures as ms
from .errors import (
    ConditioningWarning,
    KernelOverflow,
    NonConvergedQuadrature,
    NotApplicable,
    NotOnCircle,
    NotPositiveDefinite,
    SingularSystem,
    TooShort,
)
from .hermitian_core import PIVOT_TOL, CholeskyFactor, cholesky_sweep, leading_eigenvalues
from .matrix_source import MatrixOracle, MomentOracle, SumOracle, oracle_for
from .orthopoly import OVERFLOW_LOG, kernel_sweep, monic_norms

CONVERGED = "ConvergedPositive"
VANISHING = "VanishingToZero"
INCONCLUSIVE = "Inconclusive"

YES, NO, UNKNOWN = "Yes", "No", "Inconclusive"


@dataclass
class IndexSequence:
    kind: str
    values: np.ndarray
    requested_order: int
    z0: complex | None = None
    breakdown_order: int | None = None

    @property
    def order_reached(self) -> int:
        return len(self.values) - 1

    def running_min(self) -> np.ndarray:
        return np.minimum.accumulate(self.values)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["order", "value"])
            for n, v in enumerate(self.values):
                w.writerow([n, repr(float(v))])


@dataclass(frozen=True)
class LimitConfig:
    zero_tol: float = 1e-8
    rel_stall_tol: float = 1e-6
    window: int = 8


@dataclass(frozen=True)
class LimitEstimate:
    value: float
    status: str
    window: int
    residual: float


@dataclass
class Verdict:
    question: str
    answer: str
    basis: LimitEstimate
    applicability_note: str = ""
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.basis.status == INCONCLUSIVE and self.answer != UNKNOWN:
            raise ValueError("a verdict resting on an inconclusive estimate must be Inconclusive")

    def to_json(self) -> dict:
        out = {
            "question": self.question,
            "answer": self.answer,
            "value": self.basis.value,
            "status": self.basis.status,
            "window": self.basis.window,
            "residual": self.basis.residual,
            "applicability_note": self.applicability_note,
        }
        if self.details:
            out["details"] = self.details
        return out


# --------------------------------------------------------------------------
# sweeps


@dataclass
class Sweep:
    """One Cholesky pass over section(N), possibly stopped at a breakdown order."""

    factor: CholeskyFactor | None
    requested_order: int
    breakdown_order: int | None

    def check(self, on_breakdown):
        if self.breakdown_order is not None and on_breakdown == "raise":
            raise NotPositiveDefinite(self.breakdown_order)


def factor_sweep(o: MatrixOracle, N: int, pivot_tol: float = PIVOT_TOL) -> Sweep:
    if N < 0:
        raise ValueError("N must be nonnegative")
    f, breakdown = cholesky_sweep(o.section(N), pivot_tol)
    return Sweep(f, N, breakdown)


def _gamma_at_from_sweep(sw: Sweep, z0, kind="gamma_at"):
    z0 = complex(z0)
    if sw.factor is None:
        vals = np.zeros(0)
    else:
        n = sw.factor.order
        if abs(z0) > 1 and n * math.log(abs(z0)) > OVERFLOW_LOG:
            raise KernelOverflow(f"n log|z0| = {n * math.log(abs(z0)):.1f} exceeds {OVERFLOW_LOG}")
        logK, _ = kernel_sweep(sw.factor, z0)
        vals = np.exp(-logK[:, 0])
    return IndexSequence(kind, vals, sw.requested_order, z0 if kind == "gamma_at" else None, sw.breakdown_order)


def lambda_sequence(o: MatrixOracle, N: int) -> IndexSequence:
    """values[n] = smallest eigenvalue of section(o, n)."""
    return IndexSequence("lambda", leading_eigenvalues(o.section(N)), N)


def gamma_at_sequence(o: MatrixOracle, z0: complex, N: int, on_breakdown: str = "raise", sweep: Sweep | None = None) -> IndexSequence:
    """values[n] = 1 / K_n(z0, z0).

    ``on_breakdown="truncate"`` returns the orders factored before a
    :class:`NotPositiveDefinite` breakdown instead of raising.
    """
    sw = sweep or factor_sweep(o, N)
    sw.check(on_breakdown)
    return _gamma_at_from_sweep(sw, z0)


def gamma_sequence(o: MatrixOracle, N: int, on_breakdown: str = "raise", sweep: Sweep | None = None) -> IndexSequence:
    """values[n] = 1 / K_n(0, 0) = 1 / sum_{i<=n} |phi_i(0)|^2."""
    sw = sweep or factor_sweep(o, N)
    sw.check(on_breakdown)
    return _gamma_at_from_sweep(sw, 0j, kind="gamma")


def alpha_sequence(o: MatrixOracle, N: int, on_breakdown: str = "raise", sweep: Sweep | None = None) -> IndexSequence:
    """values[n] = |M_n| / |M_{n-1}|; the index itself is the running minimum."""
    if N < 1:
        raise ValueError("alpha needs N >= 1")
    sw = sweep or factor_sweep(o, N)
    sw.check(on_breakdown)
    vals = np.zeros(0) if sw.factor is None else monic_norms(sw.factor)
    return IndexSequence("alpha", vals, N, None, sw.breakdown_order)


# --------------------------------------------------------------------------
# limits


def estimate_limit(s: IndexSequence, cfg: LimitConfig = LimitConfig()) -> LimitEstimate:
    """Classify the tail of a sequence over the last ``cfg.window`` steps.

    VanishingToZero: last value below zero_tol and non-increasing over the window.
    ConvergedPositive: relative change over the window below rel_stall_tol.
    """
    v = s.running_min() if s.kind == "alpha" else np.asarray(s.values, dtype=float)
    w = cfg.window
    if len(v) < w + 1:
        raise TooShort(f"need at least {w + 1} values, have {len(v)}")
    tail = v[-(w + 1):]
    last = float(tail[-1])
    monotone = bool(np.all(np.diff(tail) <= 0))
    if last < cfg.zero_tol:
        status = VANISHING if monotone else INCONCLUSIVE
        return LimitEstimate(last, status, w, last)
    rel = float(abs(tail[-1] - tail[0]) / abs(last))
    status = CONVERGED if rel < cfg.rel_stall_tol else INCONCLUSIVE
    return LimitEstimate(last, status, w, rel)


# --------------------------------------------------------------------------
# independent oracles


def szego_integral(d: ms.DensitySpec, q: ms.QuadratureConfig | None = None) -> float:
    """Geometric mean exp(mean of log w) of a circle density.

    Returns 0.0 (with a warning) if the density is not strictly positive at
    the quadrature nodes.
    """
    q = q or ms.QuadratureConfig()

    def at(n):
        t = 2 * np.pi * np.arange(n) / n
        w = ms.density_values(d, t)
        if np.any(w <= 0):
            return None
        return float(np.mean(np.log(w)))

    if isinstance(d, ms.SampledGrid):
        val = at(len(d.values))
        if val is None:
            warnings.warn("density vanishes at a node; geometric mean taken as 0", UserWarning, stacklevel=2)
            return 0.0
        return math.exp(val)
    n = q.initial_nodes
    prev = at(n)
    while prev is not None and 2 * n <= q.max_nodes:
        n *= 2
        cur = at(n)
        if cur is None:
            prev = None
            break
        if abs(cur - prev) < q.rel_tol * max(1.0, abs(cur)):
            return math.exp(cur)
        prev = cur
    if prev is None:
        warnings.warn("density vanishes at a node; geometric mean taken as 0", UserWarning, stacklevel=2)
        return 0.0
    warnings.warn("log-density quadrature did not converge", NonConvergedQuadrature, stacklevel=2)
    return math.exp(prev)


def gamma_direct_ls(s) -> float:
    """Squared M-distance of e_0 to span(e_1..e_n) from the normal equations.

    Solves the trailing block by LU with partial pivoting, independently of
    any Cholesky factor.  Ill-conditioning is reported as a
    :class:`ConditioningWarning`; an exactly singular block raises.
    """
    s = np.asarray(s, dtype=complex)
    if s.shape[0] < 2:
        raise ValueError("need order >= 1")
    b = s[1:, 0]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", sla.LinAlgWarning)
        try:
            u = sla.solve(s[1:, 1:], b, assume_a="gen")
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(str(exc)) from exc
    if any(issubclass(w.category, sla.LinAlgWarning) for w in caught):
        warnings.warn(f"normal equations ill-conditioned at order {s.shape[0] - 1}", ConditioningWarning, stacklevel=2)
    return float((s[0, 0] - np.vdot(b, u)).real)


# --------------------------------------------------------------------------
# audits


@dataclass
class AuditReport:
    orders: int
    checks: dict
    tol: float

    @property
    def passed(self) -> bool:
        return all(all(v) for v in self.checks.values())

    def failures(self) -> dict:
        return {k: [n for n, ok in enumerate(v) if not ok] for k, v in self.checks.items() if not all(v)}

    def to_json(self) -> dict:
        return {"orders": self.orders, "tol": self.tol, "passed": self.passed, "failures": self.failures()}


def _triple(o, N):
    lam = lambda_sequence(o, N)
    sw = factor_sweep(o, N)
    gam = gamma_sequence(o, N, "truncate", sw)
    alp = alpha_sequence(o, max(N, 1), "truncate", sw)
    return lam, gam, alp


def audit_inequalities(o: MatrixOracle, N: int, tol: float = 1e-9) -> AuditReport:
    """Check lambda_n <= gamma_n and lambda_n <= min_{k<=n} alpha_k at each order.

    For a :class:`SumOracle`, also check that each index of the sum dominates
    the same index of every scaled part (the sum is larger in matrix order).
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    lam, gam, alp = _triple(o, N)
    m = gam.order_reached + 1
    checks = {
        "lambda<=gamma": list(lam.values[:m] <= gam.values + tol),
        "lambda<=alpha": list(lam.values[:m] <= alp.running_min() + tol),
    }
    if isinstance(o, SumOracle):
        for i, (part, scale) in enumerate(o.parts):
            plam, pgam, palp = _triple(part, N)
            k = min(m, pgam.order_reached + 1)
            checks[f"part{i}:lambda"] = list(lam.values >= scale * plam.values - tol)
            checks[f"part{i}:gamma"] = list(gam.values[:k] >= scale * pgam.values[:k] - tol)
            checks[f"part{i}:alpha"] = list(alp.running_min()[:k] >= scale * palp.running_min()[:k] - tol)
    return AuditReport(m - 1, checks, tol)


# --------------------------------------------------------------------------
# verdicts


def _answer(est: LimitEstimate, positive=YES, vanishing=NO) -> str:
    return {CONVERGED: positive, VANISHING: vanishing}.get(est.status, UNKNOWN)


def _breakdown_details(seq: IndexSequence) -> dict:
    d = {"order_requested": seq.requested_order, "order_reached": seq.order_reached}
    if seq.breakdown_order is not None:
        d["breakdown_order"] = seq.breakdown_order
    return d


def szego_verdict(m: ms.MeasureSpec, N: int, q: ms.QuadratureConfig | None = None, cfg: LimitConfig = LimitConfig()) -> Verdict:
    """Does a unit-circle measure satisfy the Szego condition (gamma > 0)?

    For sums, a part with a positive gamma limit settles the question: the
    sum dominates each part in matrix order, so its gamma is at least the
    part's scaled gamma.
    """
    if not ms.on_unit_circle(m):
        raise NotOnCircle("Szego verdict needs a measure supported on the unit circle")
    o = oracle_for(m, q)
    seq = gamma_sequence(o, N, "truncate")
    est = estimate_limit(seq, cfg)
    details = _breakdown_details(seq)
    note = "gamma > 0 on the unit circle is the Szego condition"
    answer = _answer(est)

    if isinstance(m, ms.MeasureSum) and est.status != CONVERGED:
        for i, (part, scale) in enumerate(m.parts):
            try:
                sub = szego_verdict(part, N, q, cfg)
            except TooShort:
                continue
            if sub.answer == YES:
                bound = LimitEstimate(scale * sub.basis.value, CONVERGED, sub.basis.window, sub.basis.residual)
                details.update(lower_bound_part=i, sum_estimate=est.value, sum_status=est.status)
                note += f"; positivity inherited from part {i} (sum dominates each scaled part)"
                return Verdict("Szego", YES, bound, note, details)

    if isinstance(m, ms.CircleDensity) and not isinstance(m.density, ms.SampledGrid):
        gm = szego_integral(m.density, q)
        details["szego_integral"] = gm
        if gm > 0 and abs(gm - est.value) > 1e-4 * gm:
            details["integral_disagreement"] = abs(gm - est.value) / gm
            warnings.warn(
                f"gamma estimate {est.value:.6g} disagrees with geometric mean {gm:.6g}",
                UserWarning,
                stacklevel=2,
            )
    return Verdict("Szego", answer, est, note, details)


DENSITY_NOTE = (
    "support on a Jordan curve with z_ref inside: gamma_{z_ref} = 0 iff polynomials are dense in L2(mu)"
)
OVERRIDE_NOTE = (
    "geometric hypothesis overridden; without a Jordan curve enclosing z_ref, gamma = 0 only says "
    "polynomials are dense in the closure of Laurent polynomials (when 0 is outside the support)"
)


def density_verdict(
    m: ms.MeasureSpec,
    N: int,
    z_ref: complex = 0j,
    override: bool = False,
    q: ms.QuadratureConfig | None = None,
    cfg: LimitConfig = LimitConfig(),
) -> Verdict:
    """Are polynomials dense in L2(mu)?  Yes iff gamma_{z_ref} vanishes."""
    curve = ms.enclosing_curve(m)
    applicable = curve is not None and curve.contains(z_ref)
    if not applicable and not override:
        raise NotApplicable("measure is not a density on a built-in curve enclosing z_ref; pass override=True")
    o = oracle_for(m, q)
    seq = gamma_at_sequence(o, z_ref, N, "truncate")
    est = estimate_limit(seq, cfg)
    note = DENSITY_NOTE if applicable else OVERRIDE_NOTE
    details = _breakdown_details(seq)
    details["z_ref"] = [complex(z_ref).real, complex(z_ref).imag]
    return Verdict("DensityOnJordanCurve", _answer(est, positive=NO, vanishing=YES), est, note, details)


def atom_mass_at(o: MatrixOracle, z0: complex, tol: float = 1e-12) -> float:
    """Total point mass the oracle's measure puts at z0 (0 when unknown or absent)."""
    z0 = complex(z0)
    if isinstance(o, SumOracle):
        return sum(s * atom_mass_at(p, z0, tol) for p, s in o.parts)
    m = getattr(o, "measure", None)
    if isinstance(m, ms.MeasureSum):
        return sum(s * atom_mass_at(MomentOracle(p), z0, tol) for p, s in m.parts)
    if isinstance(m, ms.Atomic):
        return float(sum(w for p, w in m.atoms if abs(p - z0) <= tol * max(1.0, abs(z0))))
    return 0.0


def bpe_verdict(o: MatrixOracle, z0: complex, N: int, cfg: LimitConfig = LimitConfig()) -> Verdict:
    """Is z0 a bounded point evaluation?  Yes iff gamma_{z0} stays positive.

    A Yes carries the evaluation constant C = gamma_{z0}^{-1/2}:
    |p(z0)| <= C ||p|| for every polynomial p.  When z0 carries a point mass
    w, |p(z0)|^2 w <= ||p||^2 gives gamma_{z0} >= w at every order, which
    settles the question even if the sequence has not visibly stalled.
    """
    seq = gamma_at_sequence(o, z0, N, "truncate")
    details = _breakdown_details(seq)
    details["z0"] = [complex(z0).real, complex(z0).imag]
    note = "gamma_{z0} > 0 iff z0 is a bounded point evaluation"
    try:
        est = estimate_limit(seq, cfg)
    except TooShort:
        est = LimitEstimate(float(seq.values[-1]) if len(seq.values) else 0.0, INCONCLUSIVE, cfg.window, math.nan)
    answer = _answer(est)
    mass = atom_mass_at(o, z0)
    if answer != YES and mass > 0:
        details.update(sequence_value=est.value, sequence_status=est.status, atom_mass=mass)
        est = LimitEstimate(mass, CONVERGED, 0, 0.0)
        answer = YES
        note += "; z0 is an atom, so its mass bounds gamma_{z0} from below"
    if answer == YES:
        details["constant"] = 1.0 / math.sqrt(est.value)
    return Verdict(f"BPE({complex(z0)})", answer, est, note, details)


# --------------------------------------------------------------------------
# grid scan


@dataclass
class GammaMap:
    re: np.ndarray
    im: np.ndarray
    values: np.ndarray  # values[i_im, i_re]
    order_reached: int

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["re", "im", "value"])
            for i, y in enumerate(self.im):
                for j, x in enumerate(self.re):
                    w.writerow([repr(float(x)), repr(float(y)), repr(float(self.values[i, j]))])


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("MOMIDX_THREADS", "1")))
    except ValueError:
        return 1


def bpe_map(o: MatrixOracle, re_range, im_range, steps, N: int) -> GammaMap:
    """gamma_{z0,N} on a rectangular grid; kernel overflow points are 0."""
    sx, sy = (steps, steps) if np.isscalar(steps) else steps
    if sx < 2 or sy < 2:
        raise ValueError("need at least two steps per axis")
    re = np.linspace(*re_range, int(sx))
    im = np.linspace(*im_range, int(sy))
    Z = (re[None, :] + 1j * im[:, None]).ravel()
    sw = factor_sweep(o, N)
    f = sw.factor
    if f is None:
        return GammaMap(re, im, np.zeros((len(im), len(re))), -1)
    n = f.order
    with np.errstate(divide="ignore"):
        over = n * np.log(np.maximum(1.0, np.abs(Z))) > OVERFLOW_LOG
    if over.any():
        warnings.warn(f"{int(over.sum())} grid points overflow the kernel at order {n}; set to 0", UserWarning, stacklevel=2)
    out = np.zeros(len(Z))
    ok = np.flatnonzero(~over)

    def chunk(idx):
        logK, _ = kernel_sweep(f, Z[idx])
        return idx, np.exp(-logK[-1])

    parts = np.array_split(ok, _threads()) if len(ok) else []
    with ThreadPoolExecutor(max_workers=_threads()) as ex:
        for idx, vals in ex.map(chunk, [p for p in parts if len(p)]):
            out[idx] = vals
    return GammaMap(re, im, out.reshape(len(im), len(re)), n)
