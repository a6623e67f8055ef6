"""End-to-end acceptance checks, one test per criterion.

Each test records a ``PASS``/``FAIL`` line; the lines are printed in the
pytest terminal summary, or directly when run as ``python tests/test_acceptance.py``.
"""
import json
import time

import numpy as np
import pytest

from momidx import catalog, cli
from momidx import indexes as ix
from momidx import measures as ms
from momidx.hermitian_core import cholesky
from momidx.matrix_source import ExplicitMatrix, MomentOracle, oracle_for
from momidx.orthopoly import kernel_diag, monic_norms
from momidx.similarity import gamma_shift_crosscheck

from conftest import ACCEPTANCE_LINES, random_hpd

Z3 = np.exp(2j * np.pi / 3)


def report(num, title, checks):
    """checks: list of (label, ok, detail). Records one line and returns overall status."""
    ok = all(c[1] for c in checks)
    parts = "; ".join(f"{label}={'ok' if good else 'FAILED'} ({detail})" for label, good, detail in checks)
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'} {title} | {parts}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok, line


def criterion_1():
    t0 = time.perf_counter()
    lam = ix.lambda_sequence(catalog.geometric_toeplitz(0.5), 256).values
    dt = time.perf_counter() - t0
    worst_rise = float(np.max(np.diff(lam)))
    return report(1, "Toeplitz lambda", [
        ("non-increasing", worst_rise <= 0, f"max step {worst_rise:.2e}"),
        ("|lambda_256-1/3|<=5e-3", abs(lam[256] - 1 / 3) <= 5e-3, f"{abs(lam[256] - 1 / 3):.2e}"),
        ("runtime<=60s", dt <= 60, f"{dt:.2f}s"),
    ])


def criterion_2():
    t0 = time.perf_counter()
    o = catalog.geometric_toeplitz(0.5)
    sw = ix.factor_sweep(o, 64)
    gam = ix.gamma_sequence(o, 64, sweep=sw)
    alp = ix.alpha_sequence(o, 64, sweep=sw)
    ge, ae = ix.estimate_limit(gam), ix.estimate_limit(alp)
    dt = time.perf_counter() - t0
    # independent determinant ratios for the alpha values
    T = o.section(64)
    logdet = [np.linalg.slogdet(T[: n + 1, : n + 1])[1] for n in range(65)]
    det_ratio = np.exp(np.diff(logdet))
    return report(2, "Toeplitz gamma and alpha", [
        ("gamma ConvergedPositive", ge.status == ix.CONVERGED, ge.status),
        ("|gamma_64-3/4|<=1e-6", abs(gam.values[64] - 0.75) <= 1e-6, f"{abs(gam.values[64] - 0.75):.2e}"),
        ("alpha_n=3/4 n=1..64", np.abs(alp.values[1:] - 0.75).max() <= 1e-10, f"{np.abs(alp.values[1:] - 0.75).max():.2e}"),
        ("alpha=det ratio", np.abs(alp.values[1:] - det_ratio).max() <= 1e-10, f"{np.abs(alp.values[1:] - det_ratio).max():.2e}"),
        ("gamma/alpha limits agree", abs(ge.value - ae.value) <= 1e-6, f"{abs(ge.value - ae.value):.2e}"),
        ("runtime<=5s", dt <= 5, f"{dt:.2f}s"),
    ])


def criterion_3():
    gm = ix.szego_integral(ms.geometric(0.5))
    lim = ix.estimate_limit(ix.gamma_sequence(catalog.geometric_toeplitz(0.5), 64)).value
    return report(3, "Szego integral cross-oracle", [
        ("|G-0.75|<=1e-8", abs(gm - 0.75) <= 1e-8, f"{abs(gm - 0.75):.2e}"),
        ("|G-gamma|<=1e-6", abs(gm - lim) <= 1e-6, f"{abs(gm - lim):.2e}"),
    ])


def criterion_4():
    o = MomentOracle(catalog.lebesgue_circle())
    sw = ix.factor_sweep(o, 64)
    seqs = {
        "lambda": ix.lambda_sequence(o, 64).values,
        "gamma": ix.gamma_sequence(o, 64, sweep=sw).values,
        "alpha": ix.alpha_sequence(o, 64, sweep=sw).values,
    }
    checks = [(f"{k}=1", np.abs(v - 1).max() <= 1e-12, f"{np.abs(v - 1).max():.1e}") for k, v in seqs.items()]
    for z0 in (0.3, 0.5j, -0.7):
        err = abs(ix.gamma_at_sequence(o, z0, 100).values[100] - (1 - abs(z0) ** 2))
        checks.append((f"gamma_at({z0})", err <= 1e-10, f"{err:.1e}"))
    v = ix.density_verdict(catalog.lebesgue_circle(), 64)
    checks.append(("density No", v.answer == ix.NO, v.answer))
    return report(4, "Lebesgue closed forms", checks)


def criterion_5():
    rng = np.random.default_rng(5)
    gk = kq = mn = 0.0
    for i in range(50):
        n = int(rng.integers(1, 13))
        s = random_hpd(rng, n, cond=float(10 ** rng.uniform(0, 4)))
        f = cholesky(s)
        g_kernel = ix.gamma_sequence(ExplicitMatrix(s), n).values[n]
        gk = max(gk, abs(g_kernel - ix.gamma_direct_ls(s)))
        z0 = complex(*rng.uniform(-1.2, 1.2, 2))
        k = z0 ** np.arange(n + 1)
        dense = (k.conj() @ np.linalg.inv(s) @ k).real
        kq = max(kq, abs(kernel_diag(f, z0).value - dense) / dense)
        logdet = [np.linalg.slogdet(s[: m + 1, : m + 1])[1] for m in range(n + 1)]
        ratios = np.exp(np.diff(logdet, prepend=0.0))
        mn = max(mn, float(np.abs(monic_norms(f) - ratios).max()))
    return report(5, "oracle equivalence on 50 random HPD", [
        ("gamma kernel=direct", gk <= 1e-8, f"{gk:.1e}"),
        ("kernel=k*M^-1k (rel)", kq <= 1e-8, f"{kq:.1e}"),
        ("monic=det ratios", mn <= 1e-8, f"{mn:.1e}"),
    ])


def criterion_6():
    checks = []
    oracles = {name: oracle_for(b()) for name, b in catalog.BUNDLED.items()}
    oracles["toeplitz"] = catalog.geometric_toeplitz(0.5)
    for name, o in sorted(oracles.items()):
        rep = ix.audit_inequalities(o, 64)
        checks.append((f"audit {name}", rep.passed, f"orders 0..{rep.orders}"))
    g = ix.gamma_sequence(oracle_for(catalog.perturbed_atomic(0.1)), 64).values
    checks.append(("sum gamma_n>=0.1", bool(np.all(g >= 0.1)), f"min {g.min():.4f}"))
    v = ix.szego_verdict(catalog.perturbed_atomic(0.1), 64)
    checks.append(("sum szego Yes", v.answer == ix.YES, v.answer))
    return report(6, "inequality audit", checks)


def criterion_7():
    a = gamma_shift_crosscheck(MomentOracle(catalog.lebesgue_circle()), 0.4, 40)
    b = gamma_shift_crosscheck(MomentOracle(catalog.ellipse(1.0, 0.6)), 0, 30)
    return report(7, "similarity cross-check", [
        ("lebesgue z0=0.4 N=40 gap<=1e-8", a.max_rel_gap <= 1e-8, f"{a.max_rel_gap:.1e}"),
        ("ellipse z0=0 N=30 gap<=1e-6", b.max_rel_gap <= 1e-6, f"{b.max_rel_gap:.1e}"),
    ])


def criterion_8():
    o = MomentOracle(catalog.roots_of_unity_atomic())
    gam = ix.gamma_sequence(o, 60, "truncate")
    n_reached = gam.order_reached
    strictly = bool(np.all(np.diff(gam.values) < 0))
    at = ix.gamma_at_sequence(o, Z3, 60, "truncate")
    kmax = float(np.max(1 / at.values))
    v = ix.bpe_verdict(o, Z3, 60)
    return report(8, "atomic example", [
        ("gamma strictly decreasing n<=60", strictly and n_reached >= 60,
         f"decreasing over 0..{n_reached}, Cholesky breakdown at order {gam.breakdown_order}"),
        ("K_n(z3,z3)<=8", kmax <= 8 + 1e-9, f"max 8{kmax - 8:+.1e} over 0..{at.order_reached}"),
        ("bpe Yes, gamma>=1/8", v.answer == ix.YES and v.basis.value >= 1 / 8, f"{v.answer} {v.basis.value:.6g}"),
    ])


def criterion_9():
    m = catalog.ellipse(1.0, 0.6)
    seq = ix.gamma_at_sequence(MomentOracle(m), 0, 40)
    est = ix.estimate_limit(seq)
    v = ix.density_verdict(m, 40)
    never_yes = v.answer != ix.YES and (est.status == ix.CONVERGED or v.answer == ix.UNKNOWN)
    return report(9, "ellipse non-density", [
        ("ConvergedPositive by n=40", est.status == ix.CONVERGED, f"{est.status} {est.value:.8f}"),
        ("density No", v.answer == ix.NO, v.answer),
        ("never Yes", never_yes, v.answer),
    ])


def criterion_10(tmp_path):
    checks = []
    jobs = {
        "indexes": {"command": "indexes", "toeplitz": {"family": "geometric", "params": [0.5]}, "N": 64, "z0": [0.2, 0.1]},
        "bpe": {"command": "bpe", "bundled": "atomic40", "N": 40, "z0": [-0.5, 0.8660254037844387], "crosscheck": True},
        "map": {"command": "map", "bundled": "ellipse", "N": 30, "grid": {"re_range": [-1, 1], "im_range": [-1, 1], "steps": 9}},
    }
    for name, job in jobs.items():
        texts = []
        for i in range(2):
            out = tmp_path / f"{name}{i}"
            cli.run(cli.parse_config(job), out)
            doc = json.loads((out / "report.json").read_text())
            doc.pop("timing")
            texts.append(json.dumps(doc, sort_keys=True))
        checks.append((name, texts[0] == texts[1], "identical modulo timing" if texts[0] == texts[1] else "differs"))
    return report(10, "determinism", checks)


@pytest.mark.parametrize("num", range(1, 10))
def test_criterion(num):
    ok, line = globals()[f"criterion_{num}"]()
    assert ok, line


def test_criterion_10(tmp_path):
    ok, line = criterion_10(tmp_path)
    assert ok, line


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    results = [globals()[f"criterion_{n}"]() for n in range(1, 10)]
    with tempfile.TemporaryDirectory() as d:
        results.append(criterion_10(Path(d)))
    raise SystemExit(0 if all(ok for ok, _ in results) else 1)
