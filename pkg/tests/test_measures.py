import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from momidx import catalog
from momidx import measures as ms
from momidx.errors import NegativeDensity

ATOMIC40 = catalog.roots_of_unity_atomic()


@pytest.mark.parametrize(
    "m, j, k, expected",
    [
        (catalog.lebesgue_circle(), 2, 2, 1.0),
        (catalog.lebesgue_circle(), 3, 1, 0.0),
        (catalog.geometric_circle(0.5), 1, 0, -0.5),
        (catalog.geometric_circle(0.5), 0, 1, -0.5),
        (catalog.geometric_circle(0.5), 3, 0, -0.125),
    ],
)
def test_moment_examples(m, j, k, expected):
    r = ms.moment(m, j, k)
    assert abs(r.value - expected) <= 1e-12
    assert r.converged


def test_atomic_moment_carries_tail_bound():
    r = ms.moment(ATOMIC40, 1, 1)
    assert abs(r.value - (1 - 2.0**-40)) <= 1e-15
    assert r.error_bound == pytest.approx(2.0**-40)


def test_atomic_moment_direct_sum():
    pts, w = ATOMIC40.points, ATOMIC40.weights
    for j, k in [(0, 0), (2, 1), (4, 0), (3, 3)]:
        direct = np.sum(w * pts**j * np.conj(pts) ** k)
        assert abs(ms.moment(ATOMIC40, j, k).value - direct) <= 1e-15


@pytest.mark.parametrize(
    "m, mass",
    [
        (catalog.lebesgue_circle(), 1.0),
        (ms.Atomic(((1j, 0.25), (-1j, 0.75))), 1.0),
        (ms.MeasureSum(((catalog.lebesgue_circle(), 1.0), (catalog.lebesgue_circle(), 0.3))), 1.3),
    ],
)
def test_total_mass(m, mass):
    assert ms.total_mass(m) == pytest.approx(mass, abs=1e-13)


def test_pushforward_atomic_shift():
    p = ms.pushforward(ms.Atomic(((1, 1.0),)), 1, -1)
    assert p.atoms == ((0j, 1.0),)


def test_pushforward_circle_scale_and_shift():
    p = ms.pushforward(catalog.lebesgue_circle(), 2, 1j)
    assert isinstance(p, ms.CircleDensity)
    assert p.center == 1j and p.radius == 2


def test_pushforward_rotation_keeps_moments():
    # a rotated circle becomes an ellipse parametrization; moments must still scale correctly
    m = catalog.geometric_circle(0.5)
    a = 0.8 * np.exp(0.7j)
    p = ms.pushforward(m, a, 0)
    for j, k in [(1, 0), (2, 1), (2, 2)]:
        lhs = ms.moment(p, j, k).value
        rhs = a**j * np.conj(a) ** k * ms.moment(m, j, k).value
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


def test_negative_density_rejected():
    with pytest.raises(NegativeDensity):
        ms.moment(ms.CircleDensity(ms.FourierCoefficients({0: 1, 1: 1, -1: 1})), 0, 0)
    with pytest.raises(NegativeDensity):
        ms.SampledGrid((1.0, -0.5, 1.0))


def test_fourier_density_matches_named():
    # geometric(1/2) truncated far out agrees with the closed form
    coeffs = {n: (-0.5) ** abs(n) for n in range(-60, 61)}
    f = ms.CircleDensity(ms.FourierCoefficients(coeffs))
    g = catalog.geometric_circle(0.5)
    for j, k in [(0, 0), (2, 0), (1, 3)]:
        assert abs(ms.moment(f, j, k).value - ms.moment(g, j, k).value) <= 1e-13


def test_sampled_grid_density():
    t = 2 * np.pi * np.arange(256) / 256
    vals = ms.density_values(ms.geometric(0.5), t)
    s = ms.CircleDensity(ms.SampledGrid(tuple(vals)))
    r = ms.moment(s, 1, 0)
    assert abs(r.value + 0.5) <= 1e-12


def test_json_round_trip():
    for name, build in catalog.BUNDLED.items():
        m = build()
        assert ms.measure_from_json(ms.measure_to_json(m)) == m, name


def test_nonconverged_quadrature_warns():
    q = ms.QuadratureConfig(initial_nodes=8, max_nodes=16, rel_tol=1e-15)
    with pytest.warns(ms.NonConvergedQuadrature):
        r = ms.moment(catalog.geometric_circle(0.9), 0, 0, q)
    assert not r.converged


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 8), st.integers(0, 8), st.sampled_from(sorted(catalog.BUNDLED)))
def test_hermitian_symmetry(j, k, name):
    m = catalog.BUNDLED[name]()
    a, b = ms.moment(m, j, k).value, ms.moment(m, k, j).value
    assert abs(a - np.conj(b)) <= 1e-14


@settings(max_examples=20, deadline=None)
@given(st.floats(-0.9, 0.9), st.integers(0, 6), st.integers(0, 6))
def test_centered_circle_moments_are_toeplitz(a, j, k):
    m = catalog.geometric_circle(a)
    r1, r2 = ms.moment(m, j, k), ms.moment(m, j + 1, k + 1)
    assert abs(r1.value - r2.value) <= r1.error_bound + r2.error_bound + 1e-15


@settings(max_examples=25, deadline=None)
@given(
    st.floats(0.3, 2.0),
    st.floats(-np.pi, np.pi),
    st.sampled_from(["geometric", "atomic40", "ellipse", "two_point"]),
)
def test_scaling_pushforward(r, phase, name):
    m = catalog.BUNDLED[name]()
    a = r * np.exp(1j * phase)
    p = ms.pushforward(m, a, 0)
    for j, k in [(1, 0), (2, 1), (3, 3)]:
        base = ms.moment(m, j, k).value
        lhs = ms.moment(p, j, k).value
        rhs = a**j * np.conj(a) ** k * base
        assert abs(lhs - rhs) <= 1e-12 * max(abs(rhs), abs(a) ** (j + k) * ms.total_mass(m))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(sorted(catalog.BUNDLED)), st.integers(0, 12), st.integers(0, 2**31))
def test_moment_matrix_psd(name, deg, seed):
    m = catalog.BUNDLED[name]()
    M, _ = ms.moment_matrix(m, deg)
    v = np.random.default_rng(seed).standard_normal((deg + 1, 2)) @ [1, 1j]
    quad = (v.conj() @ M @ v).real
    assert quad >= -1e-10 * np.sum(np.abs(v) ** 2) * ms.total_mass(m)
