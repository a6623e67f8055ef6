import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from momidx import catalog
from momidx import measures as ms
from momidx.errors import IndexOutOfRange
from momidx.matrix_source import ExplicitMatrix, MomentOracle, SumOracle, ToeplitzSymbol, oracle_for

from conftest import half_geometric_section

ORACLES = {
    "toeplitz": lambda: catalog.geometric_toeplitz(0.5),
    "lebesgue": lambda: MomentOracle(catalog.lebesgue_circle()),
    "atomic40": lambda: MomentOracle(catalog.roots_of_unity_atomic()),
    "ellipse": lambda: MomentOracle(catalog.ellipse()),
    "perturbed": lambda: oracle_for(catalog.perturbed_atomic()),
}


@pytest.mark.parametrize("j, k, expected", [(0, 1, -0.5), (4, 0, 1 / 16), (1, 0, -0.5), (3, 5, 0.25)])
def test_toeplitz_entries(toeplitz_t, j, k, expected):
    assert toeplitz_t.entry(j, k) == expected


def test_toeplitz_section_matches_half_geometric(toeplitz_t):
    assert np.array_equal(toeplitz_t.section(1), [[1, -0.5], [-0.5, 1]])
    assert np.allclose(toeplitz_t.section(12), half_geometric_section(12), atol=1e-16)


def test_toeplitz_from_finite_coeffs():
    t = ToeplitzSymbol({n: (-0.5) ** abs(n) for n in range(-10, 11)})
    assert np.allclose(t.section(10), half_geometric_section(10))
    with pytest.raises(ValueError):
        ToeplitzSymbol({0: 1, 1: 0.5})


def test_moment_oracle_of_geometric_circle_matches_toeplitz(toeplitz_t):
    o = MomentOracle(catalog.geometric_circle(0.5))
    assert np.abs(o.section(10) - toeplitz_t.section(10)).max() <= 1e-13


def test_lebesgue_section_is_identity():
    o = MomentOracle(catalog.lebesgue_circle())
    s = o.section(3)
    assert np.abs(s - np.eye(4)).max() <= o.error_bounds(3).max() + 1e-15


def test_explicit_matrix():
    e = ExplicitMatrix(np.eye(3))
    assert e.entry(1, 1) == 1
    with pytest.raises(IndexOutOfRange):
        e.entry(3, 0)
    with pytest.raises(IndexOutOfRange):
        e.section(3)
    with pytest.raises(ValueError):
        ExplicitMatrix([[1, 2], [0, 1]])


def test_explicit_json_round_trip(tmp_path):
    a = half_geometric_section(4) + 0.1j * np.triu(np.ones((5, 5)), 1) - 0.1j * np.tril(np.ones((5, 5)), -1)
    e = ExplicitMatrix(a)
    p = tmp_path / "m.json"
    p.write_text(json.dumps(e.to_json()))
    assert np.array_equal(ExplicitMatrix.load(p).data, e.data)


def test_sum_section_is_elementwise_sum():
    a = MomentOracle(catalog.roots_of_unity_atomic())
    b = MomentOracle(catalog.lebesgue_circle())
    s = SumOracle(((a, 1.0), (b, 0.1)))
    assert np.allclose(s.section(6), a.section(6) + 0.1 * b.section(6), atol=1e-15)
    direct = MomentOracle(catalog.perturbed_atomic())
    assert np.abs(s.section(6) - direct.section(6)).max() <= 1e-13


def test_moment_oracle_memoizes():
    o = MomentOracle(catalog.ellipse())
    o.section(10)
    rows = list(o._rows)
    o.section(5)
    assert len(o._rows) == 11 and all(r is s for r, s in zip(o._rows, rows))


@pytest.mark.parametrize("name", sorted(ORACLES))
def test_section_exactly_hermitian_and_nested(name):
    o = ORACLES[name]()
    s8, s9 = o.section(8), o.section(9)
    assert np.array_equal(s9, s9.conj().T)
    assert np.array_equal(s9[:9, :9], s8)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(ORACLES)), st.integers(0, 10), st.integers(0, 10))
def test_entry_conjugate_symmetry(name, j, k):
    o = ORACLES[name]()
    assert o.entry(j, k) == np.conj(o.entry(k, j))


def test_moment_oracle_reemits_warnings():
    q = ms.QuadratureConfig(initial_nodes=8, max_nodes=16, rel_tol=1e-15)
    o = MomentOracle(catalog.geometric_circle(0.9), q)
    with pytest.warns(ms.NonConvergedQuadrature):
        o.section(2)
    assert o.nonconverged > 0
