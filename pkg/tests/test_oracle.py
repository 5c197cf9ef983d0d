import numpy as np
import pytest

from qgreen import presets
from qgreen.errors import ExplosionGuard, UnsupportedVertexFamily
from qgreen.graph import Position, build_graph
from qgreen.oracle import matching_determinant, matching_roots, truncated_pathsum
from qgreen.pathsum import green
from qgreen.spectral import find_bound_states, find_eigenvalues
from qgreen.vertex import CustomMatrix, LineABCD

L, E = Position.on_lead, Position.on_edge


def test_matching_roots_of_well():
    assert np.allclose(matching_roots(presets.single_edge(), 0.5, 10), np.pi * np.arange(1, 4), atol=1e-9)


def test_matching_bound_states_of_tadpole():
    kap = matching_roots(presets.tadpole(), 0.0, 5.0, imaginary=True)
    assert np.allclose(kap, find_bound_states(presets.tadpole(), (0, 5)).kappas, atol=1e-8)


def test_matching_with_abcd_vertex():
    g = build_graph({"vertices": ["A", "B", "C"],
                     "edges": [{"from": "A", "to": "B", "length": 1.0}, {"from": "B", "to": "C", "length": 0.7}],
                     "interactions": {"A": presets.Dirichlet(), "C": presets.Dirichlet(),
                                      "B": LineABCD(2.0, 0.3, 1.0, 0.65)}})
    a = find_eigenvalues(g, (0.1, 12)).values.real
    b = matching_roots(g, 0.1, 12)
    assert len(a) == len(b) and np.allclose(a, b, atol=1e-8)


def test_matching_determinant_vanishes_at_root():
    assert abs(matching_determinant(presets.single_edge(), np.pi)) < 1e-12


def test_custom_vertex_unsupported():
    g = build_graph({"vertices": ["A"], "leads": [{"anchor": "A"}],
                     "interactions": {"A": CustomMatrix(lambda k: np.array([[1.0]]))}})
    with pytest.raises(UnsupportedVertexFamily):
        matching_determinant(g, 1.0)


def test_pathsum_converges_on_two_vertex_graph():
    g = presets.two_delta(1.0, 1.0)
    exact = green(g, L("i", 0.2), L("f", 0.5), 1.7)
    errs = [abs(truncated_pathsum(g, L("i", 0.2), L("f", 0.5), 1.7, d) - exact) for d in (5, 10, 20, 40)]
    assert errs[-1] < 1e-10 and all(a >= b for a, b in zip(errs, errs[1:]))


def test_merged_and_literal_paths_agree():
    g = presets.cross(1.0, 0.0, 0.0)
    a = truncated_pathsum(g, L("i", 0.0), E(2, 0.4), 2.3, 9, merge=True)
    b = truncated_pathsum(g, L("i", 0.0), E(2, 0.4), 2.3, 9, merge=False)
    assert np.isclose(a, b, atol=1e-13)


def test_depth_zero_is_free_propagation():
    g = presets.two_delta(1.0, 1.0)
    val = truncated_pathsum(g, L("i", 0.2), L("i", 0.9), 1.1, 0)
    assert np.isclose(val, np.exp(1.1j * 0.7) / 1.1j)


def test_explosion_guard():
    with pytest.raises(ExplosionGuard):
        truncated_pathsum(presets.cube(1.0, open_leads=True), L("i", 0), L("f", 0), 1.3, 30,
                          merge=False, cap=10_000)
