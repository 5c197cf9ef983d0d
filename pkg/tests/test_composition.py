import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qgreen import presets
from qgreen.composition import (ScatterBlock, binary_tree_coefficients, chain_coefficients, chain_extend,
                                effective_vertex, reduce_graph, sierpinski_coefficients)
from qgreen.errors import BoundaryMismatch, ResonantDenominatorWarning
from qgreen.pathsum import lead_smatrix
from qgreen.vertex import GeneralizedDelta, LineABCD

K = np.linspace(0.05, 12.0, 1000)


def delta_block(gamma, k):
    r, t = GeneralizedDelta(gamma).amplitudes(k, 2)
    return ScatterBlock.symmetric(r, t)


@given(st.lists(st.floats(-3.0, 3.0), min_size=2, max_size=8), st.data())
def test_chain_recurrence_matches_solver(gammas, data):
    lengths = [data.draw(st.floats(0.3, 2.0)) for _ in gammas[1:]]
    g = presets.open_chain([GeneralizedDelta(x) for x in gammas], lengths)
    S = lead_smatrix(g, K, check=False)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ResonantDenominatorWarning)
        B = chain_coefficients([delta_block(x, K) for x in gammas], lengths, K)
    assert np.allclose(B.smatrix, S, atol=1e-10)


def test_chain_with_asymmetric_vertices():
    v1 = LineABCD(2.0, 0.3, 1.0, 0.65)
    v2 = LineABCD(0.5, -1.0, 0.4, 1.2)
    g = presets.open_chain([v1, v2], [1.1])
    S = lead_smatrix(g, K)
    B = chain_coefficients([ScatterBlock.from_smatrix(v1.smatrix(K, 2)),
                            ScatterBlock.from_smatrix(v2.smatrix(K, 2))], [1.1], K)
    assert np.allclose(B.smatrix, S, atol=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("gamma", [0.0, 0.8, -1.3])
def test_sierpinski_closed_form(n, gamma):
    g = presets.sierpinski(n, gamma, size=2.0)
    S = lead_smatrix(g, K, check=False)
    pi = GeneralizedDelta(gamma)
    R, T = sierpinski_coefficients(n, lambda k: pi.amplitudes(k, 3)[0], lambda k: pi.amplitudes(k, 3)[1],
                                   2.0, K)
    assert np.allclose(R, S[:, 0, 0], atol=1e-10)
    assert np.allclose(T, S[:, 1, 0], atol=1e-10)


def test_sierpinski_edge_count():
    # stage n: 3^n edges
    assert [len(presets.sierpinski(n).edges) for n in (1, 2, 3)] == [3, 12, 39]


@pytest.mark.parametrize("level", [0, 1, 2])
def test_binary_tree_closed_form(level):
    g = presets.binary_tree(level, 0.5, 1.0)
    S = lead_smatrix(g, K, check=False)
    R, T = binary_tree_coefficients(level, GeneralizedDelta(0.5), GeneralizedDelta(0.5), 1.0, K)
    assert np.allclose(R, S[:, 0, 0], atol=1e-10)
    assert np.allclose(T, S[:, 1, 0], atol=1e-10)


def test_effective_vertex_of_pair_is_two_vertex_block():
    g = presets.open_chain([GeneralizedDelta(1.0), GeneralizedDelta(-0.5), GeneralizedDelta(2.0)], [1.0, 1.4])
    k = np.linspace(0.3, 6, 40)
    S = effective_vertex(g, [1, 2], ["i", 2], k)
    B = chain_coefficients([delta_block(1.0, k), delta_block(-0.5, k)], [1.0], k)
    assert np.allclose(S[:, 0, 0], B.R_plus) and np.allclose(S[:, 1, 0], B.T_plus)


def test_reduce_graph_preserves_scattering():
    g = presets.cube(1.0, open_leads=True)
    k = np.linspace(0.3, 6, 60) + 1e-3
    h = reduce_graph(g, ["A", "B", "C", "D"])
    assert len(h.vertices) == 5
    assert np.allclose(lead_smatrix(h, k), lead_smatrix(g, k), atol=1e-10)


def test_boundary_mismatch():
    g = presets.open_chain([GeneralizedDelta(1.0)] * 3, [1.0, 1.0])
    with pytest.raises(BoundaryMismatch):
        effective_vertex(g, [1, 2], ["i"], 1.0)


def test_resonant_denominator_warns():
    wall = ScatterBlock.symmetric(1.0, 0.0)
    with pytest.warns(ResonantDenominatorWarning):
        chain_extend(wall, 2.0, wall, np.pi)


@given(st.floats(0.1, 10.0), st.floats(0.2, 3.0))
def test_transparent_block_is_identity(k, ell):
    glass = ScatterBlock.symmetric(0.0, 1.0)
    b = delta_block(0.7, k)
    out = chain_extend(glass, ell, b, k)
    assert np.isclose(out.R_plus, b.R_plus * np.exp(2j * k * ell))
    assert np.isclose(abs(out.T_plus), abs(b.T_plus))
