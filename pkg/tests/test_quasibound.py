import numpy as np
import pytest
from hypothesis import given, strategies as st

from qgreen import presets
from qgreen.composition import ScatterBlock, chain_coefficients
from qgreen.errors import NotUnitModulus
from qgreen.graph import Position
from qgreen.pathsum import green
from qgreen.quasibound import find_quasibound, reflection_phase, transition_amplitude
from qgreen.vertex import DeadEnd, Dirichlet, GeneralizedDelta


def chain_amplitude(gamma, end, l, k):
    """T_(1,l) / (1 - R-_(1,l) R+_(l+1,N) exp(2ik)) for the six-vertex chain with unit edges."""
    r, t = GeneralizedDelta(gamma).amplitudes(k, 2)
    v = ScatterBlock.symmetric(r, t)
    left = chain_coefficients([v] * l, [1.0] * (l - 1), k)
    rend = -1.0 if end == "dirichlet" else 1.0
    wall = ScatterBlock(rend, rend, 0.0, 0.0)
    right = chain_coefficients([v] * (5 - l) + [wall], [1.0] * (5 - l), k)
    return left.T_plus / (1 - left.R_minus * right.R_plus * np.exp(2j * k))


@given(st.sampled_from([0.5, 1.0, 2.0, -1.0]), st.sampled_from(["dirichlet", "neumann"]),
       st.integers(1, 5), st.floats(0.2, 9.0))
def test_transition_amplitude_chain_formula(gamma, end, l, k):
    g = presets.chain(6, gamma, end)
    a = transition_amplitude(g, "i", l, k, check=False)
    assert np.isclose(a, chain_amplitude(gamma, end, l, k), rtol=1e-9, atol=1e-9)


@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.floats(0.3, 8.0))
def test_amplitude_independent_of_target_point(x1, x2, k):
    # solve G(x) = (A e^{ikx} + A' e^{ik(l-x)}) / (ik) from two points; A must not depend on them
    if abs(x1 - x2) < 0.05:
        return
    g = presets.chain(6, 1.5, "neumann")
    src = Position.on_lead("i", 0.0)
    rows = [[np.exp(1j * k * x), np.exp(1j * k * (1 - x))] for x in (x1, x2)]
    rhs = [1j * k * green(g, src, Position.on_edge(3, x), k, check=False) for x in (x1, x2)]
    A = np.linalg.solve(rows, rhs)[0]
    assert np.isclose(A, transition_amplitude(g, "i", 3, k, check=False), atol=1e-8)


def test_transparent_chain_has_unit_amplitude_and_no_resonance():
    g = presets.open_chain([GeneralizedDelta(0.0)] * 4, [1.0, 1.3, 0.8])
    k = np.linspace(0.2, 8, 50)
    for e in (1, 2, 3):
        assert np.allclose(np.abs(transition_amplitude(g, "i", e, k)), 1.0)
    assert find_quasibound(g, "i", None, (0.2, 8.0), 2000) == []


def test_resonance_invariants():
    g = presets.chain(6, 2.0, "dirichlet")
    res = find_quasibound(g, "i", None, (3.5, 5.0), 4000)
    assert res
    for r in res:
        assert r.gamma > 0 and np.isclose(r.lifetime, 1 / r.gamma) and np.isclose(r.energy, r.k_qb ** 2 / 2)
        a2 = lambda k: abs(transition_amplitude(g, "i", r.edge, k)) ** 2
        assert a2(r.k_qb) >= a2(r.k_qb - r.gamma / 2) and a2(r.k_qb) >= a2(r.k_qb + r.gamma / 2)
        # half height reached within a few percent of the width
        lo = a2(np.linspace(r.k_qb - 0.55 * r.gamma, r.k_qb - 0.45 * r.gamma, 21))
        assert lo.min() <= r.peak / 2 <= lo.max()
        assert set(r.localization) == {1, 2, 3, 4, 5}


def test_narrow_resonance_of_walled_edge():
    # strong barrier in front of a walled edge: levels close to those of the unit well
    g = presets.two_vertex(GeneralizedDelta(10.0), Dirichlet(), lead_b=False)
    res = find_quasibound(g, "i", None, (0.5, 10.0), 8000)
    assert len(res) == 3
    assert np.allclose([r.k_qb for r in res], np.pi * np.arange(1, 4), rtol=0.1)
    assert all(a.gamma < b.gamma for a, b in zip(res, res[1:]))


def test_reflection_phase_winds_through_resonance():
    g = presets.two_vertex(GeneralizedDelta(10.0), Dirichlet(), lead_b=False)
    for r in find_quasibound(g, "i", None, (0.5, 10.0), 8000):
        ks = np.linspace(r.k_qb - 5 * r.gamma, r.k_qb + 5 * r.gamma, 2001)
        ph = reflection_phase(g, "i", ks, unwrap=True)
        assert 1.7 * np.pi < ph[-1] - ph[0] < 2.3 * np.pi
        slope = np.gradient(ph, ks)
        assert abs(ks[np.argmax(slope)] - r.k_qb) < 0.1 * r.gamma


def test_reflection_phase_range_and_wall():
    g = presets.star(1, Dirichlet())
    assert np.allclose(reflection_phase(g, 1, np.linspace(0.1, 5, 20)), np.pi)
    g = presets.two_vertex(GeneralizedDelta(1.0), DeadEnd(-0.5), lead_b=False)
    ph = reflection_phase(g, "i", np.linspace(0.1, 20, 500))
    assert np.all((ph > -np.pi) & (ph <= np.pi))


def test_phase_needs_total_reflection():
    with pytest.raises(NotUnitModulus):
        reflection_phase(presets.two_delta(1.0, 1.0), "i", 1.0)
