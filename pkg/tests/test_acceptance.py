"""Acceptance checks, one recorded PASS/FAIL line per criterion.

Where a literal target cannot be met, the literal check is kept as a strict
xfail (it must keep failing) next to a passing check of what does hold.
"""
import csv
import io as stdio
import time
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qgreen import presets
from qgreen.cli import main
from qgreen.composition import ScatterBlock, chain_coefficients, sierpinski_coefficients
from qgreen.errors import ResonantDenominatorWarning
from qgreen.graph import Position
from qgreen.oracle import matching_roots, truncated_pathsum
from qgreen.pathsum import green, lead_smatrix, unitarity_defect
from qgreen.quasibound import find_quasibound
from qgreen.spectral import eigenfunction_from_residue, find_bound_states, find_eigenvalues, norm_integral
from qgreen.vertex import DeadEnd, Dirichlet, GeneralizedDelta

L, E = Position.on_lead, Position.on_edge

# published cube eigenvalues
CUBE_G0 = [1.230959, 1.919633, 3.141593, 4.372552, 5.052226, 6.283185, 7.514145, 8.193819, 9.424778, 10.65574]
CUBE_G1 = [1.094322, 1.642395, 2.190764, 3.141593, 3.516328, 5.177393, 6.283185, 7.602957, 8.273085, 9.424778]
BOUND = [0.463618, 2.022448]


def cli_roots(gamma, kmax=11.0):
    import contextlib
    buf = stdio.StringIO()
    t0 = time.perf_counter()
    with contextlib.redirect_stdout(buf):
        code = main(["spectrum", "--preset", "cube", "--gamma", str(gamma), "--kmax", str(kmax)])
    elapsed = time.perf_counter() - t0
    assert code == 0
    rows = list(csv.reader(stdio.StringIO(buf.getvalue())))[1:]
    return np.array([float(r[0]) for r in rows]), elapsed


# --- 1 ----------------------------------------------------------------------

@pytest.mark.xfail(strict=True, reason="table entry 2 (1.919633) is not a root; the root is 1.910633")
def test_criterion_1(acceptance):
    roots, elapsed = cli_roots(0.0)
    err = np.abs(roots[:10] - CUBE_G0)
    ok = bool(np.all(err <= 1e-5)) and elapsed < 10
    acceptance(1, ok, f"{np.sum(err <= 1e-5)}/10 table entries within 1e-5, worst entry "
                      f"{CUBE_G0[int(np.argmax(err))]} vs computed {roots[int(np.argmax(err))]:.6f}; "
                      f"runtime {elapsed:.2f} s")
    assert ok


def test_criterion_1_corrected_table():
    roots, elapsed = cli_roots(0.0)
    corrected = list(CUBE_G0)
    corrected[1] = np.arccos(-1 / 3)
    assert elapsed < 10
    assert np.allclose(roots[:10], corrected, atol=1e-5)
    # Neumann-Kirchhoff cube: every root has cos k in {1, -1, 1/3, -1/3}
    assert np.allclose(np.min(np.abs(np.cos(roots)[:, None] - [1, -1, 1 / 3, -1 / 3]), axis=1), 0, atol=1e-9)


# --- 2 ----------------------------------------------------------------------

@pytest.mark.xfail(strict=True, reason="the table skips three genuine roots (4.52268, 6.487975, 9.563965)")
def test_criterion_2(acceptance):
    roots, _ = cli_roots(1.0)
    first = roots[:10]
    err = np.abs(first - CUBE_G1)
    present = [min(abs(roots - v)) <= 1e-5 for v in CUBE_G1]
    ok = bool(np.all(err <= 1e-5))
    acceptance(2, ok, f"all {sum(present)} table values are roots, but the first ten distinct roots also "
                      f"contain {', '.join(f'{x:.6f}' for x in first if min(abs(np.array(CUBE_G1) - x)) > 1e-5)}")
    assert ok


def test_criterion_2_table_values_are_roots_and_extras_confirmed():
    roots, _ = cli_roots(1.0)
    assert all(min(abs(roots - v)) <= 1e-5 for v in CUBE_G1)
    extras = [x for x in roots if x < 9.5 and min(abs(np.array(CUBE_G1) - x)) > 1e-5]
    assert np.allclose(extras, [4.52268, 6.487975], atol=1e-5)
    ref = matching_roots(presets.cube(1.0), 4.4, 6.6)
    assert all(min(abs(ref - x)) < 1e-8 for x in extras)


# --- 3 ----------------------------------------------------------------------

def _mass_near(g, k_n, kind_pts):
    x, w = np.polynomial.legendre.leggauss(60)
    total = 0.0
    for kind, pid, a, b in kind_pts:
        xs = a + (b - a) * (x + 1) / 2
        psi = eigenfunction_from_residue(g, k_n, [Position(kind, pid, v) for v in xs])
        total += (b - a) / 2 * np.sum(w * np.abs(psi) ** 2)
    return total


def test_criterion_3(acceptance):
    g = presets.tadpole(-1.5, -2.0, 1.0)
    res = find_bound_states(g, (0.0, 10.0))
    kap = res.kappas
    near_O = [("lead", "i", 0, 0.5), ("lead", "f", 0, 0.5), ("edge", 1, 0, 0.5)]
    near_A = [("edge", 1, 0.5, 1.0)]
    mass = [(_mass_near(g, r.k, near_O), _mass_near(g, r.k, near_A)) for r in res.roots]
    norms = [norm_integral(g, r.k) for r in res.roots]
    ok = (len(kap) == 2 and np.allclose(kap, BOUND, atol=1e-5)
          and mass[0][0] > mass[0][1] and mass[1][1] > mass[1][0]
          and np.allclose(norms, 1, atol=1e-8))
    acceptance(3, ok, f"kappa = {', '.join(f'{x:.6f}' for x in kap)}; mass near O/A: "
                      + "; ".join(f"{a:.3f}/{b:.3f}" for a, b in mass))
    assert ok


# --- 4 ----------------------------------------------------------------------

def test_criterion_4(acceptance):
    roots = find_eigenvalues(presets.single_edge(1.0), (0.0, 10.5 * np.pi)).values.real
    err = np.max(np.abs(roots[:10] - np.pi * np.arange(1, 11))) if len(roots) >= 10 else np.inf
    ok = len(roots) == 10 and err <= 1e-8
    acceptance(4, ok, f"{len(roots)} roots, max |k_n - n pi| = {err:.1e}")
    assert ok


# --- 5 ----------------------------------------------------------------------

def _dominant(bc, gamma):
    res = find_quasibound(presets.chain(6, gamma, bc), "i", None, (3.5, 5.0), 4000)
    return max(res, key=lambda r: r.peak), res


@pytest.mark.xfail(strict=True, reason="the resonance near 4.28 peaks on edges 2 and 3, not 4 and 5")
def test_criterion_5(acceptance):
    _, res = _dominant("dirichlet", 2.0)
    inside = [r for r in res if 4.1 <= r.k_qb <= 4.3]
    loc_ok = any(min(r.localization[4], r.localization[5]) > max(r.localization[e] for e in (1, 2, 3))
                 for r in inside)
    neu, _ = _dominant("neumann", 2.0)
    one, _ = _dominant("dirichlet", 1.0)
    width_ok = neu.gamma < one.gamma
    ok = bool(inside) and loc_ok and width_ok
    r = inside[0] if inside else None
    detail = (f"k_qb = {r.k_qb:.4f}, |A|^2 on edges 1-5 = "
              + ", ".join(f"{r.localization[e]:.2f}" for e in range(1, 6)) if r else "no resonance in window")
    acceptance(5, ok, f"{detail}; Gamma(Neumann, 2) = {neu.gamma:.4f} < Gamma(Dirichlet, 1) = {one.gamma:.4f}")
    assert ok


def test_criterion_5_window_and_width_ordering():
    d2, res = _dominant("dirichlet", 2.0)
    assert any(4.1 <= r.k_qb <= 4.3 for r in res)
    n2, _ = _dominant("neumann", 2.0)
    d1, _ = _dominant("dirichlet", 1.0)
    n1, _ = _dominant("neumann", 1.0)
    # Neumann end beats Dirichlet, stronger deltas trap longer
    assert n2.gamma < d1.gamma and n2.gamma < d2.gamma and n1.gamma < d1.gamma
    assert d2.gamma < d1.gamma and n2.gamma < n1.gamma


# --- 6 ----------------------------------------------------------------------

K6 = np.linspace(0.05, 15.0, 1000)


@settings(max_examples=15)
@given(st.integers(1, 2), st.floats(-3.0, 3.0), st.floats(0.5, 3.0))
def test_criterion_6_sierpinski(n, gamma, size):
    S = lead_smatrix(presets.sierpinski(n, gamma, size), K6, check=False)
    pi = GeneralizedDelta(gamma)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ResonantDenominatorWarning)
        R, T = sierpinski_coefficients(n, *pi.amplitudes(K6, 3), size, K6)
    assert np.max(np.abs(R - S[:, 0, 0])) < 1e-10 and np.max(np.abs(T - S[:, 1, 0])) < 1e-10


@settings(max_examples=25)
@given(st.lists(st.tuples(st.floats(-3.0, 3.0), st.floats(0.3, 2.0)), min_size=1, max_size=8))
def test_criterion_6_chains(spec):
    gammas = [s[0] for s in spec]
    lengths = [s[1] for s in spec[1:]]
    S = lead_smatrix(presets.open_chain([GeneralizedDelta(x) for x in gammas], lengths), K6, check=False)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ResonantDenominatorWarning)
        B = chain_coefficients([ScatterBlock.symmetric(*GeneralizedDelta(x).amplitudes(K6, 2)) for x in gammas],
                               lengths, K6)
    assert np.max(np.abs(B.smatrix - S)) < 1e-10


def test_criterion_6(acceptance):
    worst = 0.0
    for n in (1, 2):
        for gamma in (0.0, 1.0, -0.7):
            S = lead_smatrix(presets.sierpinski(n, gamma, 1.0), K6, check=False)
            R, T = sierpinski_coefficients(n, *GeneralizedDelta(gamma).amplitudes(K6, 3), 1.0, K6)
            worst = max(worst, np.max(np.abs(R - S[:, 0, 0])), np.max(np.abs(T - S[:, 1, 0])))
    for n in range(1, 9):
        gammas = np.linspace(-1.5, 2.0, n)
        lengths = np.linspace(0.7, 1.6, n - 1)
        S = lead_smatrix(presets.open_chain([GeneralizedDelta(x) for x in gammas], lengths), K6, check=False)
        B = chain_coefficients([ScatterBlock.symmetric(*GeneralizedDelta(x).amplitudes(K6, 2)) for x in gammas],
                               lengths, K6)
        worst = max(worst, np.max(np.abs(B.smatrix - S)))
    ok = worst < 1e-10
    acceptance(6, ok, f"max deviation {worst:.1e} over Sierpinski n=1,2 and chains n=1..8 on 1000 k")
    assert ok


# --- 7 ----------------------------------------------------------------------

ROOT_GRAPHS = {
    "single edge": (presets.single_edge(1.0), False, (0.5, 12.0)),
    "tadpole": (presets.tadpole(-1.5, -2.0, 1.0), True, (0.0, 5.0)),
    "cross": (presets.cross(1.0, -1.0, -2.5, 1.0, 1.37), True, (0.0, 5.0)),
    "cube": (presets.cube(1.0), False, (0.5, 6.0)),
}

# off-resonance points; the three-edge graph sits at its fastest-converging setting
PATH_CASES = {
    "two-delta": (presets.two_delta(1.0, 1.0), L("i", 0.2), L("f", 0.5), 1.7),
    "cross": (presets.cross(0.0, 0.0, 0.0, 1.0, 1.545), L("i", 0.0), L("f", 0.3), 2.873),
    "parallel": (presets.parallel_edges(0.0, (1.0, 2.4, 1.7)), L("i", 0.0), L("f", 0.0), 3.0),
}


def _root_errors():
    out = {}
    for name, (g, imag, rng) in ROOT_GRAPHS.items():
        ref = matching_roots(g, *rng, imaginary=imag)
        got = find_bound_states(g, rng).kappas if imag else find_eigenvalues(g, rng).values.real
        out[name] = np.max(np.abs(ref - got)) if len(ref) == len(got) and len(ref) else np.inf
    return out


def _path_errors(depth):
    return {name: abs(truncated_pathsum(g, s, d, k, depth) - green(g, s, d, k))
            for name, (g, s, d, k) in PATH_CASES.items()}


@pytest.mark.xfail(strict=True, reason="the three-parallel-edge graph converges too slowly for depth 40")
def test_criterion_7(acceptance):
    roots = _root_errors()
    paths = _path_errors(40)
    ok = max(roots.values()) <= 1e-8 and max(paths.values()) <= 1e-8
    acceptance(7, ok, "root deviation " + ", ".join(f"{k} {v:.0e}" for k, v in roots.items())
               + "; path sum error at depth 40 " + ", ".join(f"{k} {v:.0e}" for k, v in paths.items()))
    assert ok


def test_criterion_7_roots():
    assert max(_root_errors().values()) <= 1e-8


def test_criterion_7_pathsum_two_delta_and_cross():
    errs = _path_errors(40)
    assert errs["two-delta"] <= 1e-8 and errs["cross"] <= 1e-8


def test_criterion_7_pathsum_parallel_edges_deeper():
    g, s, d, k = PATH_CASES["parallel"]
    assert abs(truncated_pathsum(g, s, d, k, 80) - green(g, s, d, k)) <= 1e-8


# --- 8 ----------------------------------------------------------------------

OPEN_PRESETS = ["cube-open", "two-delta", "tadpole", "parallel", "cross", "square-tail", "line-delta", "chain:6",
                "binary-tree:0", "binary-tree:2", "sierpinski:1", "sierpinski:3"]


def test_criterion_8(acceptance):
    k = np.linspace(0.05, 20.0, 500) + 1e-3 * np.sqrt(2)
    worst = {}
    for name in OPEN_PRESETS:
        g = presets.preset(name)
        assert g.flux_conserving
        worst[name] = float(np.max(unitarity_defect(lead_smatrix(g, k))))
    refl = 0.0
    for end in (Dirichlet(), DeadEnd(0.0), DeadEnd(-2.0), GeneralizedDelta(1.5)):
        g = presets.two_vertex(GeneralizedDelta(1.0), end, lead_b=False)
        refl = max(refl, float(np.max(np.abs(np.abs(lead_smatrix(g, k)[:, 0, 0]) - 1))))
    ok = max(worst.values()) <= 1e-10 and refl <= 1e-12
    acceptance(8, ok, f"max ||S S^+ - 1|| = {max(worst.values()):.1e} over {len(worst)} presets x 500 k; "
                      f"max ||R_ii| - 1| = {refl:.1e}")
    assert ok
