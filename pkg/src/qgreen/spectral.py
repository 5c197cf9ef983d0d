"""Eigenvalues, bound states and residue eigenfunctions.

Poles of the Green's function sit where the family matrix ``M(k)`` becomes
singular.  On closed graphs they lie on the real axis (eigenvalues); on
open graphs the bound states sit on the positive imaginary axis
``k = i kappa``.  Near a simple pole

    M(k)^{-1} ~ v w^T / (w^T M'(k_n) v (k - k_n))

with ``v`` and ``w`` the right and left null vectors, so the residue of
``G`` factorises into ``psi(x_f) psi*(x_i)``.  The wavefunction on the whole
graph is therefore proportional to ``w^T b(x)``, where ``b(x)`` is the
family right-hand side for target ``x``, and the factorised residue fixes
the normalisation.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import (DegenerateK, DegeneratePole, GraphHasLeads, NoLeads, NonConservingVertex, NotARoot,
                     ScanTooCoarseWarning)
from .graph import MetricGraph, Position
from .pathsum import (_karray, _source_vector, _target_vector, family_matrix, green,
                      vertex_smatrices)
from .vertex import DeadEnd, GeneralizedDelta, LineABCD

K_EXCLUDE = 1e-4
ROOT_TOL = 1e-8          # sigma_min / sigma_max accepted as singular
RANK_TOL = 1e-6          # singular values below this (relative) count as null directions


def secular(g: MetricGraph, k):
    """Secular function ``det M(k)``; scalar or array like ``k``.

    For two vertices joined by one edge this is exactly
    ``1 - r_A r_B exp(2 i k l)``.
    """
    ks, scalar = _karray(k)
    M = family_matrix(g, ks)
    d = np.linalg.det(M) if M.shape[-1] else np.ones(len(ks), dtype=complex)
    return complex(d[0]) if scalar else d


def _svals(g, k):
    M = family_matrix(g, np.atleast_1d(k))
    if M.shape[-1] == 0:
        return np.ones((len(np.atleast_1d(k)), 1))
    return np.linalg.svd(M, compute_uv=False)


def _rel_smin(g, k) -> float:
    s = _svals(g, k)[0]
    return float(s[-1] / s[0])


def _multiplicity(g, k, tol=RANK_TOL) -> int:
    s = _svals(g, k)[0]
    return max(1, int(np.sum(s / s[0] < tol)))


def _polish(g, k, direction, iters=12):
    """Newton refinement of a root of ``det M`` along ``k = direction * x``.

    Uses ``d log det M / dk = tr(M^{-1} M')`` and the multiplicity ``m``
    estimated from the rank drop, so degenerate levels converge
    quadratically as well.
    """
    m = _multiplicity(g, k, 1e-3)
    best, best_res = k, _rel_smin(g, k)
    for _ in range(iters):
        h = 1e-6 * max(abs(k), 1.0)
        ks = np.array([k])
        M = family_matrix(g, ks)[0]
        dM = (family_matrix(g, ks + h)[0] - family_matrix(g, ks - h)[0]) / (2 * h)
        try:
            tr = np.trace(np.linalg.solve(M, dM))
        except np.linalg.LinAlgError:
            break
        if not np.isfinite(tr) or tr == 0:
            break
        step = m / tr
        step = direction * (step / direction).real
        k = k - step
        res = _rel_smin(g, k)
        if res < best_res:
            best, best_res = k, res
        if abs(step) < 1e-15 * abs(k):
            break
    return best, best_res


@dataclass
class Root:
    """A located spectral point.

    ``k`` is the complex wavenumber (``i kappa`` for bound states);
    ``residual`` is the relative smallest singular value of ``M`` there.
    """

    k: complex
    residual: float
    multiplicity: int = 1

    @property
    def kappa(self) -> float:
        return float(self.k.imag)


@dataclass
class SpectrumResult:
    """Roots plus, when positions were requested, sampled eigenfunctions.

    Attributes
    ----------
    roots : list of Root
    positions : list of Position
    eigenfunctions : list of ndarray or None
        Normalised samples at ``positions``; ``None`` for degenerate roots.
    normalizations : list of complex or None
        Constant ``c`` with ``psi(x) = c * w^T b(x)``.
    """

    roots: list
    positions: list = field(default_factory=list)
    eigenfunctions: list = field(default_factory=list)
    normalizations: list = field(default_factory=list)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.k for r in self.roots])

    @property
    def kappas(self) -> np.ndarray:
        return np.array([r.kappa for r in self.roots])

    def __len__(self):
        return len(self.roots)


def _require_conserving(g):
    if not g.flux_conserving:
        raise NonConservingVertex("pole analysis needs flux-conserving vertices")


def _attach_eigenfunctions(g, res: SpectrumResult, positions):
    if positions is None:
        return res
    res.positions = list(positions)
    for r in res.roots:
        if r.multiplicity > 1:
            res.eigenfunctions.append(None)
            res.normalizations.append(None)
            continue
        psi, c = _residue_eigenfunction(g, r.k, res.positions)
        res.eigenfunctions.append(psi)
        res.normalizations.append(c)
    return res


def find_eigenvalues(g: MetricGraph, k_range, tol: float = 1e-12, points_per_unit: int = 2000,
                     positions=None) -> SpectrumResult:
    """All real eigenvalues of a closed graph in ``k_range``.

    The smallest singular value of ``M`` is minimised around every local
    minimum of ``|det M|`` on a uniform grid, and minima where ``M`` is
    numerically singular are kept.  Degenerate levels appear once, with the
    rank drop of ``M`` as multiplicity.

    Raises
    ------
    GraphHasLeads
    NonConservingVertex

    Warns
    -----
    ScanTooCoarseWarning
        Two roots are closer than twice the grid step.
    """
    if g.leads:
        raise GraphHasLeads("real eigenvalues need a closed graph; use find_bound_states")
    _require_conserving(g)
    kmin, kmax = map(float, k_range)
    lo = max(kmin, K_EXCLUDE)
    if kmax <= lo:
        return _attach_eigenfunctions(g, SpectrumResult([]), positions)
    n = max(int(np.ceil((kmax - lo) * points_per_unit)), 16)
    step = (kmax - lo) / n
    grid = np.linspace(max(lo - 2 * step, K_EXCLUDE), kmax + 2 * step, n + 5)
    vals = np.abs(_chunked_det(g, grid))
    idx = np.where((vals[1:-1] <= vals[:-2]) & (vals[1:-1] <= vals[2:]))[0] + 1
    roots = []
    for i in idx:
        a, b = grid[i - 1], grid[i + 1]
        opt = optimize.minimize_scalar(lambda x: _rel_smin(g, x), bounds=(a, b), method="bounded",
                                       options={"xatol": tol})
        kr, resid = _polish(g, complex(float(opt.x)), 1.0)
        kr = kr.real
        if resid > ROOT_TOL or not (lo <= kr <= kmax):
            continue
        if roots and abs(kr - roots[-1].k.real) < max(10 * tol, 1e-9):
            continue
        roots.append(Root(complex(kr), resid, _multiplicity(g, kr)))
    ks = [r.k.real for r in roots]
    if any(b - a < 2 * step for a, b in zip(ks, ks[1:])):
        warnings.warn("adjacent roots closer than twice the scan step; increase points_per_unit",
                      ScanTooCoarseWarning, stacklevel=2)
    return _attach_eigenfunctions(g, SpectrumResult(roots), positions)


def _chunked_det(g, ks, chunk=4096):
    out = np.empty(len(ks), dtype=complex)
    for s in range(0, len(ks), chunk):
        out[s:s + chunk] = secular(g, ks[s:s + chunk])
    return out


def _vertex_pole_kappas(g) -> list:
    """Positive ``kappa`` where some vertex S-matrix closed form has a pole."""
    out = []
    deg = g.layout.degree
    for i, v in enumerate(g.vertices):
        pi = g.interactions[v]
        if isinstance(pi, GeneralizedDelta) and pi.gamma < 0:
            out.append(-2.0 * pi.gamma / deg[i])
        elif isinstance(pi, DeadEnd) and pi.lam < 0:
            out.append(-pi.lam)
        elif isinstance(pi, LineABCD):
            # -c - kappa (a + d) - b kappa^2 = 0
            roots = np.roots([-pi.b, -(pi.a + pi.d), -pi.c]) if pi.b else \
                ([-pi.c / (pi.a + pi.d)] if pi.a + pi.d else [])
            out.extend(float(np.real(r)) for r in roots if abs(np.imag(r)) < 1e-12 and np.real(r) > 0)
    return sorted(set(out))


def _probe_positions(g):
    pts = [Position.on_lead(l.id, 0.0) for l in g.leads]
    pts += [Position.on_edge(e.id, 0.5 * e.length) for e in g.edges]
    return pts


def _is_green_pole(g, kappa) -> bool:
    """Whether ``G`` really diverges at a vertex pole ``k = i kappa``."""
    best = 0.0
    for p in _probe_positions(g):
        vals = []
        for d in (1e-5, 1e-6):
            kk = 1j * kappa * (1 + d)
            vals.append(abs(green(g, p, p, kk, check=False)) * d)
        # a simple pole keeps |G| * delta constant, a regular point sends it to zero
        if vals[0] > 0:
            best = max(best, vals[1] / vals[0])
    return best > 0.5


def find_bound_states(g: MetricGraph, kappa_range, tol: float = 1e-14, points_per_unit: int = 2000,
                      positions=None) -> SpectrumResult:
    """Bound states ``k = i kappa`` of an open graph with ``kappa`` in ``kappa_range``.

    ``det M(i kappa)`` is real for the closed-form vertex families, so sign
    changes are bracketed and bisected.  Sign changes produced by poles of
    vertex S-matrices are discarded, while vertex poles at which the Green's
    function genuinely diverges are added.  Even-order zeros are caught by
    minimising the smallest singular value around minima of ``|det M|``.
    """
    if not g.leads:
        raise NoLeads("bound-state search is meant for open graphs; use find_eigenvalues")
    _require_conserving(g)
    kmin, kmax = map(float, kappa_range)
    lo = max(kmin, K_EXCLUDE)
    roots = []
    # without edges det M is identically one and only vertex poles remain
    if kmax > lo and g.layout.n_directed:
        n = max(int(np.ceil((kmax - lo) * points_per_unit)), 16)
        grid = np.linspace(lo, kmax, n + 1)
        f = _chunked_det(g, 1j * grid)
        real = np.max(np.abs(f.imag)) <= 1e-10 * max(1.0, np.max(np.abs(f)))
        cands = []
        if real:
            fr = f.real
            poles = _vertex_pole_kappas(g)
            for i in np.where(np.sign(fr[:-1]) * np.sign(fr[1:]) < 0)[0]:
                if any(grid[i] <= p <= grid[i + 1] for p in poles):
                    continue
                x = optimize.brentq(lambda x: secular(g, 1j * x).real, grid[i], grid[i + 1],
                                    xtol=tol, rtol=4 * np.finfo(float).eps)
                cands.append(x)
            cands.extend(grid[np.where(fr == 0)[0]])
        a = np.abs(f)
        for i in np.where((a[1:-1] <= a[:-2]) & (a[1:-1] <= a[2:]))[0] + 1:
            opt = optimize.minimize_scalar(lambda x: _rel_smin(g, 1j * x), method="bounded",
                                           bounds=(grid[i - 1], grid[i + 1]), options={"xatol": 1e-13})
            cands.append(float(opt.x))
        for x in sorted(cands):
            try:
                kk, resid = _polish(g, 1j * x, 1j)
            except DegenerateK:
                continue
            x = kk.imag
            if resid > ROOT_TOL or not np.isfinite(resid):
                continue
            if any(abs(x - r.kappa) < 1e-7 for r in roots):
                continue
            roots.append(Root(1j * x, resid, _multiplicity(g, 1j * x)))
    for kp in _vertex_pole_kappas(g):
        if lo <= kp <= kmax and all(abs(kp - r.kappa) > 1e-7 for r in roots) and _is_green_pole(g, kp):
            roots.append(Root(1j * kp, 0.0, 1))
    roots.sort(key=lambda r: r.kappa)
    return _attach_eigenfunctions(g, SpectrumResult(roots), positions)


# ---------------------------------------------------------------------------
# residues

def _null_vectors(M):
    U, s, Vh = np.linalg.svd(M)
    return s, np.conj(Vh[-1]), np.conj(U[:, -1])


def _residue_eigenfunction(g, k_n, positions):
    k_n = complex(k_n)
    positions = [g.check_position(p) for p in positions]
    ks = np.array([k_n])
    M = family_matrix(g, ks)[0]
    if M.shape[0] == 0:
        raise DegeneratePole("graph has no edges; the pole comes from a vertex S-matrix")
    s, v, w = _null_vectors(M)
    if s[-1] / s[0] > ROOT_TOL * 1e2:
        raise NotARoot(f"k={k_n!r} is not a root (relative sigma_min {s[-1] / s[0]:.3g})")
    if len(s) > 1 and s[-2] / s[0] < RANK_TOL:
        raise DegeneratePole(f"pole at k={k_n!r} is degenerate; residue does not factorise")
    h = abs(k_n) * 1e-6
    dM = (family_matrix(g, ks + h)[0] - family_matrix(g, ks - h)[0]) / (2 * h)
    denom = w @ dM @ v
    if abs(denom) < 1e-12 * np.linalg.norm(dM):
        raise DegeneratePole(f"derivative of M is degenerate at k={k_n!r}")
    smats = vertex_smatrices(g, ks)
    # reference point: the largest of w.b over the probe and sample points
    cands = list(positions) + _probe_positions(g)
    wb = np.array([w @ _target_vector(g, ks, p, smats)[0] for p in cands])
    j = int(np.argmax(np.abs(wb)))
    x0 = cands[j]
    u0 = _source_vector(g, ks, x0, smats)[0]
    rho = (u0 @ v) * wb[j] / (1j * denom)
    c = np.sqrt(abs(rho)) / wb[j]          # psi(x0) real and positive
    psi = c * wb[:len(positions)]
    return psi, c


def eigenfunction_from_residue(g: MetricGraph, k_n, positions) -> np.ndarray:
    """Normalised eigenfunction at ``positions`` from the residue of ``G`` at ``k_n``.

    The phase is fixed so that the wavefunction is real and positive at the
    point where it is largest among ``positions`` and a set of probe points
    (lead origins and edge midpoints).

    Raises
    ------
    NotARoot
        ``M(k_n)`` is not numerically singular.
    DegeneratePole
        The null space is more than one dimensional or ``w^T M' v`` vanishes.
    """
    _require_conserving(g)
    psi, _ = _residue_eigenfunction(g, k_n, list(positions))
    return psi


def edge_grid(g: MetricGraph, points_per_edge: int = 201):
    """Gauss-Legendre nodes and weights on every edge, as ``(positions, weights)``."""
    x, wts = np.polynomial.legendre.leggauss(points_per_edge)
    pos, w = [], []
    for e in g.edges:
        for xi, wi in zip(x, wts):
            pos.append(Position.on_edge(e.id, 0.5 * e.length * (xi + 1)))
            w.append(0.5 * e.length * wi)
    return pos, np.array(w)


def norm_integral(g: MetricGraph, k_n, points_per_edge: int = 201) -> float:
    """``sum over edges and leads of the integral of |psi|^2`` for the residue eigenfunction.

    Edge integrals use Gauss-Legendre quadrature; lead tails use the exact
    ``|psi(0)|^2 / (2 kappa)``.
    """
    pos, w = edge_grid(g, points_per_edge)
    lead_pos = [Position.on_lead(l.id, 0.0) for l in g.leads]
    psi = eigenfunction_from_residue(g, k_n, pos + lead_pos)
    total = float(np.sum(w * np.abs(psi[:len(pos)]) ** 2))
    if lead_pos:
        kappa = complex(k_n).imag
        total += float(np.sum(np.abs(psi[len(pos):]) ** 2)) / (2 * kappa)
    return total
