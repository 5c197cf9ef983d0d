"""Independent reference solvers used to validate the path-family engine.

Two routes are implemented without touching the family-system assembly:

* direct wave matching: plane-wave ansatz on every edge and lead, with the
  vertex boundary conditions imposed as linear equations;
* brute-force summation of scattering paths up to a given number of
  vertex scatterings.
"""
from __future__ import annotations

from collections import defaultdict

import numpy as np
from scipy import optimize

from .errors import ExplosionGuard, NotARoot, UnsupportedVertexFamily
from .graph import MetricGraph, Position
from .vertex import DeadEnd, Dirichlet, GeneralizedDelta, LineABCD, NeumannKirchhoff

PRUNE = 1e-14
PATH_CAP = 10_000_000


# ---------------------------------------------------------------------------
# wave matching

def _channels(g: MetricGraph):
    """Per vertex, list of ``("edge", e, end)`` or ``("lead", a)`` in channel order."""
    chans = {v: [] for v in g.vertices}
    for e, edge in enumerate(g.edges):
        chans[edge.origin].append(("edge", e, 0))
        chans[edge.terminus].append(("edge", e, 1))
    for a, lead in enumerate(g.leads):
        chans[lead.anchor].append(("lead", a))
    return chans


def _value_and_slope(g, ch, k):
    """Rows giving the channel value and outward derivative at the vertex."""
    ne, nl = len(g.edges), len(g.leads)
    val = np.zeros(2 * ne + nl, dtype=complex)
    der = np.zeros_like(val)
    if ch[0] == "lead":
        j = 2 * ne + ch[1]
        val[j] = 1.0
        der[j] = 1j * k
        return val, der
    _, e, end = ch
    ph = np.exp(1j * k * g.edges[e].length)
    ia, ib = 2 * e, 2 * e + 1
    if end == 0:
        val[ia], val[ib] = 1.0, ph
        der[ia], der[ib] = 1j * k, -1j * k * ph
    else:
        val[ia], val[ib] = ph, 1.0
        der[ia], der[ib] = -1j * k * ph, 1j * k
    return val, der


def matching_matrix(g: MetricGraph, k: complex) -> np.ndarray:
    """Boundary-condition matrix for the ansatz

        psi_e(x) = A_e exp(i k x) + B_e exp(i k (l_e - x)),   psi_a(x) = C_a exp(i k x)

    with unknowns ordered ``A_1, B_1, A_2, ..., C_1, ...``.

    Raises
    ------
    UnsupportedVertexFamily
        A vertex has no boundary-condition form (custom matrices).
    """
    k = complex(k)
    chans = _channels(g)
    rows = []
    for v in g.vertices:
        pi = g.interactions[v]
        vd = [_value_and_slope(g, ch, k) for ch in chans[v]]
        if type(pi) in (GeneralizedDelta, NeumannKirchhoff):
            gamma = getattr(pi, "gamma", 0.0)
            for val, _ in vd[1:]:
                rows.append(val - vd[0][0])
            rows.append(sum(d for _, d in vd) - 2.0 * gamma * vd[0][0])
        elif type(pi) is Dirichlet:
            rows.extend(val for val, _ in vd)
        elif type(pi) is DeadEnd:
            val, der = vd[0]
            rows.append(der - pi.lam * val)
        elif type(pi) is LineABCD:
            (v0, o0), (v1, o1) = vd
            # left side: psi'(0-) = -outward slope; right side: psi'(0+) = outward slope
            rows.append(v1 - pi.omega * (pi.a * v0 - pi.b * o0))
            rows.append(o1 - pi.omega * (pi.c * v0 - pi.d * o0))
        else:
            raise UnsupportedVertexFamily(f"no boundary condition known for {type(pi).__name__}")
    return np.array(rows)


def matching_determinant(g: MetricGraph, k: complex) -> complex:
    """Determinant of :func:`matching_matrix`; it vanishes at eigenvalues and bound states."""
    return complex(np.linalg.det(matching_matrix(g, k)))


def _rel_sigma(g, k):
    s = np.linalg.svd(matching_matrix(g, k), compute_uv=False)
    return s[-1] / s[0]


def _newton(g, k, direction):
    """Multiplicity-aware Newton polish on ``log det`` along ``direction``."""
    s = np.linalg.svd(matching_matrix(g, k), compute_uv=False)
    m = max(1, int(np.sum(s / s[0] < 1e-3)))
    best, best_res = k, s[-1] / s[0]
    for _ in range(15):
        h = 1e-7 * max(abs(k), 1.0)
        A = matching_matrix(g, k)
        dA = (matching_matrix(g, k + h) - matching_matrix(g, k - h)) / (2 * h)
        try:
            tr = np.trace(np.linalg.solve(A, dA))
        except np.linalg.LinAlgError:
            break
        if not np.isfinite(tr) or tr == 0:
            break
        step = m / tr
        step = direction * (step / direction).real
        k = k - step
        res = _rel_sigma(g, k)
        if res < best_res:
            best, best_res = k, res
        if abs(step) < 1e-15 * abs(k):
            break
    return best, best_res


def matching_roots(g: MetricGraph, lo: float, hi: float, imaginary: bool = False,
                   points_per_unit: int = 1000, tol: float = 1e-9) -> np.ndarray:
    """Distinct zeros of the matching determinant on ``[lo, hi]``.

    Real axis by default; with ``imaginary`` the search runs over
    ``k = i kappa`` and the returned values are ``kappa``.
    """
    direction = 1j if imaginary else 1.0
    lo = max(lo, 1e-4)
    n = max(int((hi - lo) * points_per_unit), 16)
    grid = np.linspace(lo, hi, n + 1)
    sig = np.array([_rel_sigma(g, direction * x) for x in grid])
    idx = np.where((sig[1:-1] <= sig[:-2]) & (sig[1:-1] <= sig[2:]))[0] + 1
    out = []
    for i in idx:
        opt = optimize.minimize_scalar(lambda x: _rel_sigma(g, direction * x), method="bounded",
                                       bounds=(grid[i - 1], grid[i + 1]), options={"xatol": 1e-12})
        k, res = _newton(g, direction * float(opt.x), direction)
        x = float((k / direction).real)
        if res < tol and lo <= x <= hi and all(abs(x - y) > 1e-7 for y in out):
            out.append(x)
    return np.array(sorted(out))


def _edge_coords(g, positions):
    for p in positions:
        g.check_position(p)
        yield p


def _evaluate(g, coef, k, positions):
    ne = len(g.edges)
    out = np.empty(len(positions), dtype=complex)
    for j, p in enumerate(_edge_coords(g, positions)):
        if p.kind == "edge":
            e = g.edge_index[p.id]
            ell = g.edges[e].length
            out[j] = coef[2 * e] * np.exp(1j * k * p.x) + coef[2 * e + 1] * np.exp(1j * k * (ell - p.x))
        else:
            a = g.lead_index[p.id]
            out[j] = coef[2 * ne + a] * np.exp(1j * k * p.x)
    return out


def normalized_direct_eigenfunction(g: MetricGraph, k_n: complex, positions,
                                    quad_points: int = 201, tol: float = 1e-8) -> np.ndarray:
    """Normalised eigenfunction from the null space of the matching matrix.

    ``k_n`` is the complex root (``i kappa`` for a bound state).  The norm
    integrates edges with Gauss-Legendre quadrature and lead tails exactly,
    ``|C|^2 / (2 kappa)``.  The global phase makes the largest sample real
    and positive.

    Raises
    ------
    NotARoot
    """
    k_n = complex(k_n)
    A = matching_matrix(g, k_n)
    _, s, Vh = np.linalg.svd(A)
    if s[-1] / s[0] > tol:
        raise NotARoot(f"k={k_n!r}: matching matrix not singular ({s[-1] / s[0]:.3g})")
    coef = np.conj(Vh[-1])
    x, w = np.polynomial.legendre.leggauss(quad_points)
    norm = 0.0
    for e, edge in enumerate(g.edges):
        xs = 0.5 * edge.length * (x + 1)
        psi = coef[2 * e] * np.exp(1j * k_n * xs) + coef[2 * e + 1] * np.exp(1j * k_n * (edge.length - xs))
        norm += 0.5 * edge.length * np.sum(w * np.abs(psi) ** 2)
    ne = len(g.edges)
    for a in range(len(g.leads)):
        norm += abs(coef[2 * ne + a]) ** 2 / (2 * k_n.imag)
    coef = coef / np.sqrt(norm)
    vals = _evaluate(g, coef, k_n, list(positions))
    if len(vals):
        j = int(np.argmax(np.abs(vals)))
        vals = vals * abs(vals[j]) / vals[j]
    return vals


# ---------------------------------------------------------------------------
# path enumeration

def _outlets(g):
    """For every vertex: list over channels of ``("lead", a)`` or ``("edge", e, end)``."""
    return _channels(g)


def _entry_waves(g, src: Position, k):
    """Waves leaving the source towards vertices: ``(vertex, channel, amplitude)``."""
    chans = _outlets(g)
    out = []
    if src.kind == "lead":
        a = g.lead_index[src.id]
        v = g.leads[a].anchor
        out.append((v, chans[v].index(("lead", a)), np.exp(1j * k * src.x)))
    else:
        e = g.edge_index[src.id]
        edge = g.edges[e]
        out.append((edge.origin, chans[edge.origin].index(("edge", e, 0)), np.exp(1j * k * src.x)))
        out.append((edge.terminus, chans[edge.terminus].index(("edge", e, 1)),
                    np.exp(1j * k * (edge.length - src.x))))
    return out


def truncated_pathsum(g: MetricGraph, src: Position, dst: Position, k: complex, depth: int,
                      merge: bool = True, cap: int = PATH_CAP, prune: float = PRUNE) -> complex:
    """Green's function summed over scattering paths with at most ``depth`` vertex hits.

    Parameters
    ----------
    merge : bool
        Combine partial paths that reach the same vertex channel after the
        same number of scatterings before continuing.  This is the exact
        same partial sum, computed without enumerating paths one by one.
        With ``merge=False`` every path is followed individually.
    cap : int
        Maximum number of path continuations before :class:`ExplosionGuard`.
    prune : float
        Partial paths with weight below this are dropped.
    """
    g.check_position(src)
    g.check_position(dst)
    k = complex(k)
    chans = _outlets(g)
    deg = {v: len(chans[v]) for v in g.vertices}
    smat = {v: g.interactions[v].smatrix(k, deg[v]) for v in g.vertices}
    other_end = {}
    for e, edge in enumerate(g.edges):
        other_end[(e, 0)] = (edge.terminus, chans[edge.terminus].index(("edge", e, 1)))
        other_end[(e, 1)] = (edge.origin, chans[edge.origin].index(("edge", e, 0)))

    total = 0j
    if src.kind == dst.kind and src.id == dst.id:
        total += np.exp(1j * k * abs(dst.x - src.x))
    dst_idx = g.edge_index[dst.id] if dst.kind == "edge" else g.lead_index[dst.id]

    front = [(v, c, a) for v, c, a in _entry_waves(g, src, k)]
    work = 0
    for _ in range(depth):
        nxt = defaultdict(complex) if merge else []
        for v, c, amp in front:
            S = smat[v]
            for c2, ch in enumerate(chans[v]):
                a = S[c2, c] * amp
                work += 1
                if work > cap:
                    raise ExplosionGuard(f"more than {cap} path continuations")
                if ch[0] == "lead":
                    if dst.kind == "lead" and ch[1] == dst_idx:
                        total += a * np.exp(1j * k * dst.x)
                    continue
                _, e, end = ch
                ell = g.edges[e].length
                if dst.kind == "edge" and e == dst_idx:
                    total += a * np.exp(1j * k * (dst.x if end == 0 else ell - dst.x))
                a = a * np.exp(1j * k * ell)
                if abs(a) < prune:
                    continue
                w, c3 = other_end[(e, end)]
                if merge:
                    nxt[(w, c3)] += a
                else:
                    nxt.append((w, c3, a))
        front = [(v, c, a) for (v, c), a in nxt.items()] if merge else nxt
        if not front:
            break
    return total / (1j * k)
