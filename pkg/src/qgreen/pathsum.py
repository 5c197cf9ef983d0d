"""Exact Green's functions from the directed-edge path-family system.

Every scattering path from a source to a target leaves the source, hits a
vertex and then runs along a sequence of directed edges.  Grouping the
paths by their first directed edge ``d`` gives one family amplitude ``P_d``
per directed edge.  A family either stops at the target on ``d`` itself or
reaches the head vertex of ``d`` and scatters into the next family, which
gives the linear system

    P_d = b_d + exp(i k l_d) * sum_c S_v[c, h(d)] P_out(v, c)

with ``v`` the head of ``d`` and ``h(d)`` its arrival channel there.  In
matrix form ``M P = b`` with ``M = 1 - T``.  The Green's function is then

    G = (free + direct + u . P) / (i k)

where ``u`` collects the first vertex scattering out of the source.

All routines accept a scalar ``k`` or a 1d array of wavenumbers and
evaluate the whole batch with stacked linear algebra.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoLeads, PoleAtK, ZeroWavenumber
from .graph import MetricGraph, Position

POLE_CONDITION = 1e12


def _karray(k):
    k = np.asarray(k, dtype=complex)
    scalar = k.ndim == 0
    k = np.atleast_1d(k)
    if k.ndim != 1:
        raise ValueError("k must be a scalar or a 1d array")
    if np.any(k == 0):
        raise ZeroWavenumber("k = 0 is excluded (the Green prefactor is 1/(ik))")
    return k, scalar


def vertex_smatrices(g: MetricGraph, k: np.ndarray) -> list:
    """Per-vertex scattering matrices, each of shape ``(len(k), N, N)``."""
    deg = g.layout.degree
    return [g.interactions[v].smatrix(k, int(deg[i])) for i, v in enumerate(g.vertices)]


def propagation_matrix(g: MetricGraph, k: np.ndarray, smats=None) -> np.ndarray:
    """The one-step operator ``T`` of the family system, shape ``(nk, D, D)``."""
    lay = g.layout
    nd = lay.n_directed
    smats = vertex_smatrices(g, k) if smats is None else smats
    T = np.zeros((len(k), nd, nd), dtype=complex)
    if nd == 0:
        return T
    phase = np.exp(1j * k[:, None] * np.repeat(lay.lengths, 2)[None, :])
    for v in range(len(g.vertices)):
        inc = lay.incoming(v)
        out = lay.outgoing(v)
        if not inc or not out:
            continue
        rows = np.repeat(inc, len(out))
        hc = np.repeat([lay.head_channel(d) for d in inc], len(out))
        chans = np.tile([c for c, _ in out], len(inc))
        cols = np.tile([d for _, d in out], len(inc))
        T[:, rows, cols] = phase[:, rows] * smats[v][:, chans, hc]
    return T


def family_matrix(g: MetricGraph, k, smats=None) -> np.ndarray:
    """``M(k) = 1 - T(k)`` batched over ``k``."""
    k, _ = _karray(k)
    T = propagation_matrix(g, k, smats)
    return np.eye(T.shape[-1]) - T


def _target_vector(g, k, dst: Position, smats):
    """Right-hand side ``b`` and the arrival phase bookkeeping for ``dst``."""
    lay = g.layout
    b = np.zeros((len(k), lay.n_directed), dtype=complex)
    if dst.kind == "edge":
        e = g.edge_index[dst.id]
        ell = lay.lengths[e]
        b[:, 2 * e] += np.exp(1j * k * dst.x)
        b[:, 2 * e + 1] += np.exp(1j * k * (ell - dst.x))
    else:
        a = g.lead_index[dst.id]
        v = lay.lead_vertex[a]
        lc = lay.lead_channel[a]
        for d in lay.incoming(v):
            ell = lay.lengths[d // 2]
            b[:, d] += np.exp(1j * k * (ell + dst.x)) * smats[v][:, lc, lay.head_channel(d)]
    return b


def _arrivals(g, k, src: Position):
    """Waves leaving the source: list of ``(vertex, channel, amplitude)``."""
    lay = g.layout
    if src.kind == "edge":
        e = g.edge_index[src.id]
        ell = lay.lengths[e]
        return [(lay.edge_vertex[e, 0], lay.end_channel[e, 0], np.exp(1j * k * src.x)),
                (lay.edge_vertex[e, 1], lay.end_channel[e, 1], np.exp(1j * k * (ell - src.x)))]
    a = g.lead_index[src.id]
    return [(lay.lead_vertex[a], lay.lead_channel[a], np.exp(1j * k * src.x))]


def _source_vector(g, k, src: Position, smats):
    lay = g.layout
    u = np.zeros((len(k), lay.n_directed), dtype=complex)
    for v, c, amp in _arrivals(g, k, src):
        for chan, d in lay.outgoing(v):
            u[:, d] += smats[v][:, chan, c] * amp
    return u


def _direct_term(g, k, src: Position, dst: Position, smats):
    """Free propagation plus single-scattering paths that never enter an edge."""
    out = np.zeros(len(k), dtype=complex)
    if src.kind == dst.kind and src.id == dst.id:
        out += np.exp(1j * k * abs(dst.x - src.x))
    if dst.kind == "lead":
        lay = g.layout
        a = g.lead_index[dst.id]
        v, lc = lay.lead_vertex[a], lay.lead_channel[a]
        for w, c, amp in _arrivals(g, k, src):
            if w == v:
                out += amp * smats[v][:, lc, c] * np.exp(1j * k * dst.x)
    return out


def _check_poles(k, M):
    if M.shape[-1] == 0:
        return
    cond = np.linalg.cond(M)
    bad = ~np.isfinite(cond) | (cond > POLE_CONDITION)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise PoleAtK(complex(k[i]), float(cond[i]))


@dataclass
class FamilySystem:
    """Family-amplitude linear system ``matrix @ P = rhs`` at one wavenumber.

    Attributes
    ----------
    k : complex
    matrix : ndarray, shape (D, D)
        ``1 - T`` with ``D = 2 |edges|``; unknown ``2 e`` is edge ``e`` in its
        stored orientation, ``2 e + 1`` the reverse direction.
    rhs : ndarray, shape (D,)
        Injection terms for the target position.
    """

    k: complex
    matrix: np.ndarray
    rhs: np.ndarray
    target: Position

    def solve(self) -> np.ndarray:
        _check_poles(np.array([self.k]), self.matrix[None])
        return np.linalg.solve(self.matrix, self.rhs)


def assemble_family_system(g: MetricGraph, k: complex, target: Position) -> FamilySystem:
    """Assemble the family system for the target position ``target``.

    Raises
    ------
    ZeroWavenumber
    """
    g.check_position(target)
    ks, _ = _karray(k)
    smats = vertex_smatrices(g, ks)
    M = np.eye(g.layout.n_directed) - propagation_matrix(g, ks, smats)
    b = _target_vector(g, ks, target, smats)
    return FamilySystem(complex(ks[0]), M[0], b[0], target)


def green(g: MetricGraph, src: Position, dst: Position, k, check: bool = True):
    """Energy-domain Green's function ``G(dst, src; E = k^2/2)``.

    Parameters
    ----------
    g : MetricGraph
    src, dst : Position
    k : complex or array_like
        Wavenumber(s); ``Im k >= 0`` gives the physical (outgoing) branch.
    check : bool
        Raise :class:`PoleAtK` when the family matrix is numerically singular.

    Returns
    -------
    complex or ndarray
    """
    g.check_position(src)
    g.check_position(dst)
    ks, scalar = _karray(k)
    smats = vertex_smatrices(g, ks)
    M = np.eye(g.layout.n_directed) - propagation_matrix(g, ks, smats)
    total = _direct_term(g, ks, src, dst, smats)
    if M.shape[-1]:
        if check:
            _check_poles(ks, M)
        b = _target_vector(g, ks, dst, smats)
        u = _source_vector(g, ks, src, smats)
        P = np.linalg.solve(M, b[..., None])[..., 0]
        total = total + np.einsum("kd,kd->k", u, P)
    val = total / (1j * ks)
    return complex(val[0]) if scalar else val


def lead_smatrix(g: MetricGraph, k, check: bool = True):
    """Global scattering matrix between leads.

    Entry ``[b, a]`` is the amplitude for a wave entering through lead ``a``
    to leave through lead ``b``; leads are ordered as declared.

    Returns
    -------
    ndarray, shape (L, L) or (nk, L, L)

    Raises
    ------
    NoLeads, PoleAtK, ZeroWavenumber
    """
    if not g.leads:
        raise NoLeads("graph has no leads")
    ks, scalar = _karray(k)
    lay = g.layout
    smats = vertex_smatrices(g, ks)
    nl = len(g.leads)
    nk = len(ks)
    S = np.zeros((nk, nl, nl), dtype=complex)
    for a in range(nl):
        for b in range(nl):
            if lay.lead_vertex[a] == lay.lead_vertex[b]:
                v = lay.lead_vertex[a]
                S[:, b, a] = smats[v][:, lay.lead_channel[b], lay.lead_channel[a]]
    nd = lay.n_directed
    if nd:
        M = np.eye(nd) - propagation_matrix(g, ks, smats)
        if check:
            _check_poles(ks, M)
        U = np.zeros((nk, nl, nd), dtype=complex)
        B = np.zeros((nk, nd, nl), dtype=complex)
        for a, lead in enumerate(g.leads):
            pos = Position.on_lead(lead.id)
            U[:, a, :] = _source_vector(g, ks, pos, smats)
            B[:, :, a] = _target_vector(g, ks, pos, smats)
        S += U @ np.linalg.solve(M, B)
    return S[0] if scalar else S


def unitarity_defect(S: np.ndarray) -> np.ndarray:
    """Spectral norm of ``S S^+ - 1`` for a stack of square matrices."""
    n = S.shape[-1]
    prod = S @ np.conj(np.swapaxes(S, -1, -2))
    return np.linalg.norm(prod - np.eye(n), ord=2, axis=(-2, -1))
