"""Block composition: effective vertices and self-similar recursions.

A sub-graph seen from outside behaves like a single vertex whose scattering
matrix acts on the channels crossing the block boundary.  This module
computes such effective vertices for arbitrary blocks and implements the
closed recursions for linear chains, the diamond binary tree and the
Sierpinski gasket, which scale linearly in the number of stages instead of
with the size of the explicit graph.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BoundaryMismatch, ResonantDenominatorWarning
from .graph import MetricGraph, build_graph
from .pathsum import lead_smatrix
from .vertex import CustomMatrix, PointInteraction

RESONANT_TOL = 1e-12


def _warn_small(den, what):
    den = np.asarray(den)
    if np.any(np.abs(den) < RESONANT_TOL):
        warnings.warn(f"{what}: denominator below {RESONANT_TOL:g}; k is a spectral point",
                      ResonantDenominatorWarning, stacklevel=3)


@dataclass(frozen=True)
class ScatterBlock:
    """Two-sided scattering block.

    ``+`` amplitudes describe incidence from the left, ``-`` from the right:
    ``R_plus`` reflects back to the left and ``T_plus`` transmits to the right.
    Entries may be scalars or arrays broadcast over a k grid.
    """

    R_plus: complex
    R_minus: complex
    T_plus: complex
    T_minus: complex

    @classmethod
    def symmetric(cls, r, t) -> "ScatterBlock":
        return cls(r, r, t, t)

    @classmethod
    def from_smatrix(cls, S, left: int = 0, right: int = 1) -> "ScatterBlock":
        """Read a block out of a ``(..., 2, 2)`` matrix with the given channel roles."""
        S = np.asarray(S)
        return cls(S[..., left, left], S[..., right, right], S[..., right, left], S[..., left, right])

    @property
    def smatrix(self) -> np.ndarray:
        """``[[R+, T-], [T+, R-]]`` with channel 0 on the left."""
        R_p, R_m, T_p, T_m = np.broadcast_arrays(self.R_plus, self.R_minus, self.T_plus, self.T_minus)
        return np.stack([np.stack([R_p, T_m], -1), np.stack([T_p, R_m], -1)], -2)


# ---------------------------------------------------------------------------
# generic blocks

@dataclass(frozen=True)
class _Permuted(PointInteraction):
    """Interaction with its channels relabelled: new channel ``i`` is old ``perm[i]``."""

    base: PointInteraction
    perm: tuple

    @property
    def flux_conserving(self):
        return self.base.flux_conserving

    def check_degree(self, n):
        self.base.check_degree(n)

    def smatrix(self, k, n):
        p = np.asarray(self.perm)
        return self.base.smatrix(k, n)[..., p[:, None], p[None, :]]


def _crossing(g: MetricGraph, inside: set):
    cross_edges = [e.id for e in g.edges if (e.origin in inside) != (e.terminus in inside)]
    inner_leads = [l.id for l in g.leads if l.anchor in inside]
    return cross_edges, inner_leads


def _subgraph(g: MetricGraph, vertices, boundary):
    inside = set(vertices)
    for v in inside:
        g.interaction(v)
    cross_edges, inner_leads = _crossing(g, inside)
    if sorted(map(repr, boundary)) != sorted(map(repr, cross_edges + inner_leads)) or \
            len(set(boundary)) != len(boundary):
        raise BoundaryMismatch(
            f"boundary {list(boundary)!r} differs from the crossing channels "
            f"{cross_edges + inner_leads!r}")
    lay = g.layout
    edges = [e for e in g.edges if e.origin in inside and e.terminus in inside]
    leads = []
    # old channel index of every new channel at each inside vertex
    old_order = {v: [] for v in inside}
    for e in edges:
        ei = g.edge_index[e.id]
        old_order[e.origin].append(lay.end_channel[ei, 0])
        old_order[e.terminus].append(lay.end_channel[ei, 1])
    for name in boundary:
        if name in g.edge_index and name in cross_edges:
            ei = g.edge_index[name]
            e = g.edges[ei]
            s = 0 if e.origin in inside else 1
            anchor = (e.origin, e.terminus)[s]
            old_order[anchor].append(lay.end_channel[ei, s])
        else:
            anchor = g.lead(name).anchor
            old_order[anchor].append(lay.lead_channel[g.lead_index[name]])
        leads.append({"id": ("boundary", name), "anchor": anchor})
    inter = {}
    for v in inside:
        perm = tuple(int(c) for c in old_order[v])
        pi = g.interactions[v]
        inter[v] = pi if perm == tuple(range(len(perm))) else _Permuted(pi, perm)
    verts = [v for v in g.vertices if v in inside]
    return build_graph({"vertices": verts, "edges": edges, "leads": leads, "interactions": inter})


def effective_vertex(g: MetricGraph, vertices, boundary: Sequence, k) -> np.ndarray:
    """Scattering matrix of the block spanned by ``vertices``.

    Parameters
    ----------
    g : MetricGraph
    vertices : iterable of vertex ids
        The block.  Every edge with both ends inside belongs to it.
    boundary : sequence of edge or lead ids
        Channels crossing the block boundary, in the order wanted for the
        rows and columns of the result.
    k : complex or array_like

    Raises
    ------
    BoundaryMismatch
        ``boundary`` is not exactly the set of crossing edges and inside leads.
    """
    sub = _subgraph(g, vertices, list(boundary))
    return lead_smatrix(sub, k)


def reduce_graph(g: MetricGraph, vertices, new_id="block") -> MetricGraph:
    """Replace a block of ``g`` by one vertex carrying its effective S-matrix."""
    inside = set(vertices)
    cross_edges, inner_leads = _crossing(g, inside)
    boundary = cross_edges + inner_leads
    sub = _subgraph(g, inside, boundary)

    def provider(k, _sub=sub):
        return lead_smatrix(_sub, k, check=False)

    verts = [v for v in g.vertices if v not in inside] + [new_id]
    edges = []
    for e in g.edges:
        if e.origin in inside and e.terminus in inside:
            continue
        o = new_id if e.origin in inside else e.origin
        t = new_id if e.terminus in inside else e.terminus
        edges.append({"id": e.id, "from": o, "to": t, "length": e.length})
    leads = [{"id": l.id, "anchor": new_id if l.anchor in inside else l.anchor} for l in g.leads]
    inter = {v: g.interactions[v] for v in g.vertices if v not in inside}
    inter[new_id] = CustomMatrix(provider, flux_conserving=sub.flux_conserving)
    return build_graph({"vertices": verts, "edges": edges, "leads": leads, "interactions": inter})


# ---------------------------------------------------------------------------
# chains

def chain_extend(block: ScatterBlock, ell: float, v: ScatterBlock, k) -> ScatterBlock:
    """Append vertex ``v`` to the right of ``block`` through an edge of length ``ell``.

    Warns with :class:`ResonantDenominatorWarning` when the multiple
    reflection denominator vanishes.
    """
    k = np.asarray(k, dtype=complex)
    e1 = np.exp(1j * k * ell)
    e2 = e1 * e1
    den = 1.0 - block.R_minus * v.R_plus * e2
    _warn_small(den, "chain_extend")
    return ScatterBlock(
        block.R_plus + block.T_plus * v.R_plus * block.T_minus * e2 / den,
        v.R_minus + v.T_minus * block.R_minus * v.T_plus * e2 / den,
        block.T_plus * v.T_plus * e1 / den,
        block.T_minus * v.T_minus * e1 / den,
    )


def chain_coefficients(blocks: Sequence[ScatterBlock], lengths: Sequence[float], k) -> ScatterBlock:
    """Fold a chain ``blocks[0] - l0 - blocks[1] - l1 - ...`` into one block."""
    if len(lengths) != len(blocks) - 1:
        raise ValueError("need one length per link between consecutive blocks")
    out = blocks[0]
    for ell, b in zip(lengths, blocks[1:]):
        out = chain_extend(out, ell, b, k)
    return out


# ---------------------------------------------------------------------------
# self-similar families

def _amp(x, k):
    return x(k) if callable(x) else x


def _triangle(r, t, phase):
    """Closed-form reflection and transmission of a triangle of identical scatterers."""
    d = (1.0 - (r + t) * phase) * (1.0 + t * phase + (t * t - r * r) * phase ** 2)
    _warn_small(d, "sierpinski")
    R = r + 2 * t * t * (r + (t * t - r * r) * phase) * phase ** 2 / d
    T = t * t * (1.0 + (t - r) * phase) * phase / d
    return R, T


def sierpinski_coefficients(n: int, r, t, ell: float, k):
    """Reflection and transmission of the stage-``n`` Sierpinski gasket.

    Parameters
    ----------
    n : int
        Stage, ``n >= 1``.  Stage 1 is a triangle of side ``ell``; stage
        ``n + 1`` joins three stage-``n`` gaskets of size ``ell / 3`` with
        edges of length ``ell / 3``.
    r, t : complex, array or callable
        Reflection and transmission of the identical elementary vertices;
        callables are evaluated at ``k``.
    ell : float
        Overall size, equal to the stage-1 triangle side.
    k : complex or array_like

    Returns
    -------
    R_n, T_n
    """
    if n < 1:
        raise ValueError("stage must be >= 1")
    k = np.asarray(k, dtype=complex)
    if n == 1:
        return _triangle(_amp(r, k), _amp(t, k), np.exp(1j * k * ell))
    R, T = sierpinski_coefficients(n - 1, r, t, ell / 3.0, k)
    return _triangle(R, T, np.exp(1j * k * ell / 3.0))


def _diamond(rA, tA, rB, tB, rD, tD, phase2):
    """Solve the four-family system of a diamond with blocks (rB, tB) on both arms."""
    shape = np.broadcast(rA, tA, rB, tB, rD, tD, phase2).shape
    rA, tA, rB, tB, rD, tD, E = (np.broadcast_to(np.asarray(x, dtype=complex), shape)
                                 for x in (rA, tA, rB, tB, rD, tD, phase2))
    # P = E * (W @ P + w_exit); unknowns ordered P1 (A->B), P2 (A->C), P3 (D->B), P4 (D->C)
    W = np.stack([
        np.stack([rB * rA, rB * tA, tB * rD, tB * tD], -1),
        np.stack([rB * tA, rB * rA, tB * tD, tB * rD], -1),
        np.stack([tB * rA, tB * tA, rB * rD, rB * tD], -1),
        np.stack([tB * tA, tB * rA, rB * tD, rB * rD], -1),
    ], -2)
    M = np.eye(4) - E[..., None, None] * W
    det = np.linalg.det(M)
    _warn_small(det, "binary tree")
    # exits: through lead i at A (reflection) or lead f at D (transmission)
    exit_R = E[..., None] * np.stack([rB * tA, rB * tA, tB * tA, tB * tA], -1)
    exit_T = E[..., None] * np.stack([tB * tD, tB * tD, rB * tD, rB * tD], -1)
    P_R = np.linalg.solve(M, exit_R[..., None])[..., 0]
    P_T = np.linalg.solve(M, exit_T[..., None])[..., 0]
    R = rA + tA * (P_R[..., 0] + P_R[..., 1])
    T = tA * (P_T[..., 0] + P_T[..., 1])
    return R, T


def _pair(spec, k, n):
    if isinstance(spec, PointInteraction):
        return spec.amplitudes(k, n)
    r, t = spec
    return _amp(r, k), _amp(t, k)


def binary_tree_coefficients(level: int, junction, link, ell: float, k):
    """Reflection and transmission of the level-``level`` diamond binary tree.

    Level 0 is a diamond: junction ``A`` (lead ``i``) feeds two link
    vertices ``B`` and ``C``, which both feed junction ``D`` (lead ``f``),
    all edges of length ``ell``.  Level ``l`` replaces ``B`` and ``C`` by
    level ``l - 1`` trees.

    Parameters
    ----------
    level : int
    junction, link : PointInteraction or (r, t)
        Amplitudes of the degree-3 junctions and of the degree-2 link
        vertices.  Tuples may hold values, arrays or callables of ``k``.
    ell : float
    k : complex or array_like
    """
    if level < 0:
        raise ValueError("level must be >= 0")
    k = np.asarray(k, dtype=complex)
    rA, tA = _pair(junction, k, 3)
    R, T = _pair(link, k, 2)
    phase2 = np.exp(2j * k * ell)
    for _ in range(level + 1):
        R, T = _diamond(rA, tA, R, T, rA, tA, phase2)
    return R, T
