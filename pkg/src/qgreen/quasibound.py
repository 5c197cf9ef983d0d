"""Quasi-bound states of open graphs.

An incoming wave from a lead with wavenumber close to a quasi-bound level
is strongly amplified inside the region where the level is localised.  The
amplitude ``A`` of the forward travelling wave at the start of an edge,
as a function of real ``k``, therefore shows peaks whose half-height width
``Gamma`` (measured on ``|A|^2``) sets the lifetime ``1 / Gamma``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, signal

from .errors import NotUnitModulus
from .graph import MetricGraph, Position
from .pathsum import (_check_poles, _karray, _source_vector, lead_smatrix, propagation_matrix,
                      vertex_smatrices)

UNIT_TOL = 1e-8


def transition_amplitude(g: MetricGraph, src_lead, target_edge, k, check: bool = True):
    """Amplitude for a wave entering through ``src_lead`` to run forward along ``target_edge``.

    This is the coefficient ``A`` in
    ``G(x, 0; k) = (A exp(i k x) + A' exp(i k (l - x))) / (i k)`` for ``x``
    on the target edge, measured in the edge's stored orientation and with
    the source at the lead anchor.  For a chain it equals the transmission
    into the edge divided by the multiple-reflection denominator of that edge.

    Returns
    -------
    complex or ndarray
    """
    g.lead(src_lead)
    e = g.edge_index.get(target_edge)
    if e is None:
        g.edge(target_edge)
    ks, scalar = _karray(k)
    smats = vertex_smatrices(g, ks)
    M = np.eye(g.layout.n_directed) - propagation_matrix(g, ks, smats)
    if check:
        _check_poles(ks, M)
    u = _source_vector(g, ks, Position.on_lead(src_lead), smats)
    y = np.linalg.solve(np.swapaxes(M, -1, -2), u[..., None])[..., 0]
    A = y[:, 2 * e]
    return complex(A[0]) if scalar else A


def reflection_phase(g: MetricGraph, lead, k, unwrap: bool = False):
    """Phase ``phi_R`` of the reflection amplitude ``R = exp(i phi_R)`` on ``lead``.

    Parameters
    ----------
    unwrap : bool
        Return a continuous phase along the (sorted) ``k`` samples instead
        of principal values in ``(-pi, pi]``.

    Raises
    ------
    NotUnitModulus
        ``| |R| - 1 |`` exceeds ``1e-8``: some flux leaves through other leads.
    """
    a = g.lead_index.get(lead)
    if a is None:
        g.lead(lead)
    ks, scalar = _karray(k)
    R = lead_smatrix(g, ks)[:, a, a]
    dev = np.abs(np.abs(R) - 1.0)
    if np.any(dev > UNIT_TOL):
        raise NotUnitModulus(f"|R| differs from 1 by {dev.max():.3g}; the lead is not totally reflecting")
    phi = np.angle(R)
    if unwrap:
        phi = np.unwrap(phi)
    else:
        phi = np.where(phi <= -np.pi, np.pi, phi)
    return float(phi[0]) if scalar else phi


@dataclass
class Resonance:
    """Quasi-bound level seen as a peak of ``|A|^2``.

    Attributes
    ----------
    k_qb : float
    gamma : float
        Full width at half maximum of the dominant ``|A|^2`` peak.
    peak : float
        Height of that peak.
    edge : hashable
        Edge carrying the dominant peak.
    localization : dict
        ``|A_e(k_qb)|^2`` for every scanned edge.
    widths : dict
        Half-height width of the peak on each edge where it was resolved.
    """

    k_qb: float
    gamma: float
    peak: float
    edge: object
    localization: dict = field(default_factory=dict)
    widths: dict = field(default_factory=dict)

    @property
    def energy(self) -> float:
        return 0.5 * self.k_qb ** 2

    @property
    def lifetime(self) -> float:
        return 1.0 / self.gamma


def _half_width(k, y, i, level):
    """Interpolated crossings of ``level`` on both sides of index ``i``; ``None`` if not resolved."""
    j = i
    while j > 0 and y[j] > level:
        j -= 1
    if y[j] > level:
        return None
    left = k[j] + (level - y[j]) * (k[j + 1] - k[j]) / (y[j + 1] - y[j])
    j = i
    while j < len(y) - 1 and y[j] > level:
        j += 1
    if y[j] > level:
        return None
    right = k[j - 1] + (level - y[j - 1]) * (k[j] - k[j - 1]) / (y[j] - y[j - 1])
    return left, right


def _peaks_on_edge(g, src_lead, edge, ks, a2, prominence, window):
    out = []
    # the floor only discards rounding-level ripples on flat curves
    idx, _ = signal.find_peaks(a2, prominence=1e-9 * float(np.max(a2)))
    for i in idx:
        f = lambda x: -abs(transition_amplitude(g, src_lead, edge, x, check=False)) ** 2
        opt = optimize.minimize_scalar(f, bounds=(ks[i - 1], ks[i + 1]), method="bounded",
                                       options={"xatol": 1e-12})
        kq, peak = float(opt.x), -float(opt.fun)
        if peak < a2[i]:
            kq, peak = float(ks[i]), float(a2[i])
        hw = _half_width(ks, a2, i, 0.5 * peak)
        if hw is None:
            continue
        gamma = hw[1] - hw[0]
        if gamma <= 0:
            continue
        sel = (ks >= kq - window * gamma) & (ks <= kq + window * gamma)
        if peak <= prominence * np.median(a2[sel]):
            continue
        out.append((kq, gamma, peak))
    return out


def scan_transition(g: MetricGraph, src_lead, edges, k_grid) -> dict:
    """``|A_e(k)|^2`` on ``k_grid`` for every edge in ``edges``."""
    ks = np.asarray(k_grid, dtype=float)
    return {e: np.abs(transition_amplitude(g, src_lead, e, ks, check=False)) ** 2 for e in edges}


def find_quasibound(g: MetricGraph, src_lead, target_edges=None, k_range=(0.1, 10.0),
                    samples: int = 4000, prominence: float = 2.0, window: float = 5.0) -> list:
    """Resonances seen from ``src_lead`` as peaks of ``|A_e|^2`` on the target edges.

    Parameters
    ----------
    target_edges : sequence, optional
        Edges to scan (all edges by default).
    k_range : (float, float)
    samples : int
        Grid size of the initial scan.
    prominence : float
        A peak is kept if it exceeds ``prominence`` times the median of
        ``|A|^2`` within ``window`` widths on either side.
    window : float

    Returns
    -------
    list of Resonance
        Sorted by ``k_qb``; peaks found on several edges are merged and
        described by the edge where they are highest.
    """
    edges = list(target_edges) if target_edges is not None else [e.id for e in g.edges]
    for e in edges:
        g.edge(e)
    ks = np.linspace(float(k_range[0]), float(k_range[1]), int(samples))
    ks = ks[ks > 0]
    scans = scan_transition(g, src_lead, edges, ks)
    found = []
    for e in edges:
        for kq, gamma, peak in _peaks_on_edge(g, src_lead, e, ks, scans[e], prominence, window):
            found.append((kq, gamma, peak, e))
    found.sort()
    groups = []
    for item in found:
        if groups and abs(item[0] - groups[-1][-1][0]) < 0.5 * min(item[1], groups[-1][-1][1]):
            groups[-1].append(item)
        else:
            groups.append([item])
    out = []
    for grp in groups:
        kq, gamma, peak, e = max(grp, key=lambda t: t[2])
        loc = {ed: float(abs(transition_amplitude(g, src_lead, ed, kq, check=False)) ** 2) for ed in edges}
        out.append(Resonance(kq, gamma, peak, e, loc, {it[3]: it[1] for it in grp}))
    return out
