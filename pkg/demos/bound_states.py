"""Bound states of a vertex with two leads and a dead-end edge, from the poles of G.

The residue eigenfunction is compared with the one obtained by direct
wave matching; both are normalised over the edge and the two leads.
"""
import numpy as np

from qgreen import presets
from qgreen.graph import Position
from qgreen.oracle import normalized_direct_eigenfunction
from qgreen.spectral import eigenfunction_from_residue, find_bound_states, norm_integral

g = presets.tadpole(gamma=-1.5, lam=-2.0, length=1.0)
res = find_bound_states(g, (0.0, 10.0))

xs = np.linspace(0.0, 1.0, 6)
edge = [Position.on_edge(1, x) for x in xs]
lead = [Position.on_lead("i", x) for x in xs]
for r in res.roots:
    psi = eigenfunction_from_residue(g, r.k, edge + lead)
    ref = normalized_direct_eigenfunction(g, r.k, edge + lead)
    print(f"kappa = {r.kappa:.6f}   norm = {norm_integral(g, r.k):.10f}")
    print("  |psi| on edge :", np.round(np.abs(psi[:6]), 5))
    print("  |psi| on lead :", np.round(np.abs(psi[6:]), 5))
    print("  max deviation from direct solution:", f"{np.max(np.abs(np.abs(psi) - np.abs(ref))):.1e}")
