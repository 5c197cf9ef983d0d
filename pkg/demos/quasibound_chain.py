"""Resonances of a six-vertex chain closed by a wall, seen through |A_l(k)|^2.

Writes ``chain_transition.csv`` with the full sweep for plotting.
"""
import csv

import numpy as np

from qgreen import presets
from qgreen.quasibound import find_quasibound, scan_transition

for bc in ("dirichlet", "neumann"):
    for gamma in (1.0, 2.0):
        g = presets.chain(6, gamma, bc)
        print(f"{bc} end, gamma = {gamma}")
        for r in find_quasibound(g, "i", None, (3.5, 5.0), 4000):
            loc = "  ".join(f"{r.localization[e]:6.2f}" for e in range(1, 6))
            print(f"  k_qb = {r.k_qb:.4f}  Gamma = {r.gamma:.4f}  tau = {r.lifetime:7.2f}  |A|^2: {loc}")

g = presets.chain(6, 2.0, "dirichlet")
ks = np.linspace(0.1, 8.0, 4000)
scan = scan_transition(g, "i", [1, 2, 3, 4, 5], ks)
with open("chain_transition.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["k"] + [f"abs_A2_{e}" for e in scan])
    for i, k in enumerate(ks):
        w.writerow([f"{k:.15g}"] + [f"{scan[e][i]:.15g}" for e in scan])
