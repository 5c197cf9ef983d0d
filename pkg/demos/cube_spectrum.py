"""Eigenvalues of the cube graph for two delta strengths, with degeneracies."""
import numpy as np

from qgreen import presets
from qgreen.spectral import find_eigenvalues

for gamma in (0.0, 1.0):
    res = find_eigenvalues(presets.cube(gamma), (0.0, 11.0))
    print(f"gamma = {gamma}")
    for r in res.roots:
        print(f"  k = {r.k.real:10.6f}   E = {r.k.real ** 2 / 2:10.5f}   multiplicity {r.multiplicity}")

# at gamma = 0 every root satisfies cos k = +-1 or +-1/3
res = find_eigenvalues(presets.cube(0.0), (0.0, 11.0))
print("cos k at gamma = 0:", np.round(np.cos(res.values.real), 6))
