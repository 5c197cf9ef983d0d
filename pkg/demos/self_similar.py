"""Closed-form recursions for the Sierpinski gasket and the diamond binary tree,
checked against the general solver on the explicit graphs."""
import numpy as np

from qgreen import presets
from qgreen.composition import binary_tree_coefficients, sierpinski_coefficients
from qgreen.pathsum import lead_smatrix
from qgreen.vertex import GeneralizedDelta

k = np.linspace(0.05, 10.0, 1000)
pi = GeneralizedDelta(0.5)
for n in (1, 2, 3):
    R, T = sierpinski_coefficients(n, *pi.amplitudes(k, 3), 1.0, k)
    S = lead_smatrix(presets.sierpinski(n, 0.5, 1.0), k, check=False)
    print(f"Sierpinski stage {n}: {len(presets.sierpinski(n).edges):3d} edges, "
          f"max |T - T_solver| = {np.max(np.abs(T - S[:, 1, 0])):.1e}, mean |T|^2 = {np.mean(np.abs(T) ** 2):.4f}")
for level in (0, 1, 2, 3):
    R, T = binary_tree_coefficients(level, pi, pi, 1.0, k)
    S = lead_smatrix(presets.binary_tree(level, 0.5, 1.0), k, check=False)
    print(f"binary tree level {level}: max |T - T_solver| = {np.max(np.abs(T - S[:, 1, 0])):.1e}")
