"""Exact Green's functions, scattering matrices and spectra of quantum graphs."""
from .composition import (ScatterBlock, binary_tree_coefficients, chain_coefficients, chain_extend,
                          effective_vertex, reduce_graph, sierpinski_coefficients)
from .errors import *  # noqa: F401,F403
from .graph import Edge, Lead, MetricGraph, Position, build_graph, degree
from .io import canonicalize, dumps, load, loads
from .pathsum import FamilySystem, assemble_family_system, family_matrix, green, lead_smatrix
from .presets import preset
from .quasibound import Resonance, find_quasibound, reflection_phase, transition_amplitude
from .spectral import (Root, SpectrumResult, eigenfunction_from_residue, find_bound_states,
                       find_eigenvalues, secular)
from .vertex import (CustomMatrix, DeadEnd, Dirichlet, GeneralizedDelta, LineABCD, NeumannKirchhoff,
                     PointInteraction, interaction_from_descriptor, scattering_matrix,
                     verify_flux_conservation)

__version__ = "0.1.0"
