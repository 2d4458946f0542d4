"""Exact Betti numbers of unordered configuration spaces from Félix–Thomas models."""

from .algebra import Degree, Derivation, Element, GradedAlgebra, Morphism, apply_derivation, degree_of, multiply
from .betti import (
    BettiTable,
    betti,
    betti_graded_only,
    poincare_series_coeffs,
    sphere_closed_form,
    torus_closed_form,
    verify_structure,
    verify_theorem,
)
from .complex import BasisSlice, SparseRationalMatrix, assemble_differential, enumerate_basis
from .errors import ConfBettiError, ConsistencyError, UnsupportedInputError, UsageError, ValidationError
from .linalg import RankReport, rank, rank_rational, rank_via_modular_check
from .model import (
    ManifoldCohomology,
    ModelDGA,
    build_model,
    p_map,
    phi_map,
    pi_map,
    sphere_preset,
    theta0_model,
    theta_model,
    top_cocycle_basis,
    torus_preset,
)

__version__ = "0.1.0"
