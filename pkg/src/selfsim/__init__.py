"""Self-similarity invariants of 3-dimensional Lie lattices over the p-adic integers."""

from .endo import (VirtualEndomorphism, Verdict, is_morphism, is_simple_at_precision, phi_core,
                   random_morphism_search)
from .harness import (Certificate, lemma_ldiag_property_run, verify_example_family,
                      verify_not_self_similar)
from .lattice import (LieLattice, SInvariants, bracket, change_basis, diagonal_constants,
                      example_family, jacobi_check, k_bound, s_invariants, well_diagonalize)
from .linalg import (Matrix, hermite_form, is_gl3, preimage_of_submodule, smith_invariants,
                     solve_in_span)
from .padic import BottomAtPrecision, PAdicScalar, div_exact, invert_unit, valuation
from .submodule import (ProofScalars, Submodule, canonical_ideal, derived_and_gamma2,
                        enumerate_subalgebras, induced_structure, is_ideal, largest_ideal_in)

__version__ = "0.1.0"

__all__ = [
    "VirtualEndomorphism",
    "Verdict",
    "is_morphism",
    "is_simple_at_precision",
    "phi_core",
    "random_morphism_search",
    "Certificate",
    "lemma_ldiag_property_run",
    "verify_example_family",
    "verify_not_self_similar",
    "LieLattice",
    "SInvariants",
    "bracket",
    "change_basis",
    "diagonal_constants",
    "example_family",
    "jacobi_check",
    "k_bound",
    "s_invariants",
    "well_diagonalize",
    "Matrix",
    "hermite_form",
    "is_gl3",
    "preimage_of_submodule",
    "smith_invariants",
    "solve_in_span",
    "BottomAtPrecision",
    "PAdicScalar",
    "div_exact",
    "invert_unit",
    "valuation",
    "ProofScalars",
    "Submodule",
    "canonical_ideal",
    "derived_and_gamma2",
    "enumerate_subalgebras",
    "induced_structure",
    "is_ideal",
    "largest_ideal_in",
]
