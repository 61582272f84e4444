"""Finite-dimensional analysis of quantum Markov semigroups: decoherence-free
and fixed-point algebras, their block structure, and asymptotics."""
from .algebra import (BlockStructure, StarAlgebra, atomic_decomposition, center, commutant,
                      generated_algebra, minimal_central_projections, sigma_expectation)
from .errors import (DegeneracyError, ModelValidationError, QmsError, ShapeError,
                     StructureError, StructureMismatchError)
from .model import (GkslModel, Superoperator, build_generator, build_predual_generator,
                    semigroup_map, validate_minimality)
from .structure import (compute_FT, compute_NT, extract_block_operators, ft_from_nt,
                        nt_from_ft, reduced_semigroup, spectrum_of_K,
                        verify_automorphism_action)

__version__ = "0.1.0"
