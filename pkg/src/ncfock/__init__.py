"""Numerical noncommutative interpolation and Poisson transforms on
truncated full Fock spaces.

The library works with the multiplier algebra generated by the left creation
operators on a Fock space truncated at a chosen degree: multiplier norm
bounds, Nevanlinna-Pick and Caratheodory interpolation over the unit ball,
Poisson kernels of row contractions with von Neumann inequality checks, and
quotients by 2-sided ideals such as commutation relations.
"""

from .errors import DomainError, ResourceCapError, SingularGramError
from .freealg import (BallPoint, FockVector, NcMatrixPolynomial, NcPolynomial,
                      WordIndex, basis_size, evaluate, flip, mult_matrix,
                      stabilized_sup_norm, sup_norm_bounds, tensor_product,
                      truncated_mult_matrix, z_vector)
from .ideals import (IdealSpec, QuotientModel, build_quotient, caratheodory_distance,
                     constrained_von_neumann_check, ideal_subspace, q_commutation_spec,
                     quotient_distance, quotient_poisson_check, symmetrized_basis)
from .numerics import (PsdVerdict, as_hermitian, hermitian_sqrt,
                       max_generalized_eigenvalue, operator_norm, psd_check)
from .pick import (PickCertificate, PickProblem, certify, classical_ball_matrix,
                   gram, lagrange_interpolant, min_interpolation_norm, pick_matrix,
                   sample_membership_check)
from .poisson import (PoissonKernelMatrix, RowContraction, c0_sequence,
                      is_c0_certified, minimal_subspace, poisson_compression,
                      poisson_covariance_check, poisson_kernel, radial_scale,
                      suggest_truncation_degree, von_neumann_margin)

__all__ = [
    "BallPoint", "DomainError", "FockVector", "IdealSpec", "NcMatrixPolynomial",
    "NcPolynomial", "PickCertificate", "PickProblem", "PoissonKernelMatrix",
    "PsdVerdict", "QuotientModel", "ResourceCapError", "RowContraction",
    "SingularGramError", "WordIndex", "as_hermitian", "basis_size",
    "build_quotient", "c0_sequence", "caratheodory_distance", "certify",
    "classical_ball_matrix", "constrained_von_neumann_check", "evaluate", "flip",
    "gram", "hermitian_sqrt", "ideal_subspace", "is_c0_certified",
    "lagrange_interpolant", "max_generalized_eigenvalue", "min_interpolation_norm",
    "minimal_subspace", "mult_matrix", "operator_norm", "pick_matrix",
    "poisson_compression", "poisson_covariance_check", "poisson_kernel",
    "psd_check", "q_commutation_spec", "quotient_distance", "quotient_poisson_check",
    "radial_scale", "sample_membership_check", "stabilized_sup_norm",
    "suggest_truncation_degree", "sup_norm_bounds", "symmetrized_basis",
    "tensor_product", "truncated_mult_matrix", "z_vector",
]

__version__ = "0.1.0"
