"""Exact verification and computation engine for the even-dimensional
multiparameter braid-matrix hierarchy, its transfer matrices, eigenvalue
multiplets, and spin-chain Hamiltonians."""

from .scalars import PolyX, Rational, poly_basis, eval_poly
from .linalg import SpMatrix, kron, permutation_matrix, eig_oracle
from .braid import ParameterSet, build_projector, build_braid, check_braid_relation, check_unitarity

__all__ = [
    "PolyX",
    "Rational",
    "poly_basis",
    "eval_poly",
    "SpMatrix",
    "kron",
    "permutation_matrix",
    "eig_oracle",
    "ParameterSet",
    "build_projector",
    "build_braid",
    "check_braid_relation",
    "check_unitarity",
]
