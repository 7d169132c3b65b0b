"""Derangement graphs, maximal cliques and mutually orthogonal Latin squares."""

from __future__ import annotations

from .clique import (
    DisconnectedFamily,
    MaximalClique,
    are_disconnected,
    enumerate_maximal_cliques,
    find_disconnected_families,
    translate,
)
from .errors import DerangementError
from .exactla import (
    PrimeFieldMatrix,
    RationalMatrix,
    nullspace_gf,
    rank_gf,
    rank_rational,
)
from .latin import LatinSquare, are_orthogonal, gamma, omega
from .obstruction import RSet, search_rsets
from .perm import CycleType, Permutation, compose, cycle_type, inverse, n_fixed
from .spectral import fixed_point_matrix, laplacian_eigenvalue, projection_image_dim

__all__ = [
    "CycleType",
    "DerangementError",
    "DisconnectedFamily",
    "LatinSquare",
    "MaximalClique",
    "Permutation",
    "PrimeFieldMatrix",
    "RSet",
    "RationalMatrix",
    "are_disconnected",
    "are_orthogonal",
    "compose",
    "cycle_type",
    "enumerate_maximal_cliques",
    "find_disconnected_families",
    "fixed_point_matrix",
    "gamma",
    "inverse",
    "laplacian_eigenvalue",
    "n_fixed",
    "nullspace_gf",
    "omega",
    "projection_image_dim",
    "rank_gf",
    "rank_rational",
    "search_rsets",
    "translate",
]

__version__ = "0.1.0"
