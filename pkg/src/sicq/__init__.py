"""SIC-POVM probabilistic representation of finite-dimensional quantum mechanics.

A SIC frame (d^2 equiangular rank-1 projectors) turns density operators into
ordinary probability vectors and back.  This package builds and verifies such
frames, implements the state <-> probability dictionary, expresses the Born
rule as a deformed law of total probability, and checks the state-space
geometry that follows from it.  Everything is cross-checked against a direct
trace-rule oracle.
"""

__version__ = "0.1.0"

from .geometry import (
    basis_distribution,
    bloch_geometry,
    delsarte_bound,
    flat_zeros_vector,
    gram_equidistant,
    isu_bound_check,
    nflat_min_distance,
    zeros_overlap_test,
)
from .operators import born_direct, hs_inner, is_rank_one_projector
from .sicframe import (
    MubFrame,
    SicFrame,
    SicSearchError,
    build_mub,
    depolarize_check,
    frobenius_minimum,
    frobenius_objective,
    known_sic,
    real_sic_feasibility,
    search_sic,
    verify_sic,
)
from .sicrep import (
    StructureTensor,
    build_structure,
    magma_decomposition_check,
    prob_to_rho,
    project_to_ellipsoid,
    purity_check,
    rho_to_prob,
    sic_inner,
    sqrt_parameterize,
    validity_test,
)
from .urgleichung import (
    UrungleichungError,
    certainty_gram,
    classical_ltp,
    conditional_from_frame,
    conditional_from_projectors,
    evolve_prob,
    mub_prob,
    solve_generalized,
    unitary_to_stochastic,
    urgleichung_general,
    urgleichung_mub,
    urgleichung_vn,
)

__all__ = [
    "MubFrame",
    "SicFrame",
    "SicSearchError",
    "StructureTensor",
    "UrungleichungError",
    "basis_distribution",
    "bloch_geometry",
    "born_direct",
    "build_mub",
    "build_structure",
    "certainty_gram",
    "classical_ltp",
    "conditional_from_frame",
    "conditional_from_projectors",
    "delsarte_bound",
    "depolarize_check",
    "evolve_prob",
    "flat_zeros_vector",
    "frobenius_minimum",
    "frobenius_objective",
    "gram_equidistant",
    "hs_inner",
    "is_rank_one_projector",
    "isu_bound_check",
    "known_sic",
    "magma_decomposition_check",
    "mub_prob",
    "nflat_min_distance",
    "prob_to_rho",
    "project_to_ellipsoid",
    "purity_check",
    "real_sic_feasibility",
    "rho_to_prob",
    "search_sic",
    "sic_inner",
    "solve_generalized",
    "sqrt_parameterize",
    "unitary_to_stochastic",
    "urgleichung_general",
    "urgleichung_mub",
    "urgleichung_vn",
    "validity_test",
    "verify_sic",
    "zeros_overlap_test",
]
