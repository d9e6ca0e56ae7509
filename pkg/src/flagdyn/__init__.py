"""Certified flag-variety dynamics over the rationals.

Exact rational linear algebra with certified spectral enclosures, full
flag varieties with transversality and general-position machinery,
Cartan/Jordan projections and proximal dynamics, and end-to-end
construction and verification of dynamical pigeonhole witnesses for
finitely generated subgroups of SL_d(Q): exact on the projective line,
sampled (and labeled as such) in higher rank.
"""

from .certreal import Interval, PrecisionError
from .config import RunConfig
from .dynamics import (
    ContractionCert,
    ProximalData,
    ThetaEstimate,
    WeylVector,
    attracting_repelling,
    cartan,
    certify_contraction,
    find_loxodromic,
    is_loxodromic,
    jordan,
    theta_estimate,
)
from .flags import (
    Flag,
    FlagPair,
    act,
    canonicalize,
    flag_distance,
    make_pair,
    stabilizer_falsifier,
    standard_flag,
    transversal,
    transversal_partner,
)
from .groupinfo import DensityEvidence, PadicBoundednessReport, density_evidence, padic_boundedness
from .padic import ValuationVector, smith_valuations
from .position import (
    Configuration,
    EmptyIntersectionClaim,
    NoetherianParams,
    PositionVerdict,
    conservative_group_constant,
    empty_intersection_bound,
    general_position_check,
    group_bound,
    noetherian_bound,
)
from .qlinalg import QMatrix
from .rp1 import Arc, QuadVal, RP1Point
from .spectra import log_eigen_moduli, log_singular_values
from .witness import (
    Ball,
    MultiplicityResult,
    PhpInstance,
    PhpWitness,
    SetDescriptor,
    VerificationReport,
    build_neighborhoods,
    choose_n,
    construct_witness,
    max_multiplicity,
    pullback_hat,
    search_generic_tuple,
    verify_witness,
)
from .words import GroupPresentation, enumerate_ball, parse_group, sanov_group, torsion_bound

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "Ball",
    "Configuration",
    "ContractionCert",
    "DensityEvidence",
    "EmptyIntersectionClaim",
    "Flag",
    "FlagPair",
    "GroupPresentation",
    "Interval",
    "MultiplicityResult",
    "NoetherianParams",
    "PadicBoundednessReport",
    "PhpInstance",
    "PhpWitness",
    "PositionVerdict",
    "PrecisionError",
    "ProximalData",
    "QMatrix",
    "QuadVal",
    "RP1Point",
    "RunConfig",
    "SetDescriptor",
    "ThetaEstimate",
    "ValuationVector",
    "VerificationReport",
    "WeylVector",
    "act",
    "attracting_repelling",
    "build_neighborhoods",
    "canonicalize",
    "cartan",
    "certify_contraction",
    "choose_n",
    "conservative_group_constant",
    "construct_witness",
    "density_evidence",
    "empty_intersection_bound",
    "enumerate_ball",
    "find_loxodromic",
    "flag_distance",
    "general_position_check",
    "group_bound",
    "is_loxodromic",
    "jordan",
    "log_eigen_moduli",
    "log_singular_values",
    "make_pair",
    "max_multiplicity",
    "noetherian_bound",
    "padic_boundedness",
    "parse_group",
    "pullback_hat",
    "sanov_group",
    "search_generic_tuple",
    "smith_valuations",
    "stabilizer_falsifier",
    "standard_flag",
    "theta_estimate",
    "transversal",
    "transversal_partner",
    "verify_witness",
]
