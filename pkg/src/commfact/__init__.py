"""Commutator factorizations of banded unitriangular, special linear and
Vershik–Kerov matrices, with certificates that can be checked independently.
"""

from .certificate import Certificate, Pair, VerificationReport, paper_bound, ut_bound, verify
from .errors import (
    CommFactError,
    EigenvalueOne,
    InvalidInput,
    NotUnimodular,
    PreconditionViolated,
    RetriesExhausted,
)
from .estimators import CommutatorFactorizer, SLFactorizer, UnitriangularFactorizer, VKFactorizer
from .jsonio import canonical_digest, certificate_from_json, certificate_to_json, matrix_from_json, matrix_to_json
from .matrixcore import BandUT, Matrix, OrderSpec, identity, window
from .pipeline import factorize
from .scalar import CycScalar, ExactDomain, FloatDomain, root_of_unity
from .slfact import factorize_sl, scalar_factorize, sourour_similarity
from .unitriangular import build_generators, factorize_ut
from .vkfact import VKElement, factorize_vk, vk_eliminate_corner

__version__ = "0.1.0"

__all__ = [
    "BandUT",
    "Certificate",
    "CommFactError",
    "CommutatorFactorizer",
    "CycScalar",
    "EigenvalueOne",
    "ExactDomain",
    "FloatDomain",
    "InvalidInput",
    "Matrix",
    "NotUnimodular",
    "OrderSpec",
    "Pair",
    "PreconditionViolated",
    "RetriesExhausted",
    "SLFactorizer",
    "UnitriangularFactorizer",
    "VKElement",
    "VKFactorizer",
    "VerificationReport",
    "build_generators",
    "canonical_digest",
    "certificate_from_json",
    "certificate_to_json",
    "factorize",
    "factorize_sl",
    "factorize_ut",
    "factorize_vk",
    "identity",
    "matrix_from_json",
    "matrix_to_json",
    "paper_bound",
    "root_of_unity",
    "scalar_factorize",
    "sourour_similarity",
    "ut_bound",
    "verify",
    "vk_eliminate_corner",
    "window",
]
