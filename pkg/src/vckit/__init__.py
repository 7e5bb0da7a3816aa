"""vckit: a verifiable-computation toolkit.

Homomorphic polynomial authenticators, the Wesolowski verifiable delay
function, and a transparent STARK-style proof system with FRI low-degree
testing, all over one prime-field substrate and one Fiat-Shamir
transcript.
"""

from .errors import (ConstraintViolation, InternalError, UsageError,
                     VerifyResult)
from .field import (DEFAULT_MODULUS, BivariatePolynomial, EvaluationDomain,
                    Field, FieldElement, Polynomial, interpolate,
                    interpolate_on_domain, poly_div_exact)
from .merkle import AuthPath, MerkleTree, verify_path
from .transcript import HASH_ID, PrfKey, Transcript, hash_to_group, prf

__all__ = [
    "AuthPath", "BivariatePolynomial", "ConstraintViolation",
    "DEFAULT_MODULUS", "EvaluationDomain", "Field", "FieldElement",
    "HASH_ID", "InternalError", "MerkleTree", "Polynomial", "PrfKey",
    "Transcript", "UsageError", "VerifyResult", "hash_to_group",
    "interpolate", "interpolate_on_domain", "poly_div_exact", "prf",
    "verify_path",
]

__version__ = "0.1.0"
