"""Multi-indexed Wilson and Askey-Wilson polynomials in arbitrary precision.

Typical use::

    from miop import make_params, DeletionSet, build_system
    p = make_params("W", ["2", "2", "2", "2"])
    system = build_system(p, DeletionSet.parse("1I,2I"))
    system.P(3).poly.coeffs
"""

from .classical import FamilyParams, make_params
from .errors import MiopError, ValidationError
from .multi import MultiIndexedSystem, build_P, build_system, build_Xi
from .verification import VerificationReport, run_suite
from .virtual import DeletionSet, TwistType, validate

__all__ = [
    "DeletionSet",
    "FamilyParams",
    "MiopError",
    "MultiIndexedSystem",
    "TwistType",
    "ValidationError",
    "VerificationReport",
    "build_P",
    "build_Xi",
    "build_system",
    "make_params",
    "run_suite",
    "validate",
]
