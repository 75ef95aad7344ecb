"""Misere quotients: closed contexts, computation, verification, pretending."""

from misere.quotient._compute import (
    ProfileClosure,
    QuotientCaps,
    QuotientResult,
    VerifyOutcome,
    compute_quotient,
    position_outcome_via_quotient,
    verify_quotient,
)
from misere.quotient._context import ClosedContext, closure, sum_outcome
from misere.quotient._pretend import (
    MisereCertificate,
    PretendResult,
    PretendRow,
    detect_misere_period,
    pretending_function,
    verify_misere_certificate,
)

__all__ = [
    "ClosedContext",
    "MisereCertificate",
    "PretendResult",
    "PretendRow",
    "ProfileClosure",
    "QuotientCaps",
    "QuotientResult",
    "VerifyOutcome",
    "closure",
    "compute_quotient",
    "detect_misere_period",
    "position_outcome_via_quotient",
    "pretending_function",
    "sum_outcome",
    "verify_misere_certificate",
    "verify_quotient",
]
