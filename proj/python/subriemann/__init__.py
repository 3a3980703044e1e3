"""Corank-one distributions with continuous exterior differential."""

from ._core import (
    Bundle,
    DegenerateBundleError,
    DomainError,
    Error,
    EscapeError,
    Membership,
    PreconditionError,
    SignLogicError,
    box_membership,
    gallery_names,
    set_threads,
)

__all__ = [
    "Bundle",
    "DegenerateBundleError",
    "DomainError",
    "Error",
    "EscapeError",
    "Membership",
    "PreconditionError",
    "SignLogicError",
    "box_membership",
    "gallery_names",
    "set_threads",
]
