"""Curvature calculus, obstruction integrals and gluing diagnostics for the
desingularization of Einstein 4-orbifolds by the Eguchi-Hanson space."""

from . import calculus, ehspace, gluing, jets, lin4, obstruction, report, sphere
from .errors import (AccuracyError, AdmissibilityError, DomainError, EhglueError,
                     InputError, InternalError, LoadError, PreconditionError)

__all__ = [
    "calculus", "ehspace", "gluing", "jets", "lin4", "obstruction",
    "report", "sphere",
    "AccuracyError", "AdmissibilityError", "DomainError", "EhglueError",
    "InputError", "InternalError", "LoadError", "PreconditionError",
]

__version__ = "0.1.0"
