"""Evans-function machinery: matrices, analytic bases, polar frames."""

from ._backend import kernels
from .frame import (EvansEvaluation, EvansFunction, FrameStats, SubspaceFrame, drury_integrate,
                    evaluate_D, initialize_at_infinity, wedge)
from .kato import (AnalyticBasisState, KatoContinuation, Side, kato_step, kato_transport, projector,
                   spectral_split)
from .system import EvansSystem, assemble_evans, variant_code

BACKEND = kernels.BACKEND

__all__ = [
    "BACKEND",
    "EvansSystem",
    "assemble_evans",
    "variant_code",
    "Side",
    "spectral_split",
    "projector",
    "AnalyticBasisState",
    "kato_step",
    "kato_transport",
    "KatoContinuation",
    "SubspaceFrame",
    "FrameStats",
    "initialize_at_infinity",
    "drury_integrate",
    "wedge",
    "evaluate_D",
    "EvansEvaluation",
    "EvansFunction",
]
