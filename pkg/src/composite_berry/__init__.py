"""Berry phases, Wilson loops and subsystem geometric phases of a two-qubit
composite system driven by a rotating field."""

from .model import CouplingKind, ModelParams

__all__ = ["CouplingKind", "ModelParams"]
__version__ = "0.1.0"
