"""Randomly stopped extreme transformations of probability distributions."""

from .catalog import (
    StoppingFamily,
    auto_reversible_from_pair,
    dilation_family,
    make_family,
    reversal_partner,
    sandwich_family,
)
from .errors import (
    ClosureError,
    DomainError,
    InversionError,
    PairingError,
    ParameterError,
    StopExtError,
    SupportError,
)
from .pgf import (
    ETNB,
    ComposedPgf,
    Deterministic,
    DilatedPgf,
    Logarithmic,
    Pgf,
    Sibuya,
    SibuyaGeometric,
    ZTBinomial,
    ZTGeometric,
    ZTPoisson,
    compose,
)

__version__ = "0.1.0"
