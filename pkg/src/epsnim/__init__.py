"""Ending partizan subtraction nim: outcomes, periods, laws, game values, surveys."""

from .core import (
    BudgetExceeded,
    GameSpec,
    Outcome,
    OutcomeSequence,
    SpecError,
    SubtractionSet,
    TerminalRule,
    options,
    oracle_outcome,
    outcome_table,
    parse_set,
)
from .periodicity import (
    HorizonExceeded,
    PeriodCertificate,
    TailClass,
    classify_tail,
    detect_period,
    verify_certificate,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "GameSpec",
    "HorizonExceeded",
    "Outcome",
    "OutcomeSequence",
    "PeriodCertificate",
    "SpecError",
    "SubtractionSet",
    "TailClass",
    "TerminalRule",
    "classify_tail",
    "detect_period",
    "options",
    "oracle_outcome",
    "outcome_table",
    "parse_set",
    "verify_certificate",
]
