from __future__ import annotations

"""Exception hierarchy.

Every computational failure carries the name of the stage that failed so the
CLI can report it and exit with status 2.
"""


class ComputationError(Exception):
    stage = "computation"

    def __init__(self, message: str, stage: str | None = None):
        super().__init__(message)
        if stage is not None:
            self.stage = stage


class OracleScaleError(ComputationError):
    """Raised when a brute-force enumeration would exceed its size guard."""

    stage = "oracle"


class TailBoundError(ComputationError):
    stage = "tail-bound"


class CertificationError(ComputationError):
    stage = "certify"


class NewtonError(ComputationError):
    stage = "newton"
