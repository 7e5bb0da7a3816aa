"""Shared exception types and the verifier result carrier."""

from dataclasses import dataclass


class UsageError(ValueError):
    """Caller violated a precondition (bad arguments, reuse, out of range)."""


class InternalError(RuntimeError):
    """Invariant broken inside the library (should not happen on honest paths)."""


class ConstraintViolation(ValueError):
    """A trace or tag fails the constraints it claims to satisfy."""


@dataclass
class VerifyResult:
    """Boolean verdict plus a diagnostic code explaining a rejection."""

    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok

    @staticmethod
    def accept() -> "VerifyResult":
        return VerifyResult(True)

    @staticmethod
    def reject(reason: str) -> "VerifyResult":
        return VerifyResult(False, reason)
