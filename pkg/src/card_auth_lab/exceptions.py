"""
Card Authentication Lab Exceptions

Centralized exception definitions for the lab. Protocol steps signal a
rejected message by raising ProtocolRejected; guessing attacks signal an
exhausted dictionary with PasswordNotFoundError.
"""

from enum import Enum
from typing import Optional


class RejectReason(str, Enum):
    """Why a protocol party refused a message."""

    UNKNOWN_ID = "unknown_id"
    STALE_TIMESTAMP = "stale_timestamp"
    BAD_AUTHENTICATOR = "bad_authenticator"
    BIOMETRIC_MISMATCH = "biometric_mismatch"
    WRONG_PASSWORD = "wrong_password"
    MALFORMED = "malformed"
    OUT_OF_PHASE = "out_of_phase"


class LabError(Exception):
    """Base class for every error raised by the lab"""
    pass


class EncodingLengthError(LabError, ValueError):
    """Raised when a value does not fit the fixed digest width"""

    def __init__(self, message: str, length: Optional[int] = None):
        super().__init__(message)
        self.length = length


class IntegrityError(LabError):
    """Raised when authenticated decryption fails (tampering or wrong key)"""
    pass


class MessageFormatError(LabError):
    """Raised when a payload does not parse as the expected message"""
    pass


class ScenarioConfigError(LabError):
    """Raised when a scenario is wired incorrectly (unknown party, no card)"""
    pass


class RegistrationError(LabError):
    """Raised when a server refuses a registration"""

    def __init__(self, message: str, identity: Optional[str] = None):
        super().__init__(message)
        self.identity = identity


class ProtocolRejected(LabError):
    """Raised when a protocol party rejects a message"""

    def __init__(self, reason: RejectReason, protocol: str, message: Optional[str] = None):
        super().__init__(message or f"{protocol} rejected: {reason.value}")
        self.reason = reason
        self.protocol = protocol


class PasswordNotFoundError(LabError):
    """Raised when a guessing attack exhausts its dictionary"""

    def __init__(self, guesses_tried: int, login_requests_sent: int = 0):
        super().__init__(
            f"password not in dictionary after {guesses_tried} guesses "
            f"({login_requests_sent} login requests)"
        )
        self.guesses_tried = guesses_tried
        self.login_requests_sent = login_requests_sent


class EvidenceError(LabError):
    """Raised when a scripted scenario fails to produce its expected evidence"""

    def __init__(self, protocol: str, requirement: str, seed: int, detail: str):
        super().__init__(
            f"{protocol}/{requirement} (seed {seed}): expected evidence missing - {detail}"
        )
        self.protocol = protocol
        self.requirement = requirement
        self.seed = seed


class MatrixInvariantError(LabError):
    """Raised when a verdict matrix breaks its invariants"""
    pass


class FixtureNotFoundError(LabError, KeyError):
    """Raised when a fixture name is not in the corpus"""

    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"no fixture named '{self.name}'"


__all__ = [
    "RejectReason",
    "LabError",
    "EncodingLengthError",
    "IntegrityError",
    "MessageFormatError",
    "ScenarioConfigError",
    "RegistrationError",
    "ProtocolRejected",
    "PasswordNotFoundError",
    "EvidenceError",
    "MatrixInvariantError",
    "FixtureNotFoundError",
]
