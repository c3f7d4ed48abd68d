"""Shared plumbing for the protocol modules."""

import logging
from functools import wraps
from typing import Any, Callable, Iterable, List, TypeVar

from ..crypto_core import L, Digest, identity_digest, identity_from_digest
from ..exceptions import (
    EncodingLengthError,
    IntegrityError,
    MessageFormatError,
    PasswordNotFoundError,
    ProtocolRejected,
    RejectReason,
)
from ..models import FoundPassword

F = TypeVar("F", bound=Callable[..., Any])


def handle_protocol_errors(protocol: str, operation_name: str) -> Callable[[F], F]:
    """Decorator to standardize rejection handling for protocol steps.

    Integrity failures become bad_authenticator rejections, unparseable
    payloads become malformed rejections, and every rejection is logged
    with the operation that raised it.

    Args:
        protocol: Protocol name used in the rejection
        operation_name: Description of the step for logging
    """
    def decorator(func: F) -> F:
        step_logger = logging.getLogger(func.__module__)

        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            try:
                return func(*args, **kwargs)
            except ProtocolRejected as e:
                step_logger.warning(f"Rejected while {operation_name}: {e.reason.value}")
                raise
            except IntegrityError as e:
                step_logger.warning(f"Integrity check failed while {operation_name}: {e}")
                raise ProtocolRejected(RejectReason.BAD_AUTHENTICATOR, protocol) from e
            except MessageFormatError as e:
                step_logger.warning(f"Malformed message while {operation_name}: {e}")
                raise ProtocolRejected(RejectReason.MALFORMED, protocol) from e
        return wrapper  # type: ignore[return-value]
    return decorator


def guess_offline(
    dictionary: Iterable[str],
    predicate: Callable[[bytes], bool],
    login_requests_sent: int = 0,
) -> FoundPassword:
    """Walk the dictionary in order and return the first candidate the predicate accepts.

    Candidates too wide to pad into a digest cannot be the card password and
    count as tried misses.

    Raises:
        PasswordNotFoundError: no candidate matched
    """
    tried = 0
    for candidate in dictionary:
        tried += 1
        try:
            hit = predicate(candidate.encode("utf-8"))
        except EncodingLengthError:
            continue
        if hit:
            return FoundPassword(
                password=candidate, guesses_tried=tried, login_requests_sent=login_requests_sent
            )
    raise PasswordNotFoundError(tried, login_requests_sent)


class MessageReader:
    """Cursor over a tagged fixed-field payload."""

    def __init__(self, payload: bytes, tag: int, name: str) -> None:
        if not payload or payload[0] != tag:
            raise MessageFormatError(f"expected {name} (tag {tag:#04x})")
        self._data = payload
        self._pos = 1
        self._name = name

    def take(self, size: int) -> bytes:
        chunk = self._data[self._pos:self._pos + size]
        if len(chunk) != size:
            raise MessageFormatError(f"{self._name} truncated")
        self._pos += size
        return chunk

    def digest(self) -> Digest:
        return Digest(self.take(L))

    def identity(self) -> str:
        try:
            return identity_from_digest(self.digest())
        except UnicodeDecodeError as e:
            raise MessageFormatError(f"{self._name} carries an undecodable identity") from e

    def integer(self, size: int) -> int:
        return int.from_bytes(self.take(size), "big")

    def rest(self) -> bytes:
        chunk = self._data[self._pos:]
        self._pos = len(self._data)
        return chunk

    def finish(self) -> None:
        if self._pos != len(self._data):
            raise MessageFormatError(f"{self._name} has trailing bytes")


def frame(tag: int, fields: List[bytes]) -> bytes:
    return bytes([tag]) + b"".join(fields)


def id_field(name: str) -> bytes:
    return identity_digest(name).value


def require_phase(protocol: str, actual: Any, expected: Any) -> None:
    if actual != expected:
        raise ProtocolRejected(
            RejectReason.OUT_OF_PHASE, protocol, f"{protocol}: session in phase {actual}, expected {expected}"
        )
