import logging

import pytest

from card_auth_lab.exceptions import (
    FixtureNotFoundError,
    IntegrityError,
    LabError,
    MessageFormatError,
    PasswordNotFoundError,
    ProtocolRejected,
    RejectReason,
)
from card_auth_lab.protocols import guess_offline, handle_protocol_errors
from card_auth_lab.protocols.base import MessageReader, require_phase


class TestProtocolErrorDecorator:
    """Test cases for the rejection-standardizing decorator"""

    @pytest.mark.unit
    def test_integrity_failure_becomes_bad_authenticator(self):
        """Test that a failed decryption is reported as a rejection"""
        @handle_protocol_errors("test", "opening a box")
        def step():
            raise IntegrityError("tag mismatch")

        with pytest.raises(ProtocolRejected) as exc_info:
            step()
        assert exc_info.value.reason == RejectReason.BAD_AUTHENTICATOR
        assert exc_info.value.protocol == "test"

    @pytest.mark.unit
    def test_format_error_becomes_malformed(self):
        """Test that an unparseable payload is reported as malformed"""
        @handle_protocol_errors("test", "parsing")
        def step():
            raise MessageFormatError("truncated")

        with pytest.raises(ProtocolRejected) as exc_info:
            step()
        assert exc_info.value.reason == RejectReason.MALFORMED

    @pytest.mark.unit
    def test_rejection_passes_through(self):
        """Test that an explicit rejection keeps its reason"""
        @handle_protocol_errors("test", "checking")
        def step():
            raise ProtocolRejected(RejectReason.STALE_TIMESTAMP, "test")

        with pytest.raises(ProtocolRejected) as exc_info:
            step()
        assert exc_info.value.reason == RejectReason.STALE_TIMESTAMP

    @pytest.mark.unit
    def test_other_exceptions_pass_through(self):
        """Test that unrelated errors are not converted"""
        @handle_protocol_errors("test", "computing")
        def step():
            raise KeyError("bug")

        with pytest.raises(KeyError):
            step()

    @pytest.mark.unit
    def test_exception_chaining(self):
        """Test that the original error is kept as the cause"""
        original = IntegrityError("tag mismatch")

        @handle_protocol_errors("test", "opening a box")
        def step():
            raise original

        with pytest.raises(ProtocolRejected) as exc_info:
            step()
        assert exc_info.value.__cause__ is original

    @pytest.mark.unit
    def test_rejections_are_logged_as_warnings(self, caplog):
        """Test that the operation name reaches the log"""
        @handle_protocol_errors("test", "verifying the server")
        def step():
            raise ProtocolRejected(RejectReason.BAD_AUTHENTICATOR, "test")

        with caplog.at_level(logging.WARNING):
            with pytest.raises(ProtocolRejected):
                step()
        assert "Rejected while verifying the server: bad_authenticator" in caplog.text

    @pytest.mark.unit
    def test_wrapped_function_keeps_its_name(self):
        """Test functools.wraps"""
        @handle_protocol_errors("test", "x")
        def named_step():
            """Docstring."""

        assert named_step.__name__ == "named_step"
        assert named_step.__doc__ == "Docstring."


@pytest.mark.unit
class TestGuessOffline:
    """Test cases for the shared dictionary walk"""

    def test_first_match_wins(self):
        """Test that the earliest matching candidate is returned"""
        found = guess_offline(["a", "b", "b"], lambda c: c == b"b", login_requests_sent=1)
        assert (found.password, found.guesses_tried, found.login_requests_sent) == ("b", 2, 1)

    def test_empty_dictionary(self):
        """Test NotFound with zero guesses"""
        with pytest.raises(PasswordNotFoundError) as exc_info:
            guess_offline([], lambda c: True)
        assert exc_info.value.guesses_tried == 0

    def test_not_found_message(self):
        """Test the diagnostic text"""
        error = PasswordNotFoundError(3, 1)
        assert str(error) == "password not in dictionary after 3 guesses (1 login requests)"


@pytest.mark.unit
class TestMessagePlumbing:
    """Test cases for message parsing helpers"""

    def test_wrong_tag(self):
        """Test that a payload with another tag is refused"""
        with pytest.raises(MessageFormatError):
            MessageReader(b"\x02abc", 0x01, "test")

    def test_truncated_field(self):
        """Test that a short payload is refused"""
        reader = MessageReader(b"\x01ab", 0x01, "test")
        with pytest.raises(MessageFormatError):
            reader.take(3)

    def test_trailing_bytes(self):
        """Test that leftover bytes are refused"""
        reader = MessageReader(b"\x01abc", 0x01, "test")
        reader.take(2)
        with pytest.raises(MessageFormatError):
            reader.finish()

    def test_require_phase(self):
        """Test the out_of_phase rejection"""
        with pytest.raises(ProtocolRejected) as exc_info:
            require_phase("test", "done", "sent_login")
        assert exc_info.value.reason == RejectReason.OUT_OF_PHASE


@pytest.mark.unit
class TestExceptionHierarchy:
    """Test cases for the exception classes"""

    @pytest.mark.parametrize("error", [
        IntegrityError("x"),
        MessageFormatError("x"),
        ProtocolRejected(RejectReason.MALFORMED, "test"),
        PasswordNotFoundError(1),
        FixtureNotFoundError("x"),
    ])
    def test_all_derive_from_lab_error(self, error):
        """Test the common base class"""
        assert isinstance(error, LabError)

    def test_rejection_default_message(self):
        """Test the generated message"""
        assert str(ProtocolRejected(RejectReason.UNKNOWN_ID, "xu")) == "xu rejected: unknown_id"
