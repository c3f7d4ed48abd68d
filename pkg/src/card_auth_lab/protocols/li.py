"""
Biometrics-assisted XOR/hash mutual authentication (Li et al.) and the
single-login-request offline guessing attack.

The server answers any well-formed M_2 for a registered ID, and its answer
M_6 = H(M_2, M_2 xor H(ID, x)) can be checked against candidate passwords
with the card's e_c and f_c.
"""

import hmac
import logging
from dataclasses import dataclass, field
from enum import Enum
from random import Random
from typing import Dict, Iterable, Set, Tuple

from ..crypto_core import L, Digest, pad_to_digest, tuple_hash
from ..exceptions import ProtocolRejected, RegistrationError, RejectReason
from ..models import FoundPassword
from ..simnet import ServerOracle
from .base import MessageReader, frame, guess_offline, handle_protocol_errors, id_field, require_phase

logger = logging.getLogger(__name__)

PROTOCOL = "li"

TAG_REGISTER = 0x20
TAG_LOGIN = 0x21
TAG_CHALLENGE = 0x22
TAG_RESPONSE = 0x23


class UserPhase(str, Enum):
    SENT_LOGIN = "sent_login"
    DONE = "done"


class ServerPhase(str, Enum):
    SENT_CHALLENGE = "sent_challenge"
    ACCEPTED = "accepted"
    REJECTED = "rejected"


@dataclass
class LiServerState:
    x: Digest
    registered_ids: Set[str] = field(default_factory=set)

    def to_bytes(self) -> bytes:
        return self.x.value + b"".join(id_field(name) for name in sorted(self.registered_ids))


@dataclass(frozen=True)
class LiCard:
    ID_c: str
    f_c: Digest
    e_c: Digest

    def fields_hex(self) -> Dict[str, str]:
        return {"ID_c": self.ID_c, "f_c": self.f_c.hex(), "e_c": self.e_c.hex()}


@dataclass
class LiUserSession:
    R_c: Digest
    M_2: Digest
    phase: UserPhase = UserPhase.SENT_LOGIN
    accepted: bool = False


@dataclass
class LiServerSession:
    ID_c: str
    R_s: Digest
    M_5: Digest
    M_2: Digest
    M_4: Digest
    phase: ServerPhase = ServerPhase.SENT_CHALLENGE


@dataclass(frozen=True)
class LiRegistrationMsg:
    ID_c: str
    PW_c: bytes
    biometric: bytes

    def encode(self) -> bytes:
        return frame(TAG_REGISTER, [id_field(self.ID_c), pad_to_digest(self.PW_c).value, self.biometric])

    @classmethod
    def decode(cls, payload: bytes) -> "LiRegistrationMsg":
        reader = MessageReader(payload, TAG_REGISTER, "li registration")
        ID_c = reader.identity()
        PW_c = reader.take(L).rstrip(b"\x00")
        return cls(ID_c=ID_c, PW_c=PW_c, biometric=reader.rest())


@dataclass(frozen=True)
class LiLoginMsg:
    ID_c: str
    M_2: Digest

    def encode(self) -> bytes:
        return frame(TAG_LOGIN, [id_field(self.ID_c), self.M_2.value])

    @classmethod
    def decode(cls, payload: bytes) -> "LiLoginMsg":
        reader = MessageReader(payload, TAG_LOGIN, "li login")
        msg = cls(ID_c=reader.identity(), M_2=reader.digest())
        reader.finish()
        return msg


@dataclass(frozen=True)
class LiChallengeMsg:
    M_5: Digest
    M_6: Digest

    def encode(self) -> bytes:
        return frame(TAG_CHALLENGE, [self.M_5.value, self.M_6.value])

    @classmethod
    def decode(cls, payload: bytes) -> "LiChallengeMsg":
        reader = MessageReader(payload, TAG_CHALLENGE, "li challenge")
        msg = cls(M_5=reader.digest(), M_6=reader.digest())
        reader.finish()
        return msg


@dataclass(frozen=True)
class LiResponseMsg:
    M_8: Digest

    def encode(self) -> bytes:
        return frame(TAG_RESPONSE, [self.M_8.value])

    @classmethod
    def decode(cls, payload: bytes) -> "LiResponseMsg":
        reader = MessageReader(payload, TAG_RESPONSE, "li response")
        msg = cls(M_8=reader.digest())
        reader.finish()
        return msg


def keyed_identity(ID_c: str, x: Digest) -> Digest:
    """H(ID_c, x)."""
    return tuple_hash([id_field(ID_c), x])


def password_mask(password: bytes, f_c: Digest) -> Digest:
    """H(PW, f_c)."""
    return tuple_hash([pad_to_digest(password), f_c])


def li_setup(rng: Random) -> LiServerState:
    return LiServerState(x=Digest.random(rng))


def li_register(server: LiServerState, ID_c: str, PW_c: bytes, biometric: bytes) -> LiCard:
    """Issue ID_c, f_c = H(B_c) and e_c = H(ID_c, x) xor H(PW_c, f_c)."""
    if not biometric:
        raise RegistrationError("biometric must be non-empty", ID_c)
    if ID_c in server.registered_ids:
        raise RegistrationError(f"identity '{ID_c}' is already registered", ID_c)
    f_c = tuple_hash([biometric])
    server.registered_ids.add(ID_c)
    logger.info(f"Registered '{ID_c}' with li server")
    return LiCard(ID_c=ID_c, f_c=f_c, e_c=keyed_identity(ID_c, server.x) ^ password_mask(PW_c, f_c))


@handle_protocol_errors(PROTOCOL, "starting a li login")
def li_login_start(
    card: LiCard, password: bytes, biometric: bytes, rng: Random
) -> Tuple[LiLoginMsg, LiUserSession]:
    """Check the biometric on the device, then send M_2 = M_1 xor R_c."""
    if not hmac.compare_digest(tuple_hash([biometric]).value, card.f_c.value):
        raise ProtocolRejected(RejectReason.BIOMETRIC_MISMATCH, PROTOCOL)
    M_1 = card.e_c ^ password_mask(password, card.f_c)
    R_c = Digest.random(rng)
    M_2 = M_1 ^ R_c
    return LiLoginMsg(ID_c=card.ID_c, M_2=M_2), LiUserSession(R_c=R_c, M_2=M_2)


@handle_protocol_errors(PROTOCOL, "answering a li login")
def li_server_respond(
    server: LiServerState, msg: LiLoginMsg, rng: Random
) -> Tuple[LiChallengeMsg, LiServerSession]:
    """Answer any M_2 for a registered ID. M_2 itself is not authenticated here."""
    if msg.ID_c not in server.registered_ids:
        raise ProtocolRejected(RejectReason.UNKNOWN_ID, PROTOCOL)
    M_3 = keyed_identity(msg.ID_c, server.x)
    M_4 = msg.M_2 ^ M_3
    R_s = Digest.random(rng)
    M_5 = M_3 ^ R_s
    M_6 = tuple_hash([msg.M_2, M_4])
    logger.debug(f"Li server challenged '{msg.ID_c}'")
    session = LiServerSession(ID_c=msg.ID_c, R_s=R_s, M_5=M_5, M_2=msg.M_2, M_4=M_4)
    return LiChallengeMsg(M_5=M_5, M_6=M_6), session


@handle_protocol_errors(PROTOCOL, "verifying the li server")
def li_user_finish(
    session: LiUserSession, card: LiCard, password: bytes, msg: LiChallengeMsg
) -> LiResponseMsg:
    """Check M_6 = H(M_2, R_c), recover R_s as M_7 and answer M_8 = H(M_5, M_7)."""
    require_phase(PROTOCOL, session.phase, UserPhase.SENT_LOGIN)
    if not hmac.compare_digest(tuple_hash([session.M_2, session.R_c]).value, msg.M_6.value):
        raise ProtocolRejected(RejectReason.BAD_AUTHENTICATOR, PROTOCOL)
    M_1 = card.e_c ^ password_mask(password, card.f_c)
    M_7 = msg.M_5 ^ M_1
    session.phase = UserPhase.DONE
    session.accepted = True
    return LiResponseMsg(M_8=tuple_hash([msg.M_5, M_7]))


@handle_protocol_errors(PROTOCOL, "verifying the li user")
def li_server_accept(session: LiServerSession, msg: LiResponseMsg) -> None:
    """Accept iff M_8 = H(M_5, R_s). Returns normally on acceptance."""
    require_phase(PROTOCOL, session.phase, ServerPhase.SENT_CHALLENGE)
    if not hmac.compare_digest(tuple_hash([session.M_5, session.R_s]).value, msg.M_8.value):
        session.phase = ServerPhase.REJECTED
        raise ProtocolRejected(RejectReason.BAD_AUTHENTICATOR, PROTOCOL)
    session.phase = ServerPhase.ACCEPTED
    logger.info(f"Li server accepted '{session.ID_c}'")


def attack_li_offline_guess(
    stolen: LiCard, dictionary: Iterable[str], server_oracle: ServerOracle, rng: Random
) -> FoundPassword:
    """Send one {ID_c, M_e}, drop the session, then test H(M_e, M_e xor e_c xor H(PW', f_c)) against M_6.

    Raises:
        PasswordNotFoundError: no dictionary entry matched
    """
    M_e = Digest.random(rng)
    reply = LiChallengeMsg.decode(server_oracle.request(LiLoginMsg(ID_c=stolen.ID_c, M_2=M_e).encode()))
    base = M_e ^ stolen.e_c

    def matches(candidate: bytes) -> bool:
        return tuple_hash([M_e, base ^ password_mask(candidate, stolen.f_c)]) == reply.M_6

    found = guess_offline(dictionary, matches, login_requests_sent=server_oracle.requests_sent)
    logger.info(f"Recovered li password of '{stolen.ID_c}' after {found.guesses_tried} guesses")
    return found
