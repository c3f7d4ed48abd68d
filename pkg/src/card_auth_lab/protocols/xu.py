"""
Timestamped challenge-response with smart cards (Xu et al.), its cleartext
registration, and the insider impersonation attack.

Registration stores B = H(ID)^x + H(PW) mod p on the card. At login the user
removes H(PW), raises the result to a fresh v and proves knowledge of
H(ID)^(xv) bound to W = H(ID)^v. The server only checks W^x, so nothing
ties the base of W to the claimed identity.
"""

import hmac
import logging
from dataclasses import dataclass, field
from enum import Enum
from random import Random
from typing import Dict, Optional, Set, Tuple

from ..crypto_core import (
    MOD_BYTES,
    P_MOD,
    Digest,
    ModGroupElement,
    Scalar,
    digest_as_integer,
    mod_hash_to_group,
    mod_int_to_bytes,
    mod_pow,
    tuple_hash,
)
from ..exceptions import MessageFormatError, ProtocolRejected, RegistrationError, RejectReason
from ..models import ImpersonationResult
from ..simnet import DEFAULT_DELTA_T, ServerOracle
from .base import MessageReader, frame, handle_protocol_errors, id_field, require_phase

logger = logging.getLogger(__name__)

PROTOCOL = "xu"

TIME_BYTES = 8

TAG_REGISTER = 0x10
TAG_LOGIN = 0x11
TAG_SERVER = 0x12


class XuRole(str, Enum):
    USER = "user"
    SERVER = "server"
    INSIDER = "insider"


class XuPhase(str, Enum):
    SENT_LOGIN = "sent_login"
    SENT_REPLY = "sent_reply"
    DONE = "done"


@dataclass
class XuServerState:
    x: Scalar
    delta_t: int = DEFAULT_DELTA_T
    registered_ids: Set[str] = field(default_factory=set)

    def to_bytes(self) -> bytes:
        return self.x.to_bytes() + b"".join(id_field(name) for name in sorted(self.registered_ids))


@dataclass(frozen=True)
class XuCard:
    ID_c: str
    B: int

    def fields_hex(self) -> Dict[str, str]:
        return {"ID_c": self.ID_c, "B": mod_int_to_bytes(self.B).hex()}


@dataclass
class XuSession:
    """One side of an exchange. exponent is v (user), m (server) or r (insider)."""

    role: XuRole
    exponent: Scalar
    ID_c: str
    W: ModGroupElement
    phase: XuPhase
    B_c: Optional[int] = None
    M: Optional[ModGroupElement] = None
    delta_t: int = DEFAULT_DELTA_T
    sk: Optional[Digest] = None


@dataclass(frozen=True)
class XuRegistrationMsg:
    ID_c: str
    PW_c: bytes

    def encode(self) -> bytes:
        return frame(TAG_REGISTER, [id_field(self.ID_c), self.PW_c])

    @classmethod
    def decode(cls, payload: bytes) -> "XuRegistrationMsg":
        reader = MessageReader(payload, TAG_REGISTER, "xu registration")
        return cls(ID_c=reader.identity(), PW_c=reader.rest())


def _read_group(reader: MessageReader) -> ModGroupElement:
    try:
        return ModGroupElement(reader.integer(MOD_BYTES))
    except ValueError as e:
        raise MessageFormatError(f"xu message carries an invalid group element: {e}") from e


@dataclass(frozen=True)
class XuLoginMsg:
    ID_c: str
    C_l: Digest
    W: ModGroupElement
    T: int

    def encode(self) -> bytes:
        return frame(TAG_LOGIN, [
            id_field(self.ID_c), self.C_l.value, self.W.to_bytes(), self.T.to_bytes(TIME_BYTES, "big"),
        ])

    @classmethod
    def decode(cls, payload: bytes) -> "XuLoginMsg":
        reader = MessageReader(payload, TAG_LOGIN, "xu login")
        msg = cls(ID_c=reader.identity(), C_l=reader.digest(), W=_read_group(reader), T=reader.integer(TIME_BYTES))
        reader.finish()
        return msg


@dataclass(frozen=True)
class XuServerMsg:
    ID_c: str
    C_s: Digest
    M: ModGroupElement
    T_s: int

    def encode(self) -> bytes:
        return frame(TAG_SERVER, [
            id_field(self.ID_c), self.C_s.value, self.M.to_bytes(), self.T_s.to_bytes(TIME_BYTES, "big"),
        ])

    @classmethod
    def decode(cls, payload: bytes) -> "XuServerMsg":
        reader = MessageReader(payload, TAG_SERVER, "xu server reply")
        msg = cls(ID_c=reader.identity(), C_s=reader.digest(), M=_read_group(reader), T_s=reader.integer(TIME_BYTES))
        reader.finish()
        return msg


def _time(t: int) -> bytes:
    return t.to_bytes(TIME_BYTES, "big")


def _password_integer(password: bytes) -> int:
    return digest_as_integer(tuple_hash([password]))


def login_authenticator(T: int, B: int, W: ModGroupElement, ID_c: str) -> Digest:
    """C_l = H(T, B, W, ID_c)."""
    return tuple_hash([_time(T), mod_int_to_bytes(B), W, id_field(ID_c)])


def server_authenticator(M: ModGroupElement, B: int, T_s: int, ID_c: str) -> Digest:
    """C_s = H(M, B, T_s, ID_c)."""
    return tuple_hash([M, mod_int_to_bytes(B), _time(T_s), id_field(ID_c)])


def session_key(ID_c: str, M: ModGroupElement, W: ModGroupElement, shared: ModGroupElement) -> Digest:
    return tuple_hash([id_field(ID_c), M, W, shared])


def remove_password(card: XuCard, password: bytes) -> int:
    """D = (B - H(PW)) mod p, which is H(ID)^x for the right password."""
    return (card.B - _password_integer(password)) % P_MOD


def xu_setup(rng: Random, delta_t: int = DEFAULT_DELTA_T) -> XuServerState:
    return XuServerState(x=Scalar.random(rng), delta_t=delta_t)


def xu_register(server: XuServerState, ID_c: str, PW_c: bytes) -> XuCard:
    """Issue B = (H(ID_c)^x + H(PW_c)) mod p. The password reaches the server in the clear."""
    if ID_c in server.registered_ids:
        raise RegistrationError(f"identity '{ID_c}' is already registered", ID_c)
    base = mod_pow(mod_hash_to_group(ID_c.encode("utf-8")), server.x)
    server.registered_ids.add(ID_c)
    logger.info(f"Registered '{ID_c}' with xu server")
    return XuCard(ID_c=ID_c, B=(base.value + _password_integer(PW_c)) % P_MOD)


def xu_login(
    card: XuCard, password: bytes, clock: int, rng: Random, delta_t: int = DEFAULT_DELTA_T
) -> Tuple[XuLoginMsg, XuSession]:
    """B_c = D^v, W = H(ID_c)^v, C_l = H(T, B_c, W, ID_c). A wrong password goes unnoticed here."""
    v = Scalar.random(rng)
    B_c = pow(remove_password(card, password), v.value, P_MOD)
    W = mod_pow(mod_hash_to_group(card.ID_c.encode("utf-8")), v)
    msg = XuLoginMsg(ID_c=card.ID_c, C_l=login_authenticator(clock, B_c, W, card.ID_c), W=W, T=clock)
    session = XuSession(
        role=XuRole.USER, exponent=v, ID_c=card.ID_c, W=W, phase=XuPhase.SENT_LOGIN, B_c=B_c, delta_t=delta_t
    )
    return msg, session


@handle_protocol_errors(PROTOCOL, "authenticating a xu login")
def xu_server_authenticate(
    server: XuServerState, msg: XuLoginMsg, clock: int, rng: Random
) -> Tuple[XuServerMsg, XuSession]:
    """Check ID, freshness and C_l in that order, then answer with M = H(ID_c)^m."""
    if msg.ID_c not in server.registered_ids:
        raise ProtocolRejected(RejectReason.UNKNOWN_ID, PROTOCOL)
    if clock - msg.T >= server.delta_t:
        raise ProtocolRejected(RejectReason.STALE_TIMESTAMP, PROTOCOL)
    B_s = mod_pow(msg.W, server.x)
    if not hmac.compare_digest(login_authenticator(msg.T, B_s.value, msg.W, msg.ID_c).value, msg.C_l.value):
        raise ProtocolRejected(RejectReason.BAD_AUTHENTICATOR, PROTOCOL)
    m = Scalar.random(rng)
    M = mod_pow(mod_hash_to_group(msg.ID_c.encode("utf-8")), m)
    reply = XuServerMsg(ID_c=msg.ID_c, C_s=server_authenticator(M, B_s.value, clock, msg.ID_c), M=M, T_s=clock)
    session = XuSession(
        role=XuRole.SERVER, exponent=m, ID_c=msg.ID_c, W=msg.W, phase=XuPhase.DONE, M=M,
        delta_t=server.delta_t, sk=session_key(msg.ID_c, M, msg.W, mod_pow(msg.W, m)),
    )
    logger.info(f"Xu server accepted login of '{msg.ID_c}'")
    return reply, session


@handle_protocol_errors(PROTOCOL, "verifying the xu server")
def xu_user_finish(session: XuSession, msg: XuServerMsg, clock: int) -> Digest:
    """Check ID, T_s and C_s, then derive sk = H(ID_c, M, W, M^v)."""
    require_phase(PROTOCOL, session.phase, XuPhase.SENT_LOGIN)
    if msg.ID_c != session.ID_c:
        raise ProtocolRejected(RejectReason.UNKNOWN_ID, PROTOCOL)
    if clock - msg.T_s >= session.delta_t:
        raise ProtocolRejected(RejectReason.STALE_TIMESTAMP, PROTOCOL)
    if session.B_c is None:
        raise ProtocolRejected(RejectReason.OUT_OF_PHASE, PROTOCOL)
    expected = server_authenticator(msg.M, session.B_c, msg.T_s, session.ID_c)
    if not hmac.compare_digest(expected.value, msg.C_s.value):
        raise ProtocolRejected(RejectReason.BAD_AUTHENTICATOR, PROTOCOL)
    session.M = msg.M
    session.sk = session_key(session.ID_c, msg.M, session.W, mod_pow(msg.M, session.exponent))
    session.phase = XuPhase.DONE
    return session.sk


def attack_xu_insider(
    own_card: XuCard,
    own_password: bytes,
    target_id: str,
    server_oracle: ServerOracle,
    clock: int,
    rng: Random,
) -> ImpersonationResult:
    """Log in as target_id using the insider's own H(ID_u)^x.

    A server rejection is returned as accepted=False with the reason; it means
    the scenario is misconfigured, not that the construction resisted.
    """
    D = remove_password(own_card, own_password)
    r = Scalar.random(rng)
    W = mod_pow(mod_hash_to_group(own_card.ID_c.encode("utf-8")), r)
    B_u = pow(D, r.value, P_MOD)
    login = XuLoginMsg(ID_c=target_id, C_l=login_authenticator(clock, B_u, W, target_id), W=W, T=clock)
    try:
        reply = XuServerMsg.decode(server_oracle.request(login.encode()))
    except ProtocolRejected as exc:
        logger.info(f"Insider '{own_card.ID_c}' was refused as '{target_id}': {exc.reason.value}")
        return ImpersonationResult(
            accepted=False, claimed_identity=target_id, insider_identity=own_card.ID_c, reason=exc.reason.value
        )
    sk = session_key(target_id, reply.M, W, mod_pow(reply.M, r))
    logger.info(f"Insider '{own_card.ID_c}' authenticated as '{target_id}'")
    return ImpersonationResult(
        accepted=True, claimed_identity=target_id, insider_identity=own_card.ID_c, session_key=sk.hex()
    )
