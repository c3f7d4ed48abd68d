"""
Pairing-based password-authenticated key agreement with smart cards (Juang et al.)
and the lost-card offline password guessing attack against it.

Flow: the user sends {aP, alpha} with alpha = E_Ka[b_i]; the server answers
{Auth_s, r}; the user answers {Auth_i}. Ka = H(aP, P_s, Q, e(P_s, aQ)),
sk = H(Ka, r, ID_i, ID_s), Auth_s = H(Ka, H(PW, b), r, sk) and
Auth_i = H(Ka, H(PW, b), r+1, sk).

The server's reply is a function of H(PW, b) that anyone holding the card
and one server reply can test candidate passwords against offline.
"""

import hmac
import logging
from dataclasses import dataclass, field
from enum import Enum
from random import Random
from typing import Dict, Iterable, List, Optional, Set, Tuple

from ..crypto_core import (
    L,
    Digest,
    G1Element,
    G2Element,
    HashPart,
    Scalar,
    SealedBox,
    SymKey,
    g1_base_mul,
    g1_scale,
    identity_digest,
    identity_from_digest,
    increment_digest,
    map_to_point,
    pairing,
    sym_decrypt,
    sym_encrypt,
    tuple_hash,
)
from ..exceptions import (
    IntegrityError,
    MessageFormatError,
    ProtocolRejected,
    RegistrationError,
    RejectReason,
)
from ..models import FoundPassword
from ..simnet import ServerOracle
from .base import MessageReader, frame, guess_offline, handle_protocol_errors, id_field, require_phase

logger = logging.getLogger(__name__)

PROTOCOL = "juang"

TAG_REGISTER = 0x01
TAG_LOGIN = 0x02
TAG_AUTH_S = 0x03
TAG_AUTH_I = 0x04


class UserPhase(str, Enum):
    SENT_LOGIN = "sent_login"
    DONE = "done"


class ServerPhase(str, Enum):
    SENT_AUTH = "sent_auth"
    ACCEPTED = "accepted"
    REJECTED = "rejected"


@dataclass
class JuangServerState:
    s: Scalar
    x: SymKey
    P_s: G1Element
    ID_s: str
    registered_ids: Set[str] = field(default_factory=set)

    def to_bytes(self) -> bytes:
        ids = b"".join(id_field(name) for name in sorted(self.registered_ids))
        return self.s.to_bytes() + self.x.to_bytes() + self.P_s.to_bytes() + id_field(self.ID_s) + ids


@dataclass(frozen=True)
class JuangCard:
    b: Digest
    b_i: SealedBox

    def fields_hex(self) -> Dict[str, str]:
        return {"b": self.b.hex(), "b_i": self.b_i.to_bytes().hex()}


@dataclass
class JuangUserSession:
    a: Scalar
    Ka: Digest
    ID_i: str
    ID_s: str
    phase: UserPhase = UserPhase.SENT_LOGIN
    sk: Optional[Digest] = None


@dataclass
class JuangServerSession:
    Ka: Digest
    r: Digest
    sk: Digest
    hpwb: Digest
    ID_i: str
    phase: ServerPhase = ServerPhase.SENT_AUTH


@dataclass(frozen=True)
class JuangRegistrationMsg:
    ID_i: str
    hpwb: Digest

    def encode(self) -> bytes:
        return frame(TAG_REGISTER, [id_field(self.ID_i), self.hpwb.value])

    @classmethod
    def decode(cls, payload: bytes) -> "JuangRegistrationMsg":
        reader = MessageReader(payload, TAG_REGISTER, "juang registration")
        msg = cls(ID_i=reader.identity(), hpwb=reader.digest())
        reader.finish()
        return msg


@dataclass(frozen=True)
class JuangLoginMsg:
    aP: G1Element
    alpha: SealedBox

    def encode(self) -> bytes:
        return frame(TAG_LOGIN, [self.aP.to_bytes(), self.alpha.to_bytes()])

    @classmethod
    def decode(cls, payload: bytes) -> "JuangLoginMsg":
        reader = MessageReader(payload, TAG_LOGIN, "juang login")
        try:
            aP = G1Element.from_bytes(reader.take(L))
            alpha = SealedBox.from_bytes(reader.rest())
        except (ValueError, IntegrityError) as e:
            raise MessageFormatError(f"juang login: {e}") from e
        return cls(aP=aP, alpha=alpha)


@dataclass(frozen=True)
class JuangAuthSMsg:
    auth_s: Digest
    r: Digest

    def encode(self) -> bytes:
        return frame(TAG_AUTH_S, [self.auth_s.value, self.r.value])

    @classmethod
    def decode(cls, payload: bytes) -> "JuangAuthSMsg":
        reader = MessageReader(payload, TAG_AUTH_S, "juang server authenticator")
        msg = cls(auth_s=reader.digest(), r=reader.digest())
        reader.finish()
        return msg


@dataclass(frozen=True)
class JuangAuthIMsg:
    auth_i: Digest

    def encode(self) -> bytes:
        return frame(TAG_AUTH_I, [self.auth_i.value])

    @classmethod
    def decode(cls, payload: bytes) -> "JuangAuthIMsg":
        reader = MessageReader(payload, TAG_AUTH_I, "juang user authenticator")
        msg = cls(auth_i=reader.digest())
        reader.finish()
        return msg


def password_digest(password: bytes, b: Digest) -> Digest:
    """H(PW, b), computed on the user side."""
    return tuple_hash([password, b])


def derive_ka(aP: G1Element, P_s: G1Element, Q: G1Element, shared: G2Element) -> Digest:
    parts: List[HashPart] = [aP, P_s, Q, shared]
    return tuple_hash(parts)


def session_key(Ka: Digest, r: Digest, ID_i: str, ID_s: str) -> Digest:
    return tuple_hash([Ka, r, identity_digest(ID_i), identity_digest(ID_s)])


def authenticator(Ka: Digest, hpwb: Digest, r: Digest, sk: Digest) -> Digest:
    return tuple_hash([Ka, hpwb, r, sk])


def juang_setup(rng: Random, server_id: str = "S") -> JuangServerState:
    """Choose the secrets s, x and publish P_s = sP."""
    s = Scalar.random(rng)
    x = SymKey.random(rng)
    logger.debug(f"Juang server '{server_id}' set up")
    return JuangServerState(s=s, x=x, P_s=g1_base_mul(s), ID_s=server_id)


def juang_register(
    server: JuangServerState, ID_i: str, hpwb: Digest, b: Digest, rng: Random
) -> JuangCard:
    """Issue a card holding b and b_i = E_x[H(PW,b), ID_i, H(H(PW,b), ID_i)]."""
    if ID_i in server.registered_ids:
        raise RegistrationError(f"identity '{ID_i}' is already registered", ID_i)
    id_digest = identity_digest(ID_i)
    inner = hpwb.value + id_digest.value + tuple_hash([hpwb, id_digest]).value
    b_i = sym_encrypt(server.x, inner, rng)
    server.registered_ids.add(ID_i)
    logger.info(f"Registered '{ID_i}' with Juang server '{server.ID_s}'")
    return JuangCard(b=b, b_i=b_i)


def juang_login_start(
    card: JuangCard, ID_i: str, ID_s: str, P_s: G1Element, rng: Random
) -> Tuple[JuangLoginMsg, JuangUserSession]:
    """Pick a, derive Ka from e(P_s, aQ) and send {aP, E_Ka[b_i]}."""
    a = Scalar.random(rng)
    aP = g1_base_mul(a)
    Q = map_to_point(ID_s.encode("utf-8"))
    Ka = derive_ka(aP, P_s, Q, pairing(P_s, g1_scale(Q, a)))
    alpha = sym_encrypt(SymKey.from_digest(Ka), card.b_i.to_bytes(), rng)
    return JuangLoginMsg(aP=aP, alpha=alpha), JuangUserSession(a=a, Ka=Ka, ID_i=ID_i, ID_s=ID_s)


@handle_protocol_errors(PROTOCOL, "answering a juang login")
def juang_server_respond(
    server: JuangServerState, msg: JuangLoginMsg, rng: Random
) -> Tuple[JuangAuthSMsg, JuangServerSession]:
    Q = map_to_point(server.ID_s.encode("utf-8"))
    Ka = derive_ka(msg.aP, server.P_s, Q, pairing(msg.aP, g1_scale(Q, server.s)))
    b_i = SealedBox.from_bytes(sym_decrypt(SymKey.from_digest(Ka), msg.alpha))
    inner = sym_decrypt(server.x, b_i)
    if len(inner) != 3 * L:
        raise ProtocolRejected(RejectReason.MALFORMED, PROTOCOL)
    hpwb, id_digest, tag = Digest(inner[:L]), Digest(inner[L:2 * L]), Digest(inner[2 * L:])
    # Inner tag H(H(PW,b), ID_i) is checked here, the only server touchpoint.
    if not hmac.compare_digest(tuple_hash([hpwb, id_digest]).value, tag.value):
        raise ProtocolRejected(RejectReason.BAD_AUTHENTICATOR, PROTOCOL)
    try:
        ID_i = identity_from_digest(id_digest)
    except UnicodeDecodeError:
        raise ProtocolRejected(RejectReason.MALFORMED, PROTOCOL) from None
    if ID_i not in server.registered_ids:
        raise ProtocolRejected(RejectReason.UNKNOWN_ID, PROTOCOL)
    r = Digest.random(rng)
    sk = session_key(Ka, r, ID_i, server.ID_s)
    auth_s = authenticator(Ka, hpwb, r, sk)
    logger.debug(f"Juang server answered login of '{ID_i}'")
    return JuangAuthSMsg(auth_s=auth_s, r=r), JuangServerSession(Ka=Ka, r=r, sk=sk, hpwb=hpwb, ID_i=ID_i)


@handle_protocol_errors(PROTOCOL, "verifying the juang server")
def juang_user_finish(
    session: JuangUserSession, card: JuangCard, password: bytes, msg: JuangAuthSMsg
) -> Tuple[JuangAuthIMsg, Digest]:
    """Check Auth_s and answer with Auth_i over r+1."""
    require_phase(PROTOCOL, session.phase, UserPhase.SENT_LOGIN)
    hpwb = password_digest(password, card.b)
    sk = session_key(session.Ka, msg.r, session.ID_i, session.ID_s)
    if not hmac.compare_digest(authenticator(session.Ka, hpwb, msg.r, sk).value, msg.auth_s.value):
        raise ProtocolRejected(RejectReason.BAD_AUTHENTICATOR, PROTOCOL)
    session.sk = sk
    session.phase = UserPhase.DONE
    return JuangAuthIMsg(auth_i=authenticator(session.Ka, hpwb, increment_digest(msg.r), sk)), sk


@handle_protocol_errors(PROTOCOL, "verifying the juang user")
def juang_server_accept(session: JuangServerSession, msg: JuangAuthIMsg) -> Digest:
    """Accept the user and return the agreed session key."""
    require_phase(PROTOCOL, session.phase, ServerPhase.SENT_AUTH)
    expected = authenticator(session.Ka, session.hpwb, increment_digest(session.r), session.sk)
    if not hmac.compare_digest(expected.value, msg.auth_i.value):
        session.phase = ServerPhase.REJECTED
        raise ProtocolRejected(RejectReason.BAD_AUTHENTICATOR, PROTOCOL)
    session.phase = ServerPhase.ACCEPTED
    logger.info(f"Juang server accepted '{session.ID_i}'")
    return session.sk


def attack_juang_offline_guess(
    stolen: JuangCard,
    ID_c: str,
    ID_s: str,
    P_s: G1Element,
    dictionary: Iterable[str],
    server_oracle: ServerOracle,
    rng: Random,
) -> FoundPassword:
    """Replay the stolen b_c in one login, then test candidates against Auth_s offline.

    Raises:
        PasswordNotFoundError: no dictionary entry matched
    """
    login, session = juang_login_start(stolen, ID_c, ID_s, P_s, rng)
    reply = JuangAuthSMsg.decode(server_oracle.request(login.encode()))
    Kc = session.Ka
    # sk does not depend on the password; compute it once.
    sk = session_key(Kc, reply.r, ID_c, ID_s)

    def matches(candidate: bytes) -> bool:
        return authenticator(Kc, password_digest(candidate, stolen.b), reply.r, sk) == reply.auth_s

    found = guess_offline(dictionary, matches, login_requests_sent=server_oracle.requests_sent)
    logger.info(f"Recovered juang password of '{ID_c}' after {found.guesses_tried} guesses")
    return found
