"""
Card-local password verification and change for Hsiang et al., and the
lost-card offline guessing attack.

The card holds R = P xor H(b xor PW), b and V = H(P xor H(PW)). Both
equations can be evaluated for any candidate password with nothing but the
card, so the card itself is the guessing oracle.
"""

import logging
from dataclasses import dataclass, replace
from typing import Dict, Iterable

from ..crypto_core import Digest, pad_to_digest, tuple_hash
from ..exceptions import ProtocolRejected, RejectReason
from ..models import FoundPassword
from .base import guess_offline

logger = logging.getLogger(__name__)

PROTOCOL = "hsiang"


@dataclass(frozen=True)
class HsiangSecretP:
    """Server-derived card secret. Only R encodes it on the card."""

    P: Digest


@dataclass(frozen=True)
class HsiangCard:
    R: Digest
    b: Digest
    V: Digest

    def fields_hex(self) -> Dict[str, str]:
        return {"R": self.R.hex(), "b": self.b.hex(), "V": self.V.hex()}

    def to_bytes(self) -> bytes:
        return self.R.value + self.b.value + self.V.value


def _mask(b: Digest, password: bytes) -> Digest:
    return tuple_hash([b ^ pad_to_digest(password)])


def _verifier(P: Digest, password: bytes) -> Digest:
    return tuple_hash([P ^ tuple_hash([pad_to_digest(password)])])


def recover_secret(card: HsiangCard, password: bytes) -> Digest:
    """P* = R xor H(b xor PW)."""
    return card.R ^ _mask(card.b, password)


def hsiang_card_init(P: HsiangSecretP, b: Digest, password: bytes) -> HsiangCard:
    return HsiangCard(R=P.P ^ _mask(b, password), b=b, V=_verifier(P.P, password))


def hsiang_verify_password(card: HsiangCard, password: bytes) -> bool:
    """Compute V* from the candidate and compare it with V."""
    return _verifier(recover_secret(card, password), password) == card.V


def hsiang_change_password(card: HsiangCard, old_password: bytes, new_password: bytes) -> HsiangCard:
    """Return a card re-keyed to new_password. Both R and V are replaced; b is kept.

    Raises:
        ProtocolRejected: old_password does not verify
    """
    if not hsiang_verify_password(card, old_password):
        logger.warning("Password change refused: old password did not verify")
        raise ProtocolRejected(RejectReason.WRONG_PASSWORD, PROTOCOL)
    P = recover_secret(card, old_password)
    logger.debug("Hsiang card password changed")
    return replace(card, R=P ^ _mask(card.b, new_password), V=_verifier(P, new_password))


def attack_hsiang_offline_guess(stolen: HsiangCard, dictionary: Iterable[str]) -> FoundPassword:
    """Test each candidate against V with the stolen card alone.

    Raises:
        PasswordNotFoundError: no dictionary entry matched
    """
    found = guess_offline(dictionary, lambda candidate: hsiang_verify_password(stolen, candidate))
    logger.info(f"Recovered hsiang password after {found.guesses_tried} guesses")
    return found
