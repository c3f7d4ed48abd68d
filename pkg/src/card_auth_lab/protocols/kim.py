"""
Card-local password verification and change for Kim et al., and the
lost-card offline guessing attack.

R xor K1 equals H(PW), so one hash per candidate decides a guess.
"""

import logging
from dataclasses import dataclass, replace
from typing import Dict, Iterable

from ..crypto_core import Digest, identity_digest, pad_to_digest, tuple_hash
from ..exceptions import ProtocolRejected, RejectReason
from ..models import FoundPassword
from .base import guess_offline

logger = logging.getLogger(__name__)

PROTOCOL = "kim"


@dataclass(frozen=True)
class KimCard:
    R: Digest
    K1: Digest
    K2: Digest

    def fields_hex(self) -> Dict[str, str]:
        return {"R": self.R.hex(), "K1": self.K1.hex(), "K2": self.K2.hex()}


def _password_hash(password: bytes) -> Digest:
    return tuple_hash([pad_to_digest(password)])


def _password_term(password: bytes) -> Digest:
    """H(PW xor H(PW))."""
    padded = pad_to_digest(password)
    return tuple_hash([padded ^ tuple_hash([padded])])


def kim_card_init(ID: str, x: Digest, N: Digest, password: bytes) -> KimCard:
    id_x = identity_digest(ID) ^ x
    K1 = tuple_hash([id_x]) ^ N
    return KimCard(
        R=K1 ^ _password_hash(password),
        K1=K1,
        K2=tuple_hash([id_x ^ N]) ^ _password_term(password),
    )


def kim_verify_password(card: KimCard, password: bytes) -> bool:
    """K1* = R xor H(PW), compared with K1."""
    return card.R ^ _password_hash(password) == card.K1


def kim_change_password(card: KimCard, old_password: bytes, new_password: bytes) -> KimCard:
    """Verify the old password, then the card prompts for the new one and re-keys R and K2.

    Raises:
        ProtocolRejected: old_password does not verify
    """
    if not kim_verify_password(card, old_password):
        logger.warning("Password change refused: old password did not verify")
        raise ProtocolRejected(RejectReason.WRONG_PASSWORD, PROTOCOL)
    K2 = card.K2 ^ _password_term(old_password) ^ _password_term(new_password)
    logger.debug("Kim card password changed")
    return replace(card, R=card.K1 ^ _password_hash(new_password), K2=K2)


def attack_kim_offline_guess(stolen: KimCard, dictionary: Iterable[str]) -> FoundPassword:
    """Test each candidate with K1' = R xor H(PW') against K1.

    Raises:
        PasswordNotFoundError: no dictionary entry matched
    """
    found = guess_offline(dictionary, lambda candidate: kim_verify_password(stolen, candidate))
    logger.info(f"Recovered kim password after {found.guesses_tried} guesses")
    return found
