"""
Simulation-grade cryptographic primitives.

Every protocol value is built from a small set of primitives: a tuple hash
over length-prefixed parts, XOR over fixed-width digests, an additive group
G1 with a symmetric pairing into G2, the order-Q subgroup of the integers
modulo P_MOD, and a hash-based authenticated stream cipher.

G1 and G2 elements carry their discrete logarithm, so the pairing is exact
and cheap. Nothing in this module is computationally hard.
"""

import hashlib
import hmac
import logging
from dataclasses import dataclass
from random import Random
from typing import Protocol, Sequence, Tuple, Union

import sympy

from .exceptions import EncodingLengthError, IntegrityError

logger = logging.getLogger(__name__)

# Width of every digest, key, nonce, padded identity and padded password.
L = 32
LENGTH_PREFIX_BYTES = 8
COUNTER_BYTES = 8

# Prime order shared by G1, G2 and the multiplicative subgroup.
Q = 2**255 - 19


def _derive_modulus(q: int) -> Tuple[int, int]:
    """Smallest even cofactor k with k*q + 1 prime."""
    k = 2
    while not sympy.isprime(k * q + 1):
        k += 2
    return k * q + 1, k


def _derive_generator(p: int, cofactor: int) -> int:
    h = 2
    while pow(h, cofactor, p) == 1:
        h += 1
    return pow(h, cofactor, p)


P_MOD, COFACTOR = _derive_modulus(Q)
G = _derive_generator(P_MOD, COFACTOR)
MOD_BYTES = (P_MOD.bit_length() + 7) // 8

_TWO_TO_L_BITS = 1 << (8 * L)


class Encodable(Protocol):
    def to_bytes(self) -> bytes: ...


HashPart = Union[bytes, Encodable]


@dataclass(frozen=True, slots=True)
class Digest:
    """Fixed-length L-byte string: hashes, XOR operands, nonces."""

    value: bytes

    def __post_init__(self) -> None:
        if len(self.value) != L:
            raise EncodingLengthError(
                f"digest must be {L} bytes, got {len(self.value)}", len(self.value)
            )

    @classmethod
    def zero(cls) -> "Digest":
        return cls(bytes(L))

    @classmethod
    def random(cls, rng: Random) -> "Digest":
        return cls(rng.randbytes(L))

    @classmethod
    def from_hex(cls, text: str) -> "Digest":
        return cls(bytes.fromhex(text))

    def to_bytes(self) -> bytes:
        return self.value

    def hex(self) -> str:
        return self.value.hex()

    def __xor__(self, other: "Digest") -> "Digest":
        return xor(self, other)


@dataclass(frozen=True, slots=True)
class Scalar:
    """Integer in [0, Q)."""

    value: int

    def __post_init__(self) -> None:
        if not 0 <= self.value < Q:
            raise ValueError(f"scalar out of range [0, q): {self.value}")

    @classmethod
    def random(cls, rng: Random) -> "Scalar":
        """Uniform non-zero scalar."""
        return cls(rng.randrange(1, Q))

    def to_bytes(self) -> bytes:
        return self.value.to_bytes(L, "big")


@dataclass(frozen=True, slots=True)
class G1Element:
    """s*P, represented by its coefficient s."""

    exponent: Scalar

    def __add__(self, other: "G1Element") -> "G1Element":
        return G1Element(Scalar((self.exponent.value + other.exponent.value) % Q))

    def is_identity(self) -> bool:
        return self.exponent.value == 0

    def to_bytes(self) -> bytes:
        return self.exponent.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "G1Element":
        return cls(Scalar(int.from_bytes(data, "big")))


@dataclass(frozen=True, slots=True)
class G2Element:
    """e(P, P)^k, represented by k."""

    exponent: Scalar

    def __mul__(self, other: "G2Element") -> "G2Element":
        return G2Element(Scalar((self.exponent.value + other.exponent.value) % Q))

    def is_identity(self) -> bool:
        return self.exponent.value == 0

    def to_bytes(self) -> bytes:
        return self.exponent.to_bytes()


@dataclass(frozen=True, slots=True)
class ModGroupElement:
    """Member of the order-Q subgroup of the integers modulo P_MOD."""

    value: int

    def __post_init__(self) -> None:
        if not 1 <= self.value < P_MOD:
            raise ValueError("group element out of range [1, p)")
        if pow(self.value, Q, P_MOD) != 1:
            raise ValueError("value is not in the order-q subgroup")

    def to_bytes(self) -> bytes:
        return mod_int_to_bytes(self.value)

    @classmethod
    def from_bytes(cls, data: bytes) -> "ModGroupElement":
        return cls(int.from_bytes(data, "big"))


@dataclass(frozen=True, slots=True)
class SymKey:
    key: bytes

    def __post_init__(self) -> None:
        if len(self.key) != L:
            raise EncodingLengthError(f"key must be {L} bytes, got {len(self.key)}", len(self.key))

    @classmethod
    def random(cls, rng: Random) -> "SymKey":
        return cls(rng.randbytes(L))

    @classmethod
    def from_digest(cls, digest: Digest) -> "SymKey":
        return cls(digest.value)

    def to_bytes(self) -> bytes:
        return self.key


@dataclass(frozen=True, slots=True)
class SealedBox:
    """Authenticated ciphertext: nonce, body and tag.

    Serialized as nonce || tag || body; the body takes whatever remains.
    """

    nonce: bytes
    body: bytes
    tag: Digest

    def to_bytes(self) -> bytes:
        return self.nonce + self.tag.value + self.body

    @classmethod
    def from_bytes(cls, data: bytes) -> "SealedBox":
        if len(data) < 2 * L:
            raise IntegrityError(f"sealed box too short: {len(data)} bytes")
        return cls(nonce=data[:L], body=data[2 * L:], tag=Digest(data[L:2 * L]))


GENERATOR = G1Element(Scalar(1))
G1_IDENTITY = G1Element(Scalar(0))
G2_IDENTITY = G2Element(Scalar(0))


def tuple_hash(parts: Sequence[HashPart]) -> Digest:
    """SHA-256 over 8-byte big-endian length-prefixed parts."""
    if not parts:
        raise ValueError("tuple_hash needs at least one part")
    h = hashlib.sha256()
    for part in parts:
        data = part if isinstance(part, bytes) else part.to_bytes()
        h.update(len(data).to_bytes(LENGTH_PREFIX_BYTES, "big"))
        h.update(data)
    return Digest(h.digest())


def xor(a: Digest, b: Digest) -> Digest:
    mixed = int.from_bytes(a.value, "big") ^ int.from_bytes(b.value, "big")
    return Digest(mixed.to_bytes(L, "big"))


def pad_to_digest(s: bytes) -> Digest:
    """Right-pad with zero bytes to L. Rejects longer inputs."""
    if len(s) > L:
        raise EncodingLengthError(
            f"value of {len(s)} bytes does not fit a {L}-byte digest", len(s)
        )
    return Digest(s.ljust(L, b"\x00"))


def identity_digest(name: str) -> Digest:
    return pad_to_digest(name.encode("utf-8"))


def identity_from_digest(digest: Digest) -> str:
    return digest.value.rstrip(b"\x00").decode("utf-8")


def digest_as_integer(d: Digest) -> int:
    return int.from_bytes(d.value, "big")


def increment_digest(d: Digest) -> Digest:
    """Big-endian +1 with wraparound."""
    return Digest(((digest_as_integer(d) + 1) % _TWO_TO_L_BITS).to_bytes(L, "big"))


def mod_int_to_bytes(n: int) -> bytes:
    return n.to_bytes(MOD_BYTES, "big")


def g1_base_mul(s: Scalar) -> G1Element:
    return G1Element(s)


def g1_scale(x: G1Element, s: Scalar) -> G1Element:
    return G1Element(Scalar(x.exponent.value * s.value % Q))


def pairing(x: G1Element, y: G1Element) -> G2Element:
    return G2Element(Scalar(x.exponent.value * y.exponent.value % Q))


def g2_pow(z: G2Element, s: Scalar) -> G2Element:
    return G2Element(Scalar(z.exponent.value * s.value % Q))


def _hash_to_exponent(label: bytes, data: bytes) -> int:
    # Zero would give the identity; remap it.
    exponent = digest_as_integer(tuple_hash([label, data])) % Q
    return exponent or 1


def map_to_point(identity: bytes) -> G1Element:
    """Map-to-point hash h: {0,1}* -> G1, never the identity."""
    if not identity:
        raise ValueError("map_to_point needs a non-empty identity")
    return G1Element(Scalar(_hash_to_exponent(b"map2point", identity)))


def mod_hash_to_group(identity: bytes) -> ModGroupElement:
    """Hash an identity into the order-Q subgroup as G^e."""
    if not identity:
        raise ValueError("mod_hash_to_group needs a non-empty identity")
    return ModGroupElement(pow(G, _hash_to_exponent(b"hash2group", identity), P_MOD))


def mod_pow(x: ModGroupElement, s: Scalar) -> ModGroupElement:
    return ModGroupElement(pow(x.value, s.value, P_MOD))


def _keystream(key: SymKey, nonce: bytes, length: int) -> bytes:
    blocks = []
    for counter in range((length + L - 1) // L):
        blocks.append(
            tuple_hash([b"keystream", key.key, nonce, counter.to_bytes(COUNTER_BYTES, "big")]).value
        )
    return b"".join(blocks)[:length]


def _xor_bytes(data: bytes, stream: bytes) -> bytes:
    if not data:
        return b""
    mixed = int.from_bytes(data, "big") ^ int.from_bytes(stream, "big")
    return mixed.to_bytes(len(data), "big")


def _seal_tag(key: SymKey, nonce: bytes, body: bytes) -> Digest:
    return tuple_hash([b"tag", key.key, nonce, body])


def sym_encrypt(key: SymKey, plaintext: bytes, rng: Random) -> SealedBox:
    """Encrypt under a fresh nonce drawn from rng."""
    nonce = rng.randbytes(L)
    body = _xor_bytes(plaintext, _keystream(key, nonce, len(plaintext)))
    return SealedBox(nonce=nonce, body=body, tag=_seal_tag(key, nonce, body))


def sym_decrypt(key: SymKey, box: SealedBox) -> bytes:
    """Return the plaintext, or raise IntegrityError if key or box is not authentic."""
    if len(box.nonce) != L:
        raise IntegrityError("nonce has the wrong width")
    expected = _seal_tag(key, box.nonce, box.body)
    if not hmac.compare_digest(expected.value, box.tag.value):
        raise IntegrityError("sealed box failed its integrity check")
    return _xor_bytes(box.body, _keystream(key, box.nonce, len(box.body)))


logger.debug(f"Group constants ready: q={Q.bit_length()} bits, p={P_MOD.bit_length()} bits, cofactor={COFACTOR}")
