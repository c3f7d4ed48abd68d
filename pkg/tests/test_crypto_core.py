import itertools
import random
from typing import Set, Tuple

import pytest
import sympy

from card_auth_lab.crypto_core import (
    COFACTOR,
    G,
    G1_IDENTITY,
    L,
    MOD_BYTES,
    P_MOD,
    Q,
    Digest,
    G1Element,
    ModGroupElement,
    Scalar,
    SealedBox,
    SymKey,
    digest_as_integer,
    g1_base_mul,
    g1_scale,
    g2_pow,
    identity_digest,
    identity_from_digest,
    increment_digest,
    map_to_point,
    mod_hash_to_group,
    mod_pow,
    pad_to_digest,
    pairing,
    sym_decrypt,
    sym_encrypt,
    tuple_hash,
    xor,
)
from card_auth_lab.exceptions import EncodingLengthError, IntegrityError

# SHA-256 of eight zero bytes: the length prefix of a single empty part.
EMPTY_PART_HASH = "af5570f5a1810b7af78caf4bc70a660f0df51e42baf91d4de5b2328de0e83dfc"


@pytest.mark.unit
class TestTupleHash:
    """Test cases for the length-prefixed tuple hash"""

    def test_single_empty_part_matches_known_value(self):
        """Test that hashing one empty part is SHA-256 over its 8-byte zero length prefix"""
        assert tuple_hash([b""]).hex() == EMPTY_PART_HASH

    def test_empty_tuple_rejected(self):
        """Test that a tuple with no parts is refused"""
        with pytest.raises(ValueError):
            tuple_hash([])

    def test_part_boundaries_are_significant(self):
        """Test that moving a byte across a part boundary changes the hash"""
        assert tuple_hash([b"ab", b"c"]) != tuple_hash([b"a", b"bc"])

    def test_encodable_parts_hash_like_their_bytes(self):
        """Test that a Digest part hashes the same as its raw bytes"""
        d = Digest(bytes(range(32)))
        assert tuple_hash([d, b"x"]) == tuple_hash([d.value, b"x"])

    def test_no_collisions_across_split_points(self):
        """Test that every way of splitting the same bytes into parts hashes differently"""
        corpus: Set[Tuple[bytes, ...]] = set()
        for whole in (b"", b"a", b"abc", b"abcabc", b"\x00\x00\x08", bytes(range(7))):
            for cuts in range(4):
                for points in itertools.combinations_with_replacement(range(len(whole) + 1), cuts):
                    bounds = (0, *points, len(whole))
                    corpus.add(tuple(whole[bounds[i]:bounds[i + 1]] for i in range(len(bounds) - 1)))
        digests = {tuple_hash(list(parts)) for parts in corpus}
        assert len(corpus) > 200
        assert len(digests) == len(corpus)

    def test_output_is_l_bytes(self):
        """Test digest width"""
        assert len(tuple_hash([b"anything"]).value) == L


@pytest.mark.unit
class TestDigestOperations:
    """Test cases for XOR, padding and integer views of digests"""

    def test_digest_requires_exact_width(self):
        """Test that a digest of the wrong width is refused"""
        with pytest.raises(EncodingLengthError) as exc_info:
            Digest(b"short")
        assert exc_info.value.length == 5

    def test_xor_is_an_involution(self, rng):
        """Test that xoring twice with the same value restores the original"""
        a, b = Digest.random(rng), Digest.random(rng)
        assert xor(xor(a, b), b) == a
        assert a ^ a == Digest.zero()

    def test_xor_is_commutative_and_associative(self, rng):
        """Test a ^ b == b ^ a and (a ^ b) ^ c == a ^ (b ^ c) over random triples"""
        for _ in range(50):
            a, b, c = Digest.random(rng), Digest.random(rng), Digest.random(rng)
            assert a ^ b == b ^ a
            assert (a ^ b) ^ c == a ^ (b ^ c)
            assert a ^ Digest.zero() == a

    def test_pad_right_fills_with_zero_bytes(self):
        """Test right padding"""
        padded = pad_to_digest(b"pw")
        assert padded.value == b"pw" + bytes(30)

    def test_pad_accepts_exactly_l_bytes(self):
        """Test that a value of exactly L bytes is kept as is"""
        assert pad_to_digest(b"x" * L).value == b"x" * L

    def test_pad_rejects_longer_values(self):
        """Test that values wider than L are refused instead of truncated"""
        with pytest.raises(EncodingLengthError):
            pad_to_digest(b"x" * (L + 1))

    def test_identity_round_trip(self):
        """Test identity padding and recovery"""
        assert identity_from_digest(identity_digest("alice")) == "alice"

    def test_increment_carries(self):
        """Test big-endian increment with carry"""
        d = Digest(bytes(31) + b"\xff")
        assert increment_digest(d).value == bytes(30) + b"\x01\x00"

    def test_increment_wraps_around(self):
        """Test that the all-ones digest wraps to zero"""
        assert increment_digest(Digest(b"\xff" * L)) == Digest.zero()

    def test_digest_as_integer_is_big_endian(self):
        """Test integer interpretation"""
        assert digest_as_integer(Digest(bytes(31) + b"\x02")) == 2


@pytest.mark.unit
class TestPairingGroup:
    """Test cases for G1, G2 and the pairing"""

    def test_pairing_identity_holds_for_random_triples(self):
        """Test e(P_s, aQ) == e(aP, sQ) across 1000 random (a, s, Q) triples"""
        rng = random.Random(7)
        for _ in range(1000):
            a, s = Scalar.random(rng), Scalar.random(rng)
            point = map_to_point(rng.randbytes(8))
            left = pairing(g1_base_mul(s), g1_scale(point, a))
            right = pairing(g1_base_mul(a), g1_scale(point, s))
            assert left == right

    def test_bilinearity(self, rng):
        """Test e(aX, Y) == e(X, Y)^a"""
        a = Scalar.random(rng)
        x, y = map_to_point(b"x"), map_to_point(b"y")
        assert pairing(g1_scale(x, a), y) == g2_pow(pairing(x, y), a)

    def test_g1_addition(self):
        """Test that addition adds coefficients mod Q"""
        assert g1_base_mul(Scalar(Q - 1)) + g1_base_mul(Scalar(1)) == G1_IDENTITY

    def test_map_to_point_is_deterministic_and_not_identity(self):
        """Test map-to-point hashing"""
        assert map_to_point(b"S") == map_to_point(b"S")
        assert map_to_point(b"S") != map_to_point(b"T")
        assert not map_to_point(b"S").is_identity()

    def test_map_to_point_rejects_empty_identity(self):
        """Test that an empty identity cannot be mapped"""
        with pytest.raises(ValueError):
            map_to_point(b"")

    def test_g1_serialization(self, rng):
        """Test G1 element encoding"""
        point = g1_base_mul(Scalar.random(rng))
        assert G1Element.from_bytes(point.to_bytes()) == point

    def test_scalar_range(self):
        """Test that scalars outside [0, Q) are refused"""
        with pytest.raises(ValueError):
            Scalar(Q)
        with pytest.raises(ValueError):
            Scalar(-1)

    def test_random_scalar_is_non_zero(self):
        """Test that sampled scalars are never zero"""
        rng = random.Random(0)
        assert all(Scalar.random(rng).value != 0 for _ in range(100))


@pytest.mark.unit
class TestModularGroup:
    """Test cases for the order-Q subgroup modulo P_MOD"""

    def test_modulus_is_prime_with_q_dividing_p_minus_one(self):
        """Test the derived group constants"""
        assert sympy.isprime(P_MOD)
        assert (P_MOD - 1) == COFACTOR * Q
        assert COFACTOR % 2 == 0
        assert MOD_BYTES == (P_MOD.bit_length() + 7) // 8

    def test_generator_has_order_q(self):
        """Test that G generates the order-Q subgroup"""
        assert G != 1
        assert pow(G, Q, P_MOD) == 1

    def test_key_agreement_identity_for_random_exponent_pairs(self):
        """Test M^v == W^m with M = H^m and W = H^v across 1000 random pairs"""
        rng = random.Random(11)
        base = mod_hash_to_group(b"alice")
        for _ in range(1000):
            v, m = Scalar.random(rng), Scalar.random(rng)
            M, W = mod_pow(base, m), mod_pow(base, v)
            assert mod_pow(M, v) == mod_pow(W, m)

    def test_hash_to_group_lands_in_subgroup(self):
        """Test that hashed identities are subgroup members"""
        element = mod_hash_to_group(b"bob")
        assert pow(element.value, Q, P_MOD) == 1

    def test_non_members_are_refused(self):
        """Test that zero and -1 are not accepted as subgroup elements"""
        with pytest.raises(ValueError):
            ModGroupElement(0)
        with pytest.raises(ValueError):
            ModGroupElement(P_MOD - 1)

    def test_serialization_width(self):
        """Test that group elements serialize to MOD_BYTES"""
        element = mod_hash_to_group(b"carol")
        assert len(element.to_bytes()) == MOD_BYTES
        assert ModGroupElement.from_bytes(element.to_bytes()) == element


@pytest.mark.unit
class TestSymmetricCipher:
    """Test cases for the authenticated stream cipher"""

    def test_round_trip(self, rng):
        """Test that decryption restores the plaintext"""
        key = SymKey.random(rng)
        box = sym_encrypt(key, b"a message longer than one keystream block" * 3, rng)
        assert sym_decrypt(key, box) == b"a message longer than one keystream block" * 3

    def test_empty_plaintext(self, rng):
        """Test that an empty plaintext still carries a valid tag"""
        key = SymKey.random(rng)
        assert sym_decrypt(key, sym_encrypt(key, b"", rng)) == b""

    def test_flipped_body_bit_is_detected(self, rng):
        """Test that tampering with the body fails the integrity check"""
        key = SymKey.random(rng)
        box = sym_encrypt(key, b"payload", rng)
        tampered = SealedBox(nonce=box.nonce, body=bytes([box.body[0] ^ 1]) + box.body[1:], tag=box.tag)
        with pytest.raises(IntegrityError):
            sym_decrypt(key, tampered)

    @pytest.mark.parametrize("index", [0, 15, L - 1])
    @pytest.mark.parametrize("bit", [0, 7])
    def test_flipped_nonce_bit_is_detected(self, rng, index, bit):
        """Test that tampering with the nonce fails the integrity check"""
        key = SymKey.random(rng)
        box = sym_encrypt(key, b"payload", rng)
        nonce = bytearray(box.nonce)
        nonce[index] ^= 1 << bit
        with pytest.raises(IntegrityError):
            sym_decrypt(key, SealedBox(nonce=bytes(nonce), body=box.body, tag=box.tag))

    @pytest.mark.parametrize("index", [0, 15, L - 1])
    @pytest.mark.parametrize("bit", [0, 7])
    def test_flipped_tag_bit_is_detected(self, rng, index, bit):
        """Test that tampering with the tag fails the integrity check"""
        key = SymKey.random(rng)
        box = sym_encrypt(key, b"payload", rng)
        tag = bytearray(box.tag.value)
        tag[index] ^= 1 << bit
        with pytest.raises(IntegrityError):
            sym_decrypt(key, SealedBox(nonce=box.nonce, body=box.body, tag=Digest(bytes(tag))))

    def test_wrong_key_is_detected(self, rng):
        """Test that decrypting under another key fails"""
        box = sym_encrypt(SymKey.random(rng), b"payload", rng)
        with pytest.raises(IntegrityError):
            sym_decrypt(SymKey.random(rng), box)

    def test_fresh_nonce_per_encryption(self, rng):
        """Test that two encryptions of the same plaintext differ"""
        key = SymKey.random(rng)
        assert sym_encrypt(key, b"same", rng) != sym_encrypt(key, b"same", rng)

    def test_sealed_box_serialization(self, rng):
        """Test nonce || tag || body layout"""
        box = sym_encrypt(SymKey.random(rng), b"body", rng)
        data = box.to_bytes()
        assert data[:L] == box.nonce
        assert data[L:2 * L] == box.tag.value
        assert SealedBox.from_bytes(data) == box

    def test_short_box_is_refused(self):
        """Test that truncated boxes fail as integrity errors"""
        with pytest.raises(IntegrityError):
            SealedBox.from_bytes(b"\x00" * (2 * L - 1))
