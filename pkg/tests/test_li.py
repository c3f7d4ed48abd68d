import pytest

from card_auth_lab.crypto_core import Digest, tuple_hash
from card_auth_lab.exceptions import PasswordNotFoundError, ProtocolRejected, RegistrationError, RejectReason
from card_auth_lab.models import OutcomeKind
from card_auth_lab.protocols.li import (
    LiChallengeMsg,
    LiRegistrationMsg,
    ServerPhase,
    attack_li_offline_guess,
    keyed_identity,
    li_login_start,
    li_register,
    li_server_accept,
    li_server_respond,
    li_setup,
    li_user_finish,
    password_mask,
)
from card_auth_lab.scenarios import attack_li, honest_li, replay_li

PASSWORD = b"willow21"
BIOMETRIC = b"fingerprint:alice"


@pytest.fixture
def enrolled(rng):
    server = li_setup(rng)
    return server, li_register(server, "C", PASSWORD, BIOMETRIC)


@pytest.mark.unit
class TestLiRegistration:
    """Test cases for li card issue"""

    def test_card_fields(self, enrolled):
        """Test f_c = H(B_c) and e_c = H(ID, x) xor H(PW, f_c)"""
        server, card = enrolled
        assert card.f_c == tuple_hash([BIOMETRIC])
        assert card.e_c == keyed_identity("C", server.x) ^ password_mask(PASSWORD, card.f_c)

    def test_empty_biometric_rejected(self, rng):
        """Test that registration needs a biometric"""
        with pytest.raises(RegistrationError):
            li_register(li_setup(rng), "C", PASSWORD, b"")

    def test_duplicate_registration_rejected(self, enrolled):
        """Test one card per identity"""
        server, _ = enrolled
        with pytest.raises(RegistrationError):
            li_register(server, "C", PASSWORD, BIOMETRIC)

    def test_registration_message_strips_padding(self):
        """Test that the padded password decodes back to its bytes"""
        msg = LiRegistrationMsg("C", PASSWORD, BIOMETRIC)
        decoded = LiRegistrationMsg.decode(msg.encode())
        assert decoded == msg


@pytest.mark.unit
class TestLiLogin:
    """Test cases for the four-message li login"""

    def test_honest_exchange_accepted_both_ways(self, rng, enrolled):
        """Test that the user accepts M_6 and the server accepts M_8"""
        server, card = enrolled
        login, user_session = li_login_start(card, PASSWORD, BIOMETRIC, rng)
        challenge, server_session = li_server_respond(server, login, rng)
        assert server_session.M_4 == user_session.R_c
        response = li_user_finish(user_session, card, PASSWORD, challenge)
        li_server_accept(server_session, response)
        assert user_session.accepted
        assert server_session.phase == ServerPhase.ACCEPTED

    def test_biometric_mismatch(self, rng, enrolled):
        """Test that the device refuses another fingerprint before any message"""
        _, card = enrolled
        with pytest.raises(ProtocolRejected) as exc_info:
            li_login_start(card, PASSWORD, b"fingerprint:mallory", rng)
        assert exc_info.value.reason == RejectReason.BIOMETRIC_MISMATCH

    def test_wrong_password_fails_server_check_at_user(self, rng, enrolled):
        """Test that a wrong password makes M_6 fail on the user side"""
        server, card = enrolled
        login, user_session = li_login_start(card, b"willow22", BIOMETRIC, rng)
        challenge, _ = li_server_respond(server, login, rng)
        with pytest.raises(ProtocolRejected) as exc_info:
            li_user_finish(user_session, card, b"willow22", challenge)
        assert exc_info.value.reason == RejectReason.BAD_AUTHENTICATOR

    def test_unknown_identity(self, rng, enrolled):
        """Test that the server refuses unregistered IDs"""
        server, card = enrolled
        login, _ = li_login_start(card, PASSWORD, BIOMETRIC, rng)
        server.registered_ids.clear()
        with pytest.raises(ProtocolRejected) as exc_info:
            li_server_respond(server, login, rng)
        assert exc_info.value.reason == RejectReason.UNKNOWN_ID

    def test_tampered_m8_rejected(self, rng, enrolled):
        """Test that the server rejects a corrupted M_8 and stays rejected"""
        server, card = enrolled
        login, user_session = li_login_start(card, PASSWORD, BIOMETRIC, rng)
        challenge, server_session = li_server_respond(server, login, rng)
        response = li_user_finish(user_session, card, PASSWORD, challenge)
        tampered = type(response)(M_8=response.M_8 ^ Digest(b"\x01" + bytes(31)))
        with pytest.raises(ProtocolRejected):
            li_server_accept(server_session, tampered)
        with pytest.raises(ProtocolRejected) as exc_info:
            li_server_accept(server_session, response)
        assert exc_info.value.reason == RejectReason.OUT_OF_PHASE

    def test_tampered_m6_rejected_by_user(self, rng, enrolled):
        """Test that a corrupted M_6 fails the user check and the session stays open"""
        server, card = enrolled
        login, user_session = li_login_start(card, PASSWORD, BIOMETRIC, rng)
        challenge, _ = li_server_respond(server, login, rng)
        tampered = LiChallengeMsg(M_5=challenge.M_5, M_6=challenge.M_6 ^ Digest(bytes(31) + b"\x01"))
        with pytest.raises(ProtocolRejected) as exc_info:
            li_user_finish(user_session, card, PASSWORD, tampered)
        assert exc_info.value.reason == RejectReason.BAD_AUTHENTICATOR
        assert not user_session.accepted

    def test_tampered_m5_rejected_by_server(self, rng, enrolled):
        """Test that M_6 does not cover M_5, so the user answers and the server refuses M_8"""
        server, card = enrolled
        login, user_session = li_login_start(card, PASSWORD, BIOMETRIC, rng)
        challenge, server_session = li_server_respond(server, login, rng)
        tampered = LiChallengeMsg(M_5=challenge.M_5 ^ Digest(b"\x80" + bytes(31)), M_6=challenge.M_6)
        response = li_user_finish(user_session, card, PASSWORD, tampered)
        assert user_session.accepted
        with pytest.raises(ProtocolRejected) as exc_info:
            li_server_accept(server_session, response)
        assert exc_info.value.reason == RejectReason.BAD_AUTHENTICATOR
        assert server_session.phase == ServerPhase.REJECTED


@pytest.mark.unit
class TestLiAttack:
    """Test cases for the single-login-request guessing attack"""

    @pytest.mark.parametrize("size", [10, 1000, 10000])
    def test_recovers_password_with_one_request(self, size, make_dictionary):
        """Test recovery from dictionaries of several sizes"""
        dictionary, index = make_dictionary(size, size, "ember12")
        outcome = attack_li(0, dictionary, "alice", b"ember12", BIOMETRIC).outcome
        assert outcome.outcome == OutcomeKind.FOUND_PASSWORD
        assert outcome.recovered_password == "ember12"
        assert outcome.guesses_tried == index + 1
        assert outcome.login_requests_sent == 1
        assert outcome.online_messages == 2

    def test_session_is_abandoned(self):
        """Test that no M_8 is ever sent"""
        run = attack_li(0, ["ember12"], "alice", b"ember12", BIOMETRIC)
        transcript = run.scenario.transcript
        assert transcript.of_kind("li.response") == []
        assert "session_abandoned" in [event.label for event in transcript.events]

    def test_random_m6_defeats_the_attack(self, rng, enrolled, mocker):
        """Test the negative control: a reply independent of the password yields nothing"""
        _, card = enrolled
        oracle = mocker.Mock()
        oracle.requests_sent = 1
        oracle.request.return_value = LiChallengeMsg(M_5=Digest.random(rng), M_6=Digest.random(rng)).encode()
        with pytest.raises(PasswordNotFoundError) as exc_info:
            attack_li_offline_guess(card, ["willow20", "willow21", "willow22"], oracle, rng)
        assert exc_info.value.guesses_tried == 3
        assert exc_info.value.login_requests_sent == 1

    @pytest.mark.slow
    def test_recovers_password_across_seeds(self, make_dictionary):
        """Test 50 seeded scenarios with 1000-entry dictionaries"""
        for seed in range(50):
            password = f"pw-{seed}"
            dictionary, index = make_dictionary(1000, seed, password)
            outcome = attack_li(seed, dictionary, "alice", password.encode(), BIOMETRIC).outcome
            assert outcome.recovered_password == password
            assert outcome.guesses_tried == index + 1
            assert outcome.login_requests_sent == 1


@pytest.mark.integration
class TestLiScenarios:
    """Test cases for scripted li runs"""

    def test_honest_run(self):
        """Test acceptance on both sides and nonce recovery"""
        outcome = honest_li(0, "alice", PASSWORD, BIOMETRIC).outcome
        assert outcome.outcome == OutcomeKind.ACCEPTED
        assert outcome.online_messages == 3
        assert outcome.details == {"nonce_recovered": "true", "user_accepted_server": "true"}

    def test_wrong_biometric_sends_nothing(self):
        """Test that a biometric mismatch stops before the network"""
        outcome = honest_li(0, "alice", PASSWORD, BIOMETRIC, login_biometric=b"fingerprint:mallory").outcome
        assert outcome.reason == "biometric_mismatch"
        assert outcome.online_messages == 0

    def test_replayed_response_rejected(self):
        """Test that an old M_8 fails against a fresh R_s"""
        outcome = replay_li(0, "alice", PASSWORD, BIOMETRIC).outcome
        assert outcome.outcome == OutcomeKind.REJECTED
        assert outcome.reason == "bad_authenticator"

    def test_registration_carries_password(self):
        """Test that the registration channel holds the padded password"""
        run = honest_li(0, "alice", PASSWORD, BIOMETRIC)
        assert run.scenario.transcript.find_bytes(PASSWORD, "li.register")

    @pytest.mark.slow
    def test_honest_runs_across_seeds(self):
        """Test 100 seeded honest runs with nonce recovery on both sides"""
        for seed in range(100):
            outcome = honest_li(seed, f"user-{seed}", f"pw-{seed}".encode(), f"fingerprint:{seed}".encode()).outcome
            assert outcome.outcome == OutcomeKind.ACCEPTED, seed
            assert outcome.details["nonce_recovered"] == "true"
            assert outcome.details["user_accepted_server"] == "true"
