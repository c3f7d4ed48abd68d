"""
Scripted Runs

Honest sessions, attacks and replay probes for each protocol, driven over a
Scenario. Every runner returns a ScenarioRun: the outcome record plus the
scenario (for its transcript) and the serialized server state. Protocol
rejections and exhausted dictionaries become outcomes rather than
exceptions, so callers decide how to report them.
"""

import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from .crypto_core import Digest, pad_to_digest, tuple_hash
from .exceptions import PasswordNotFoundError, ProtocolRejected, ScenarioConfigError
from .models import (
    AdversaryMode,
    FoundPassword,
    OutcomeKind,
    ProtocolId,
    ScenarioFixture,
    ScenarioKind,
    ScenarioOutcome,
)
from .protocols import hsiang, juang, kim, li, xu
from .simnet import DEFAULT_DELTA_T, AdversaryPolicy, Scenario, ServerOracle

logger = logging.getLogger(__name__)

SERVER = "S"
ADVERSARY = "E"
NEW_PASSWORD = b"changed-passw0rd"
CHANGE_FAILED = "change_round_trip_failed"
DICTIONARY_EXHAUSTED = "dictionary_exhausted"


@dataclass
class ScenarioRun:
    """An executed scenario and what it produced."""

    outcome: ScenarioOutcome
    scenario: Scenario
    server_state: bytes = b""
    password_derived: List[bytes] = field(default_factory=list)

    @property
    def online_messages(self) -> int:
        return count_online(self.scenario)


def count_online(scenario: Scenario) -> int:
    """Envelopes outside the registration channel."""
    return sum(1 for e in scenario.transcript.entries if not e.envelope.kind.endswith(".register"))


def password_fingerprints(password: bytes) -> List[bytes]:
    """Byte strings whose presence would mean a password-derived value leaked."""
    values = [password]
    try:
        padded = pad_to_digest(password)
    except ValueError:
        return values
    return values + [tuple_hash([password]).value, tuple_hash([padded]).value]


def _exchange(scenario: Scenario, sender: str, recipient: str, payload: bytes, kind: str, delay: int = 0) -> bytes:
    """Post one envelope and have the recipient take it off its inbox."""
    outcome = scenario.post(sender, recipient, payload, kind)
    if not outcome.delivered:
        raise ScenarioConfigError(f"{kind} from '{sender}' was not delivered")
    if delay:
        scenario.advance_clock(delay)
    return scenario.receive(recipient).payload


@contextmanager
def _rejections(scenario: Scenario, party: str) -> Iterator[None]:
    try:
        yield
    except ProtocolRejected as exc:
        scenario.log_rejection(party, exc)
        raise


def distinct_new_password(current: bytes, wanted: bytes) -> bytes:
    """The wanted new password, or a same-length variant of it when it equals the current one."""
    if wanted != current:
        return wanted
    if not wanted:
        return b"\x01"
    return wanted[:-1] + bytes([wanted[-1] ^ 0x01])


def _outcome(scenario: Scenario, protocol: ProtocolId, kind: OutcomeKind, **fields: Any) -> ScenarioOutcome:
    return ScenarioOutcome(
        protocol=protocol, outcome=kind, seed=scenario.seed, online_messages=count_online(scenario), **fields
    )


def _rejected(scenario: Scenario, protocol: ProtocolId, exc: ProtocolRejected) -> ScenarioOutcome:
    logger.info(f"{protocol.value} run rejected: {exc.reason.value}")
    return _outcome(scenario, protocol, OutcomeKind.REJECTED, reason=exc.reason.value)


def _found(scenario: Scenario, protocol: ProtocolId, found: FoundPassword, **fields: Any) -> ScenarioOutcome:
    return _outcome(
        scenario, protocol, OutcomeKind.FOUND_PASSWORD,
        recovered_password=found.password, guesses_tried=found.guesses_tried,
        login_requests_sent=found.login_requests_sent, **fields,
    )


def _not_found(scenario: Scenario, protocol: ProtocolId, exc: PasswordNotFoundError) -> ScenarioOutcome:
    logger.info(f"{protocol.value} attack exhausted the dictionary after {exc.guesses_tried} guesses")
    return _outcome(
        scenario, protocol, OutcomeKind.NOT_FOUND,
        reason=DICTIONARY_EXHAUSTED, guesses_tried=exc.guesses_tried,
        login_requests_sent=exc.login_requests_sent,
    )


# Juang

def _juang_enrol(
    scenario: Scenario, user: str, password: bytes
) -> Tuple[juang.JuangServerState, juang.JuangCard, Digest]:
    scenario.add_party(user)
    scenario.add_party(SERVER)
    state = juang.juang_setup(scenario.rng, SERVER)
    b = Digest.random(scenario.rng)
    hpwb = juang.password_digest(password, b)
    payload = _exchange(scenario, user, SERVER, juang.JuangRegistrationMsg(user, hpwb).encode(), "juang.register")
    registration = juang.JuangRegistrationMsg.decode(payload)
    card = juang.juang_register(state, registration.ID_i, registration.hpwb, b, scenario.rng)
    scenario.issue_card(user, card)
    return state, card, hpwb


def _juang_login(
    scenario: Scenario,
    state: juang.JuangServerState,
    card: juang.JuangCard,
    client: str,
    identity: str,
    password: bytes,
    kind_prefix: str = "juang",
) -> Tuple[Digest, Digest]:
    """Run one full login. Returns (user sk, server sk)."""
    rng = scenario.rng
    login, user_session = juang.juang_login_start(card, identity, state.ID_s, state.P_s, rng)
    payload = _exchange(scenario, client, SERVER, login.encode(), f"{kind_prefix}.login")
    with _rejections(scenario, SERVER):
        auth_s, server_session = juang.juang_server_respond(state, juang.JuangLoginMsg.decode(payload), rng)
    payload = _exchange(scenario, SERVER, client, auth_s.encode(), f"{kind_prefix}.auth_s")
    with _rejections(scenario, client):
        auth_i, user_sk = juang.juang_user_finish(user_session, card, password, juang.JuangAuthSMsg.decode(payload))
    payload = _exchange(scenario, client, SERVER, auth_i.encode(), f"{kind_prefix}.auth_i")
    with _rejections(scenario, SERVER):
        server_sk = juang.juang_server_accept(server_session, juang.JuangAuthIMsg.decode(payload))
    return user_sk, server_sk


def honest_juang(
    seed: int, user: str = "C", password: bytes = b"", login_password: Optional[bytes] = None
) -> ScenarioRun:
    scenario = Scenario(seed)
    state, card, hpwb = _juang_enrol(scenario, user, password)
    derived = password_fingerprints(password) + [hpwb.value]
    try:
        user_sk, server_sk = _juang_login(
            scenario, state, card, user, user, password if login_password is None else login_password
        )
    except ProtocolRejected as exc:
        return ScenarioRun(_rejected(scenario, ProtocolId.JUANG, exc), scenario, state.to_bytes(), derived)
    outcome = _outcome(
        scenario, ProtocolId.JUANG, OutcomeKind.ACCEPTED,
        user_session_key=user_sk.hex(), server_session_key=server_sk.hex(),
    )
    logger.info(f"Honest juang run for '{user}' completed with mutual acceptance")
    return ScenarioRun(outcome, scenario, state.to_bytes(), derived)


def attack_juang(
    seed: int, dictionary: Sequence[str], victim: str = "C", password: bytes = b"", masquerade: bool = True
) -> ScenarioRun:
    """Steal the victim's card, spend one login exchange, guess offline, then log in as the victim."""
    scenario = Scenario(seed)
    state, _, hpwb = _juang_enrol(scenario, victim, password)
    scenario.add_party(ADVERSARY)
    stolen = scenario.extract_card(victim)
    rng = scenario.rng

    def respond(payload: bytes) -> Tuple[bytes, Any]:
        reply, session = juang.juang_server_respond(state, juang.JuangLoginMsg.decode(payload), rng)
        return reply.encode(), session

    oracle = ServerOracle(scenario, ADVERSARY, SERVER, respond, "juang.login", "juang.auth_s")
    derived = password_fingerprints(password) + [hpwb.value]
    try:
        found = juang.attack_juang_offline_guess(stolen, victim, SERVER, state.P_s, dictionary, oracle, rng)
    except PasswordNotFoundError as exc:
        return ScenarioRun(_not_found(scenario, ProtocolId.JUANG, exc), scenario, state.to_bytes(), derived)
    except ProtocolRejected as exc:
        return ScenarioRun(_rejected(scenario, ProtocolId.JUANG, exc), scenario, state.to_bytes(), derived)

    fields: Dict[str, Any] = {}
    if masquerade:
        try:
            user_sk, server_sk = _juang_login(
                scenario, state, stolen, ADVERSARY, victim, found.password.encode("utf-8"), "juang.masquerade"
            )
            fields = {"masquerade_accepted": True, "user_session_key": user_sk.hex(), "server_session_key": server_sk.hex()}
            logger.info(f"Adversary logged in as '{victim}' with the recovered password")
        except ProtocolRejected:
            fields = {"masquerade_accepted": False}
    outcome = _found(scenario, ProtocolId.JUANG, found, **fields)
    return ScenarioRun(outcome, scenario, state.to_bytes(), derived)


def replay_juang(seed: int, user: str = "C", password: bytes = b"") -> ScenarioRun:
    """Feed a user the Auth_s of an earlier session; the fresh Ka must make it fail."""
    scenario = Scenario(seed)
    state, card, _ = _juang_enrol(scenario, user, password)
    scenario.policy = AdversaryPolicy(
        mode=AdversaryMode.EAVESDROP, predicate=lambda env: env.kind == "juang.auth_s"
    )
    _juang_login(scenario, state, card, user, user, password)
    old_auth_s = scenario.captured[-1]
    scenario.add_party(ADVERSARY)
    scenario.policy = AdversaryPolicy(
        mode=AdversaryMode.INTERCEPT, predicate=lambda env: env.kind == "juang.auth_s", drop_intercepted=True
    )
    rng = scenario.rng
    login, user_session = juang.juang_login_start(card, user, SERVER, state.P_s, rng)
    payload = _exchange(scenario, user, SERVER, login.encode(), "juang.login")
    auth_s, _ = juang.juang_server_respond(state, juang.JuangLoginMsg.decode(payload), rng)
    scenario.post(SERVER, user, auth_s.encode(), "juang.auth_s")
    scenario.inject(old_auth_s.model_copy(update={"sender": ADVERSARY}))
    replayed = juang.JuangAuthSMsg.decode(scenario.receive(user).payload)
    try:
        with _rejections(scenario, user):
            juang.juang_user_finish(user_session, card, password, replayed)
    except ProtocolRejected as exc:
        return ScenarioRun(_rejected(scenario, ProtocolId.JUANG, exc), scenario, state.to_bytes())
    return ScenarioRun(_outcome(scenario, ProtocolId.JUANG, OutcomeKind.ACCEPTED), scenario, state.to_bytes())


# Hsiang and Kim: card-local only, no envelopes.

def honest_hsiang(
    seed: int, user: str = "C", password: bytes = b"", login_password: Optional[bytes] = None,
    new_password: bytes = NEW_PASSWORD,
) -> ScenarioRun:
    """Verify the card password, change it, and verify the new one."""
    scenario = Scenario(seed)
    scenario.add_party(user)
    P = hsiang.HsiangSecretP(Digest.random(scenario.rng))
    card = hsiang.hsiang_card_init(P, Digest.random(scenario.rng), password)
    scenario.issue_card(user, card)
    typed = password if login_password is None else login_password
    new_password = distinct_new_password(typed, new_password)
    try:
        with _rejections(scenario, user):
            changed = hsiang.hsiang_change_password(card, typed, new_password)
    except ProtocolRejected as exc:
        return ScenarioRun(_rejected(scenario, ProtocolId.HSIANG, exc), scenario)
    scenario.issue_card(user, changed)
    round_trip = hsiang.hsiang_verify_password(changed, new_password) and not hsiang.hsiang_verify_password(
        changed, typed
    )
    same_secret = hsiang.recover_secret(changed, new_password) == P.P
    accepted = round_trip and same_secret
    outcome = _outcome(
        scenario, ProtocolId.HSIANG, OutcomeKind.ACCEPTED if accepted else OutcomeKind.REJECTED,
        reason=None if accepted else CHANGE_FAILED,
        details={"change_round_trip": str(round_trip).lower(), "secret_preserved": str(same_secret).lower()},
    )
    return ScenarioRun(outcome, scenario)


def attack_hsiang(seed: int, dictionary: Sequence[str], victim: str = "C", password: bytes = b"") -> ScenarioRun:
    scenario = Scenario(seed)
    scenario.add_party(victim)
    scenario.add_party(ADVERSARY)
    card = hsiang.hsiang_card_init(
        hsiang.HsiangSecretP(Digest.random(scenario.rng)), Digest.random(scenario.rng), password
    )
    scenario.issue_card(victim, card)
    stolen = scenario.extract_card(victim)
    try:
        found = hsiang.attack_hsiang_offline_guess(stolen, dictionary)
    except PasswordNotFoundError as exc:
        return ScenarioRun(_not_found(scenario, ProtocolId.HSIANG, exc), scenario)
    return ScenarioRun(_found(scenario, ProtocolId.HSIANG, found), scenario)


def _kim_card(scenario: Scenario, user: str, password: bytes) -> kim.KimCard:
    return kim.kim_card_init(user, Digest.random(scenario.rng), Digest.random(scenario.rng), password)


def honest_kim(
    seed: int, user: str = "C", password: bytes = b"", login_password: Optional[bytes] = None,
    new_password: bytes = NEW_PASSWORD,
) -> ScenarioRun:
    """Verify the card password, change it, and verify the new one."""
    scenario = Scenario(seed)
    scenario.add_party(user)
    card = _kim_card(scenario, user, password)
    scenario.issue_card(user, card)
    typed = password if login_password is None else login_password
    new_password = distinct_new_password(typed, new_password)
    try:
        with _rejections(scenario, user):
            changed = kim.kim_change_password(card, typed, new_password)
    except ProtocolRejected as exc:
        return ScenarioRun(_rejected(scenario, ProtocolId.KIM, exc), scenario)
    scenario.issue_card(user, changed)
    round_trip = kim.kim_verify_password(changed, new_password) and not kim.kim_verify_password(changed, typed)
    outcome = _outcome(
        scenario, ProtocolId.KIM, OutcomeKind.ACCEPTED if round_trip else OutcomeKind.REJECTED,
        reason=None if round_trip else CHANGE_FAILED,
        details={"change_round_trip": str(round_trip).lower()},
    )
    return ScenarioRun(outcome, scenario)


def attack_kim(seed: int, dictionary: Sequence[str], victim: str = "C", password: bytes = b"") -> ScenarioRun:
    scenario = Scenario(seed)
    scenario.add_party(victim)
    scenario.add_party(ADVERSARY)
    scenario.issue_card(victim, _kim_card(scenario, victim, password))
    stolen = scenario.extract_card(victim)
    try:
        found = kim.attack_kim_offline_guess(stolen, dictionary)
    except PasswordNotFoundError as exc:
        return ScenarioRun(_not_found(scenario, ProtocolId.KIM, exc), scenario)
    return ScenarioRun(_found(scenario, ProtocolId.KIM, found), scenario)


# Xu

def _xu_enrol(scenario: Scenario, state: xu.XuServerState, user: str, password: bytes) -> xu.XuCard:
    scenario.add_party(user)
    payload = _exchange(scenario, user, SERVER, xu.XuRegistrationMsg(user, password).encode(), "xu.register")
    registration = xu.XuRegistrationMsg.decode(payload)
    card = xu.xu_register(state, registration.ID_c, registration.PW_c)
    scenario.issue_card(user, card)
    return card


def honest_xu(
    seed: int, user: str = "C", password: bytes = b"", login_password: Optional[bytes] = None,
    delta_t: int = DEFAULT_DELTA_T, delay: int = 0,
) -> ScenarioRun:
    """One login; delay is the number of ticks between the login send and the server's receipt."""
    scenario = Scenario(seed, delta_t)
    scenario.add_party(SERVER)
    state = xu.xu_setup(scenario.rng, delta_t)
    card = _xu_enrol(scenario, state, user, password)
    rng = scenario.rng
    derived = password_fingerprints(password)
    typed = password if login_password is None else login_password
    try:
        login, user_session = xu.xu_login(card, typed, scenario.clock, rng, delta_t)
        payload = _exchange(scenario, user, SERVER, login.encode(), "xu.login", delay)
        with _rejections(scenario, SERVER):
            reply, server_session = xu.xu_server_authenticate(state, xu.XuLoginMsg.decode(payload), scenario.clock, rng)
        payload = _exchange(scenario, SERVER, user, reply.encode(), "xu.reply")
        with _rejections(scenario, user):
            user_sk = xu.xu_user_finish(user_session, xu.XuServerMsg.decode(payload), scenario.clock)
    except ProtocolRejected as exc:
        return ScenarioRun(_rejected(scenario, ProtocolId.XU, exc), scenario, state.to_bytes(), derived)
    outcome = _outcome(
        scenario, ProtocolId.XU, OutcomeKind.ACCEPTED,
        user_session_key=user_sk.hex(), server_session_key=server_session.sk.hex() if server_session.sk else None,
    )
    logger.info(f"Honest xu run for '{user}' completed with mutual acceptance")
    return ScenarioRun(outcome, scenario, state.to_bytes(), derived)


def attack_xu(
    seed: int,
    insider: str = "U",
    insider_password: bytes = b"",
    target: str = "C",
    target_password: bytes = b"target-pw",
    insider_login_password: Optional[bytes] = None,
    register_target: bool = True,
    delta_t: int = DEFAULT_DELTA_T,
) -> ScenarioRun:
    """A registered insider logs in under the target's identity."""
    if insider == target:
        raise ScenarioConfigError("the insider and the target must be distinct identities")
    scenario = Scenario(seed, delta_t)
    scenario.add_party(SERVER)
    state = xu.xu_setup(scenario.rng, delta_t)
    own_card = _xu_enrol(scenario, state, insider, insider_password)
    if register_target:
        _xu_enrol(scenario, state, target, target_password)
    else:
        scenario.add_party(target)
    rng = scenario.rng

    def respond(payload: bytes) -> Tuple[bytes, Any]:
        reply, session = xu.xu_server_authenticate(state, xu.XuLoginMsg.decode(payload), scenario.clock, rng)
        return reply.encode(), session

    oracle = ServerOracle(scenario, insider, SERVER, respond, "xu.login", "xu.reply")
    typed = insider_password if insider_login_password is None else insider_login_password
    result = xu.attack_xu_insider(own_card, typed, target, oracle, scenario.clock, rng)
    if not result.accepted:
        outcome = _outcome(
            scenario, ProtocolId.XU, OutcomeKind.IMPERSONATION_REJECTED, reason=result.reason,
            details={"claimed_identity": target, "insider_identity": insider},
        )
        return ScenarioRun(outcome, scenario, state.to_bytes())
    server_sk = oracle.server_sessions[-1].sk
    outcome = _outcome(
        scenario, ProtocolId.XU, OutcomeKind.IMPERSONATION_ACCEPTED,
        user_session_key=result.session_key, server_session_key=server_sk.hex() if server_sk else None,
        login_requests_sent=oracle.requests_sent,
        details={"claimed_identity": target, "insider_identity": insider},
    )
    return ScenarioRun(outcome, scenario, state.to_bytes())


# Li

def _li_enrol(
    scenario: Scenario, user: str, password: bytes, biometric: bytes
) -> Tuple[li.LiServerState, li.LiCard]:
    scenario.add_party(user)
    scenario.add_party(SERVER)
    state = li.li_setup(scenario.rng)
    payload = _exchange(
        scenario, user, SERVER, li.LiRegistrationMsg(user, password, biometric).encode(), "li.register"
    )
    registration = li.LiRegistrationMsg.decode(payload)
    card = li.li_register(state, registration.ID_c, registration.PW_c, registration.biometric)
    scenario.issue_card(user, card)
    return state, card


def _li_login(
    scenario: Scenario, state: li.LiServerState, card: li.LiCard, user: str, password: bytes, biometric: bytes
) -> Tuple[li.LiUserSession, li.LiServerSession, li.LiResponseMsg]:
    rng = scenario.rng
    with _rejections(scenario, user):
        login, user_session = li.li_login_start(card, password, biometric, rng)
    payload = _exchange(scenario, user, SERVER, login.encode(), "li.login")
    with _rejections(scenario, SERVER):
        challenge, server_session = li.li_server_respond(state, li.LiLoginMsg.decode(payload), rng)
    payload = _exchange(scenario, SERVER, user, challenge.encode(), "li.challenge")
    with _rejections(scenario, user):
        response = li.li_user_finish(user_session, card, password, li.LiChallengeMsg.decode(payload))
    payload = _exchange(scenario, user, SERVER, response.encode(), "li.response")
    decoded = li.LiResponseMsg.decode(payload)
    with _rejections(scenario, SERVER):
        li.li_server_accept(server_session, decoded)
    return user_session, server_session, decoded


def honest_li(
    seed: int, user: str = "C", password: bytes = b"", biometric: bytes = b"",
    login_password: Optional[bytes] = None, login_biometric: Optional[bytes] = None,
) -> ScenarioRun:
    scenario = Scenario(seed)
    state, card = _li_enrol(scenario, user, password, biometric)
    derived = password_fingerprints(password)
    try:
        user_session, server_session, _ = _li_login(
            scenario, state, card, user,
            password if login_password is None else login_password,
            biometric if login_biometric is None else login_biometric,
        )
    except ProtocolRejected as exc:
        return ScenarioRun(_rejected(scenario, ProtocolId.LI, exc), scenario, state.to_bytes(), derived)
    nonces_recovered = server_session.M_4 == user_session.R_c
    outcome = _outcome(
        scenario, ProtocolId.LI, OutcomeKind.ACCEPTED,
        details={"user_accepted_server": str(user_session.accepted).lower(), "nonce_recovered": str(nonces_recovered).lower()},
    )
    logger.info(f"Honest li run for '{user}' completed with mutual acceptance")
    return ScenarioRun(outcome, scenario, state.to_bytes(), derived)


def attack_li(
    seed: int, dictionary: Sequence[str], victim: str = "C", password: bytes = b"", biometric: bytes = b"bio"
) -> ScenarioRun:
    """Steal the card, send a single {ID_c, M_e}, and guess against M_6 offline."""
    scenario = Scenario(seed)
    state, _ = _li_enrol(scenario, victim, password, biometric)
    scenario.add_party(ADVERSARY)
    stolen = scenario.extract_card(victim)
    rng = scenario.rng

    def respond(payload: bytes) -> Tuple[bytes, Any]:
        challenge, session = li.li_server_respond(state, li.LiLoginMsg.decode(payload), rng)
        return challenge.encode(), session

    oracle = ServerOracle(scenario, ADVERSARY, SERVER, respond, "li.login", "li.challenge")
    try:
        found = li.attack_li_offline_guess(stolen, dictionary, oracle, rng)
    except PasswordNotFoundError as exc:
        return ScenarioRun(_not_found(scenario, ProtocolId.LI, exc), scenario, state.to_bytes())
    except ProtocolRejected as exc:
        return ScenarioRun(_rejected(scenario, ProtocolId.LI, exc), scenario, state.to_bytes())
    scenario.log_event("session_abandoned", ADVERSARY)
    return ScenarioRun(_found(scenario, ProtocolId.LI, found), scenario, state.to_bytes())


def replay_li(seed: int, user: str = "C", password: bytes = b"", biometric: bytes = b"bio") -> ScenarioRun:
    """Answer a fresh server challenge with the M_8 of an earlier session."""
    scenario = Scenario(seed)
    state, card = _li_enrol(scenario, user, password, biometric)
    _, _, old_response = _li_login(scenario, state, card, user, password, biometric)
    scenario.add_party(ADVERSARY)
    rng = scenario.rng
    login, _ = li.li_login_start(card, password, biometric, rng)
    payload = _exchange(scenario, user, SERVER, login.encode(), "li.login")
    _, server_session = li.li_server_respond(state, li.LiLoginMsg.decode(payload), rng)
    scenario.post(ADVERSARY, SERVER, old_response.encode(), "li.response")
    replayed = li.LiResponseMsg.decode(scenario.receive(SERVER).payload)
    try:
        with _rejections(scenario, SERVER):
            li.li_server_accept(server_session, replayed)
    except ProtocolRejected as exc:
        return ScenarioRun(_rejected(scenario, ProtocolId.LI, exc), scenario, state.to_bytes())
    return ScenarioRun(_outcome(scenario, ProtocolId.LI, OutcomeKind.ACCEPTED), scenario, state.to_bytes())


# Fixtures

def _encode(value: Optional[str]) -> Optional[bytes]:
    return None if value is None else value.encode("utf-8")


def _credential(value: Optional[str], what: str, name: str) -> bytes:
    if value is None:
        raise ScenarioConfigError(f"party '{name}' has no {what}")
    return value.encode("utf-8")


def run_fixture(
    fixture: ScenarioFixture, seed: int = 0, dictionary: Optional[Sequence[str]] = None
) -> ScenarioRun:
    """Replay a fixture. A pinned fixture seed wins over the seed argument.

    Attack fixtures need the resolved dictionary when the fixture names one.
    """
    seed = fixture.seed if fixture.seed is not None else seed
    delta_t = fixture.delta_t if fixture.delta_t is not None else DEFAULT_DELTA_T
    protocol = fixture.protocol
    logger.debug(f"Replaying fixture '{fixture.name}' with seed {seed}")

    if fixture.kind == ScenarioKind.HONEST:
        user = fixture.first("user")
        password = _credential(user.password, "password", user.name)
        login_password = _encode(fixture.login_password)
        if protocol == ProtocolId.JUANG:
            return honest_juang(seed, user.name, password, login_password)
        if protocol == ProtocolId.HSIANG:
            return honest_hsiang(seed, user.name, password, login_password)
        if protocol == ProtocolId.KIM:
            return honest_kim(seed, user.name, password, login_password)
        if protocol == ProtocolId.XU:
            return honest_xu(seed, user.name, password, login_password, delta_t, fixture.delay)
        biometric = _credential(user.biometric, "biometric", user.name)
        return honest_li(seed, user.name, password, biometric, login_password, _encode(fixture.login_biometric))

    if protocol == ProtocolId.XU:
        insider = fixture.party(fixture.insider) if fixture.insider else fixture.first("insider")
        target_name = fixture.victim or fixture.first("user").name
        target_registered = any(p.name == target_name and p.role == "user" for p in fixture.parties)
        target_password = fixture.party(target_name).password if target_registered else None
        return attack_xu(
            seed, insider.name, _credential(insider.password, "password", insider.name),
            target_name, _encode(target_password) or b"target-pw",
            _encode(fixture.login_password), target_registered, delta_t,
        )

    if dictionary is None:
        raise ScenarioConfigError(f"fixture '{fixture.name}' needs a dictionary")
    victim = fixture.party(fixture.victim) if fixture.victim else fixture.first("user")
    password = _credential(victim.password, "password", victim.name)
    if fixture.exclude_password:
        dictionary = [entry for entry in dictionary if entry != victim.password]
    if protocol == ProtocolId.JUANG:
        return attack_juang(seed, dictionary, victim.name, password)
    if protocol == ProtocolId.HSIANG:
        return attack_hsiang(seed, dictionary, victim.name, password)
    if protocol == ProtocolId.KIM:
        return attack_kim(seed, dictionary, victim.name, password)
    biometric = _credential(victim.biometric, "biometric", victim.name)
    return attack_li(seed, dictionary, victim.name, password, biometric)

