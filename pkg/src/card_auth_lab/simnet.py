"""
Deterministic network simulation.

A Scenario owns a logical clock, a seeded rng, registered parties and an
append-only transcript. An adversary policy decides whether each send is
delivered, intercepted or dropped; the adversary can later inject what it
captured. Lost-card extraction is an explicit, logged capability.

A Scenario is single-owner: never drive one Scenario from two threads.
"""

import json
import logging
from collections import deque
from dataclasses import dataclass, field
from random import Random
from typing import Any, Callable, Deque, Dict, List, Optional, Protocol, Tuple

from .exceptions import ProtocolRejected, ScenarioConfigError
from .models import (
    AdversaryMode,
    DeliveryOutcome,
    Disposition,
    Envelope,
    TranscriptEntry,
    TranscriptEvent,
)

logger = logging.getLogger(__name__)

DEFAULT_DELTA_T = 5


class CardContents(Protocol):
    def fields_hex(self) -> Dict[str, str]: ...


def card_detail(card: CardContents) -> str:
    return ",".join(f"{name}:{value}" for name, value in card.fields_hex().items())


Handler = Callable[[Envelope], None]
Responder = Callable[[bytes], Tuple[bytes, Any]]


@dataclass
class AdversaryPolicy:
    """What the network adversary does with each envelope."""

    mode: AdversaryMode = AdversaryMode.PASSTHROUGH
    predicate: Callable[[Envelope], bool] = lambda env: True
    drop_intercepted: bool = False

    @classmethod
    def passthrough(cls) -> "AdversaryPolicy":
        return cls()

    @classmethod
    def intercept_all(cls) -> "AdversaryPolicy":
        return cls(mode=AdversaryMode.INTERCEPT)


@dataclass
class Party:
    name: str
    handler: Optional[Handler] = None
    inbox: Deque[Envelope] = field(default_factory=deque)
    card: Optional[CardContents] = None


class Transcript:
    """Append-only log of envelopes and events."""

    def __init__(self) -> None:
        self._entries: List[TranscriptEntry] = []
        self._events: List[TranscriptEvent] = []
        self._seq = 0

    @property
    def entries(self) -> Tuple[TranscriptEntry, ...]:
        return tuple(self._entries)

    @property
    def events(self) -> Tuple[TranscriptEvent, ...]:
        return tuple(self._events)

    def __len__(self) -> int:
        return len(self._entries)

    def append(self, envelope: Envelope, disposition: Disposition) -> TranscriptEntry:
        entry = TranscriptEntry(seq=self._seq, envelope=envelope, disposition=disposition)
        self._seq += 1
        self._entries.append(entry)
        return entry

    def record_event(self, at: int, label: str, party: str, detail: str = "") -> TranscriptEvent:
        event = TranscriptEvent(seq=self._seq, at=at, label=label, party=party, detail=detail)
        self._seq += 1
        self._events.append(event)
        return event

    def between(self, sender: str, recipient: str) -> List[TranscriptEntry]:
        return [
            e for e in self._entries
            if e.envelope.sender == sender and e.envelope.recipient == recipient
        ]

    def of_kind(self, prefix: str) -> List[TranscriptEntry]:
        return [e for e in self._entries if e.envelope.kind.startswith(prefix)]

    def find_bytes(self, needle: bytes, kind_prefix: str = "") -> List[Tuple[TranscriptEntry, int]]:
        """Entries whose payload contains needle, with the byte offset of the first hit."""
        hits = []
        for entry in self.of_kind(kind_prefix):
            offset = entry.envelope.payload.find(needle)
            if offset >= 0:
                hits.append((entry, offset))
        return hits

    def lines(self) -> List[str]:
        records: List[Tuple[int, str]] = [(e.seq, e.render()) for e in self._entries]
        records.extend((ev.seq, ev.render()) for ev in self._events)
        return [line for _, line in sorted(records)]

    def export(self) -> str:
        """Line-delimited key=value records, one per envelope or event."""
        return "".join(f"{line}\n" for line in self.lines())

    def export_json_lines(self) -> str:
        rows: List[Tuple[int, Dict[str, Any]]] = [(e.seq, e.record()) for e in self._entries]
        rows.extend((ev.seq, ev.record()) for ev in self._events)
        return "".join(json.dumps(row) + "\n" for _, row in sorted(rows, key=lambda r: r[0]))


class Scenario:
    """One deterministic simulation run."""

    def __init__(self, seed: int = 0, delta_t: int = DEFAULT_DELTA_T) -> None:
        self.seed = seed
        self.rng = Random(seed)
        self.delta_t = delta_t
        self.clock = 0
        self.transcript = Transcript()
        self.policy = AdversaryPolicy.passthrough()
        self.captured: List[Envelope] = []
        self._parties: Dict[str, Party] = {}

    def add_party(self, name: str, handler: Optional[Handler] = None) -> Party:
        if not name:
            raise ScenarioConfigError("party name must be non-empty")
        if name in self._parties:
            raise ScenarioConfigError(f"party '{name}' already registered")
        party = Party(name=name, handler=handler)
        self._parties[name] = party
        return party

    def party(self, name: str) -> Party:
        try:
            return self._parties[name]
        except KeyError:
            raise ScenarioConfigError(f"unknown party '{name}'") from None

    def has_party(self, name: str) -> bool:
        return name in self._parties

    def issue_card(self, owner: str, card: CardContents) -> None:
        self.party(owner).card = card
        self.transcript.record_event(self.clock, "card_issued", owner)

    def advance_clock(self, dt: int) -> int:
        if dt < 0:
            raise ValueError("the clock only moves forward")
        self.clock += dt
        return self.clock

    def post(self, sender: str, recipient: str, payload: bytes, kind: str = "raw") -> DeliveryOutcome:
        """Build an envelope stamped with the current clock and send it."""
        env = Envelope(sender=sender, recipient=recipient, payload=payload, sent_at=self.clock, kind=kind)
        return self.send(env)

    def send(self, env: Envelope) -> DeliveryOutcome:
        self.party(env.sender)
        recipient = self.party(env.recipient)
        if self.policy.mode == AdversaryMode.INTERCEPT and self.policy.predicate(env):
            self.captured.append(env)
            disposition = Disposition.DROPPED if self.policy.drop_intercepted else Disposition.INTERCEPTED
            self.transcript.append(env, disposition)
            logger.debug(f"Envelope {env.kind} {env.sender}->{env.recipient} {disposition.value}")
            return DeliveryOutcome(disposition=disposition, envelope=env)
        if self.policy.mode == AdversaryMode.EAVESDROP and self.policy.predicate(env):
            self.captured.append(env)
        self.transcript.append(env, Disposition.DELIVERED)
        self._hand_over(recipient, env)
        return DeliveryOutcome(disposition=Disposition.DELIVERED, envelope=env)

    def inject(self, env: Envelope) -> DeliveryOutcome:
        """Deliver an adversary-chosen envelope, restamped with the current clock."""
        recipient = self.party(env.recipient)
        env = env.model_copy(update={"sent_at": self.clock})
        self.transcript.append(env, Disposition.INJECTED)
        self._hand_over(recipient, env)
        return DeliveryOutcome(disposition=Disposition.INJECTED, envelope=env)

    def _hand_over(self, recipient: Party, env: Envelope) -> None:
        if recipient.handler is not None:
            recipient.handler(env)
        else:
            recipient.inbox.append(env)

    def receive(self, name: str) -> Envelope:
        party = self.party(name)
        if not party.inbox:
            raise ScenarioConfigError(f"party '{name}' has no pending envelope")
        return party.inbox.popleft()

    def extract_card(self, victim: str) -> Any:
        """Read out a lost card. The returned contents are immutable values.

        The extraction event carries the card fields as hex.
        """
        party = self.party(victim)
        if party.card is None:
            raise ScenarioConfigError(f"party '{victim}' holds no card")
        self.transcript.record_event(self.clock, "card_extracted", victim, card_detail(party.card))
        logger.info(f"Extracted smart card contents of '{victim}'")
        return party.card

    def log_event(self, label: str, party: str, detail: str = "") -> None:
        self.transcript.record_event(self.clock, label, party, detail)

    def log_rejection(self, party: str, exc: ProtocolRejected) -> None:
        self.log_event("rejected", party, exc.reason.value)


def scenario_new(seed: int, delta_t: int = DEFAULT_DELTA_T) -> Scenario:
    return Scenario(seed=seed, delta_t=delta_t)


class ServerOracle:
    """One attacker-to-server channel inside a scenario.

    Each request is posted as an envelope, answered by the server responder,
    and the reply is posted back; both show up in the transcript. Server
    sessions created by the responder are kept for evidence.
    """

    def __init__(
        self,
        scenario: Scenario,
        client: str,
        server: str,
        responder: Responder,
        request_kind: str,
        reply_kind: str,
    ) -> None:
        self.scenario = scenario
        self.client = client
        self.server = server
        self.responder = responder
        self.request_kind = request_kind
        self.reply_kind = reply_kind
        self.requests_sent = 0
        self.server_sessions: List[Any] = []

    def request(self, payload: bytes) -> bytes:
        self.requests_sent += 1
        outcome = self.scenario.post(self.client, self.server, payload, self.request_kind)
        if not outcome.delivered:
            raise ScenarioConfigError(f"request to '{self.server}' was not delivered")
        self.scenario.receive(self.server)
        try:
            reply, session = self.responder(payload)
        except ProtocolRejected as exc:
            self.scenario.log_rejection(self.server, exc)
            raise
        self.server_sessions.append(session)
        self.scenario.post(self.server, self.client, reply, self.reply_kind)
        self.scenario.receive(self.client)
        return reply
