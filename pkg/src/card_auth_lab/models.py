"""
Boundary Models for the Card Authentication Lab

Pydantic models for the records that leave the protocol state machines:
network envelopes and transcripts, attack results, scenario outcomes,
verdicts, fixtures and CLI configuration. Protocol-internal values
(digests, group elements, cards) live in crypto_core and the protocol
modules as frozen dataclasses.
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator


class ProtocolId(str, Enum):
    """The five reviewed schemes."""

    JUANG = "juang"
    HSIANG = "hsiang"
    KIM = "kim"
    XU = "xu"
    LI = "li"


class Disposition(str, Enum):
    DELIVERED = "delivered"
    INTERCEPTED = "intercepted"
    INJECTED = "injected"
    DROPPED = "dropped"


class AdversaryMode(str, Enum):
    PASSTHROUGH = "passthrough"
    EAVESDROP = "eavesdrop"
    INTERCEPT = "intercept"


class OutputFormat(str, Enum):
    TEXT = "text"
    STRUCTURED = "structured"


class Envelope(BaseModel):
    """A message on the simulated network."""

    model_config = ConfigDict(populate_by_name=True, frozen=True)

    sender: str = Field(alias="from", min_length=1, description="Sending party")
    recipient: str = Field(alias="to", min_length=1, description="Receiving party")
    payload: bytes = Field(description="Serialized protocol message")
    sent_at: int = Field(ge=0, description="Logical clock reading at send time")
    kind: str = Field(default="raw", description="Message name, e.g. juang.login")

    @field_serializer("payload", when_used="json")
    def _payload_hex(self, payload: bytes) -> str:
        return payload.hex()


class TranscriptEntry(BaseModel):
    """One send, with what the network did to it."""

    model_config = ConfigDict(frozen=True)

    seq: int = Field(ge=0, description="Position among entries and events")
    envelope: Envelope
    disposition: Disposition

    def render(self) -> str:
        env = self.envelope
        return (
            f"time={env.sent_at} kind={env.kind} from={env.sender} to={env.recipient} "
            f"disposition={self.disposition.value} payload={env.payload.hex()}"
        )

    def record(self) -> Dict[str, Any]:
        """Flat JSON-ready row."""
        row = self.envelope.model_dump(mode="json", by_alias=True)
        row["time"] = row.pop("sent_at")
        row["disposition"] = self.disposition.value
        return row


class TranscriptEvent(BaseModel):
    """A non-envelope occurrence: card issued or extracted, message rejected."""

    model_config = ConfigDict(frozen=True)

    seq: int = Field(ge=0)
    at: int = Field(ge=0, serialization_alias="time", description="Logical clock reading")
    label: str = Field(serialization_alias="event")
    party: str
    detail: str = ""

    def render(self) -> str:
        line = f"time={self.at} event={self.label} party={self.party}"
        return f"{line} detail={self.detail}" if self.detail else line

    def record(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", by_alias=True, exclude={"seq"})


class DeliveryOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    disposition: Disposition
    envelope: Envelope

    @property
    def delivered(self) -> bool:
        return self.disposition in (Disposition.DELIVERED, Disposition.INJECTED)


class FoundPassword(BaseModel):
    """Successful outcome of a guessing attack."""

    password: str = Field(description="Recovered password")
    guesses_tried: int = Field(ge=1, description="1-based dictionary position of the hit")
    login_requests_sent: int = Field(default=0, ge=0, description="Online login requests used")


class ImpersonationResult(BaseModel):
    """Outcome of an insider impersonation attempt."""

    accepted: bool
    claimed_identity: str
    insider_identity: str
    session_key: Optional[str] = Field(default=None, description="Attacker session key, hex")
    reason: Optional[str] = Field(default=None, description="Server reject reason when not accepted")


class OutcomeKind(str, Enum):
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    FOUND_PASSWORD = "found_password"
    NOT_FOUND = "not_found"
    IMPERSONATION_ACCEPTED = "impersonation_accepted"
    IMPERSONATION_REJECTED = "impersonation_rejected"


class ScenarioOutcome(BaseModel):
    """Summary of one scripted run."""

    protocol: ProtocolId
    outcome: OutcomeKind
    seed: int
    reason: Optional[str] = None
    recovered_password: Optional[str] = None
    guesses_tried: Optional[int] = None
    login_requests_sent: Optional[int] = None
    online_messages: int = Field(default=0, description="Envelopes on the network during the run")
    user_session_key: Optional[str] = None
    server_session_key: Optional[str] = None
    masquerade_accepted: Optional[bool] = None
    details: Dict[str, str] = Field(default_factory=dict)


class VerdictStatus(str, Enum):
    VIOLATED = "violated"
    SATISFIED_BY_DEMONSTRATION = "satisfied_by_demonstration"
    NOT_EVALUATED = "not_evaluated"


class Evidence(BaseModel):
    """What an executed scenario showed."""

    model_config = ConfigDict(frozen=True)

    kind: str = Field(description="Evidence kind, e.g. found_password")
    seed: int
    summary: str
    slot: Optional[str] = Field(default=None, description="Sub-requirement slot (R6)")


class Verdict(BaseModel):
    protocol: ProtocolId
    requirement: str = Field(pattern=r"^R([1-9]|10)$")
    status: VerdictStatus = VerdictStatus.NOT_EVALUATED
    evidence: List[Evidence] = Field(default_factory=list)
    note: Optional[str] = None


class VerdictRecord(BaseModel):
    """One line of the structured matrix rendering. Field order is stable."""

    protocol: ProtocolId
    requirement: str
    status: VerdictStatus
    evidence_kind: Optional[str]
    scenario_seed: int
    evidence: List[Evidence] = Field(default_factory=list)
    note: Optional[str] = None


class VerdictMatrix(BaseModel):
    """Protocol x requirement grid."""

    seed: int
    verdicts: List[Verdict]

    def cell(self, protocol: ProtocolId, requirement: str) -> Verdict:
        for verdict in self.verdicts:
            if verdict.protocol == protocol and verdict.requirement == requirement:
                return verdict
        raise KeyError(f"{protocol.value}/{requirement}")


class ExpectedCell(BaseModel):
    protocol: ProtocolId
    requirement: str
    status: VerdictStatus


class PartySpec(BaseModel):
    """A participant in a fixture scenario."""

    name: str = Field(min_length=1, max_length=32)
    role: str = Field(pattern="^(user|server|adversary|insider)$")
    password: Optional[str] = None
    biometric: Optional[str] = None


class ExpectedOutcome(BaseModel):
    outcome: OutcomeKind
    reason: Optional[str] = None
    login_requests_sent: Optional[int] = None
    online_messages: Optional[int] = None
    password: Optional[str] = None
    guesses_tried: Optional[int] = None


class ScenarioKind(str, Enum):
    HONEST = "honest"
    ATTACK = "attack"


class ScenarioFixture(BaseModel):
    """A fully specified scenario from the fixture corpus."""

    name: str
    protocol: ProtocolId
    kind: ScenarioKind
    description: str = ""
    parties: List[PartySpec]
    victim: Optional[str] = Field(default=None, description="Party whose card is stolen or impersonated")
    insider: Optional[str] = Field(default=None, description="Insider party (xu)")
    dictionary: Optional[str] = Field(default="demo", description="'demo', a file path, or null when absent")
    exclude_password: bool = Field(default=False, description="Remove the victim password from the dictionary")
    seed: Optional[int] = Field(default=None, description="Pinned seed; null means any seed")
    delta_t: Optional[int] = None
    delay: int = Field(default=0, ge=0)
    login_password: Optional[str] = Field(default=None, description="Password typed at login when it differs")
    login_biometric: Optional[str] = None
    expected: ExpectedOutcome

    def party(self, name: str) -> PartySpec:
        for spec in self.parties:
            if spec.name == name:
                return spec
        raise KeyError(name)

    def first(self, role: str) -> PartySpec:
        for spec in self.parties:
            if spec.role == role:
                return spec
        raise KeyError(role)


class CommandName(str, Enum):
    HONEST = "honest"
    ATTACK = "attack"
    EVALUATE = "evaluate"


class CliConfig(BaseModel):
    """Validated options of one CLI invocation."""

    command: CommandName
    protocol: Optional[ProtocolId] = None
    dictionary_path: Optional[str] = None
    seed: int = 0
    format: OutputFormat = OutputFormat.TEXT
    delta_t: Optional[int] = Field(default=None, ge=0)
    delay: int = Field(default=0, ge=0)
    password: Optional[str] = None
    target: Optional[str] = None

    @model_validator(mode="after")
    def _check_protocol(self) -> "CliConfig":
        if self.command in (CommandName.HONEST, CommandName.ATTACK) and self.protocol is None:
            raise ValueError(f"'{self.command.value}' requires --protocol")
        if self.command == CommandName.EVALUATE and self.protocol is not None:
            raise ValueError("'evaluate' does not take --protocol")
        return self
