"""
Verdict Matrix

Runs the scripted scenarios for every protocol and fills a protocol x
requirement grid from what they showed. A cell is only marked when an
executed run produced evidence for it; everything else stays
not_evaluated.
"""

import logging
from typing import Callable, Dict, List, Optional, Tuple

from pydantic import ValidationError

from .exceptions import EvidenceError, MatrixInvariantError
from .fixtures import load_dictionary, load_fixture
from .models import (
    Evidence,
    ExpectedCell,
    OutcomeKind,
    OutputFormat,
    ProtocolId,
    ScenarioFixture,
    Verdict,
    VerdictMatrix,
    VerdictRecord,
    VerdictStatus,
)
from .scenarios import ScenarioRun, replay_juang, replay_li, run_fixture

logger = logging.getLogger(__name__)

REQUIREMENTS: Dict[str, str] = {
    "R1": "It needs no password or verification table in the server.",
    "R2": "The client can choose and change his password freely.",
    "R3": "The client needs not to reveal their password to the server even in the registration phase.",
    "R4": "The password should not be transmitted in plaintext over the network.",
    "R5": "It can resist insider (a legal user) attack.",
    "R6": (
        "It can resist replay attack, password guessing attack, "
        "modification-verification-table attack, and stolen-verifier attack."
    ),
    "R7": "The length of a password should be appropriate for memorization.",
    "R8": "It should be efficient and practical.",
    "R9": "It should achieve mutual authentication.",
    "R10": "It should resist offline password guessing attack even if the smart card is lost.",
}

R6_SLOTS = ("replay", "password_guessing", "modification_verification_table", "stolen_verifier")

STATUS_CODES = {
    VerdictStatus.VIOLATED: "V",
    VerdictStatus.SATISFIED_BY_DEMONSTRATION: "S",
    VerdictStatus.NOT_EVALUATED: "-",
}

LI_R3_NOTE = (
    "registration submits the password to the server; only the lost-card "
    "guessing weakness is attested for this scheme, so the cell is left open"
)

ATTACK_FIXTURES = {
    ProtocolId.JUANG: "juang_lost_card_attack",
    ProtocolId.HSIANG: "hsiang_lost_card_attack",
    ProtocolId.KIM: "kim_lost_card_attack",
    ProtocolId.XU: "xu_insider",
    ProtocolId.LI: "li_single_login_attack",
}

HONEST_FIXTURES = {protocol: f"{protocol.value}_honest" for protocol in ProtocolId}

_FULL_FLOW = (ProtocolId.JUANG, ProtocolId.XU, ProtocolId.LI)


class _Grid:
    def __init__(self, seed: int) -> None:
        self.seed = seed
        self.cells: Dict[Tuple[ProtocolId, str], Verdict] = {
            (protocol, requirement): Verdict(protocol=protocol, requirement=requirement)
            for protocol in ProtocolId
            for requirement in REQUIREMENTS
        }

    def mark(
        self, protocol: ProtocolId, requirement: str, status: VerdictStatus, kind: str, summary: str,
        slot: Optional[str] = None,
    ) -> None:
        cell = self.cells[(protocol, requirement)]
        cell.evidence.append(Evidence(kind=kind, seed=self.seed, summary=summary, slot=slot))
        if status != VerdictStatus.NOT_EVALUATED:
            cell.status = status

    def note(self, protocol: ProtocolId, requirement: str, text: str) -> None:
        self.cells[(protocol, requirement)].note = text

    def matrix(self) -> VerdictMatrix:
        return VerdictMatrix(seed=self.seed, verdicts=list(self.cells.values()))


def _require(condition: bool, protocol: ProtocolId, requirement: str, seed: int, detail: str) -> None:
    if not condition:
        logger.error(f"Expected evidence missing for {protocol.value}/{requirement} at seed {seed}: {detail}")
        raise EvidenceError(protocol.value, requirement, seed, detail)


def _run(fixture: ScenarioFixture, seed: int) -> ScenarioRun:
    return run_fixture(fixture, seed, load_dictionary(fixture.dictionary) if fixture.dictionary else None)


def _password_of(fixture: ScenarioFixture) -> bytes:
    party = fixture.party(fixture.victim) if fixture.victim else fixture.first("user")
    return (party.password or "").encode("utf-8")


def _registration_leaks(run: ScenarioRun, protocol: ProtocolId, password: bytes) -> int:
    return len(run.scenario.transcript.find_bytes(password, f"{protocol.value}.register"))


def _login_leaks(run: ScenarioRun, protocol: ProtocolId) -> int:
    hits = 0
    for entry in run.scenario.transcript.of_kind(protocol.value):
        if entry.envelope.kind.endswith(".register"):
            continue
        hits += sum(1 for value in run.password_derived if value in entry.envelope.payload)
    return hits


def _state_leaks(run: ScenarioRun) -> int:
    return sum(1 for value in run.password_derived if value in run.server_state)


def _honest_evidence(grid: _Grid, protocol: ProtocolId, seed: int) -> None:
    fixture = load_fixture(HONEST_FIXTURES[protocol])
    run = _run(fixture, seed)
    outcome = run.outcome
    _require(outcome.outcome == OutcomeKind.ACCEPTED, protocol, "R9" if protocol in _FULL_FLOW else "R2",
             seed, f"honest run ended {outcome.outcome.value} ({outcome.reason})")
    password = _password_of(fixture)

    if protocol not in _FULL_FLOW:
        grid.mark(protocol, "R2", VerdictStatus.SATISFIED_BY_DEMONSTRATION, "change_round_trip",
                  "card accepted a password change; new password verifies, old one does not")
        return

    if protocol != ProtocolId.LI:
        _require(outcome.user_session_key == outcome.server_session_key, protocol, "R9", seed,
                 "session keys differ")
    grid.mark(protocol, "R9", VerdictStatus.SATISFIED_BY_DEMONSTRATION, "mutual_authentication",
              f"honest run accepted by both sides over {outcome.online_messages} envelopes")

    if _state_leaks(run) == 0:
        grid.mark(protocol, "R1", VerdictStatus.SATISFIED_BY_DEMONSTRATION, "server_state_scan",
                  "serialized server state holds no password-derived value")
    if _login_leaks(run, protocol) == 0:
        grid.mark(protocol, "R4", VerdictStatus.SATISFIED_BY_DEMONSTRATION, "login_phase_scan",
                  "no login-phase envelope carries password bytes")

    leaks = _registration_leaks(run, protocol, password)
    if protocol == ProtocolId.JUANG:
        _require(leaks == 0, protocol, "R3", seed, "password bytes found in registration")
        grid.mark(protocol, "R3", VerdictStatus.SATISFIED_BY_DEMONSTRATION, "registration_scan",
                  "registration carries H(PW, b) only")
    elif protocol == ProtocolId.XU:
        _require(leaks > 0, protocol, "R3", seed, "password bytes not found in registration")
        grid.mark(protocol, "R3", VerdictStatus.VIOLATED, "password_in_registration",
                  "registration envelope carries the password in the clear")
    elif leaks:
        grid.mark(protocol, "R3", VerdictStatus.NOT_EVALUATED, "password_in_registration",
                  "registration envelope carries the password")
        grid.note(protocol, "R3", LI_R3_NOTE)


def _attack_evidence(grid: _Grid, protocol: ProtocolId, seed: int) -> None:
    fixture = load_fixture(ATTACK_FIXTURES[protocol])
    outcome = _run(fixture, seed).outcome

    if protocol == ProtocolId.XU:
        _require(outcome.outcome == OutcomeKind.IMPERSONATION_ACCEPTED, protocol, "R5", seed,
                 f"insider attack ended {outcome.outcome.value} ({outcome.reason})")
        _require(outcome.user_session_key == outcome.server_session_key, protocol, "R5", seed,
                 "insider session key differs from the server's")
        grid.mark(protocol, "R5", VerdictStatus.VIOLATED, "impersonation_accepted",
                  f"insider '{outcome.details['insider_identity']}' accepted as "
                  f"'{outcome.details['claimed_identity']}' with a shared session key")
        return

    _require(outcome.outcome == OutcomeKind.FOUND_PASSWORD, protocol, "R10", seed,
             f"guessing attack ended {outcome.outcome.value}")
    _require(outcome.recovered_password == fixture.expected.password, protocol, "R10", seed,
             f"recovered '{outcome.recovered_password}'")
    grid.mark(protocol, "R10", VerdictStatus.VIOLATED, "found_password",
              f"recovered '{outcome.recovered_password}' after {outcome.guesses_tried} guesses "
              f"with {outcome.login_requests_sent or 0} login requests")
    if protocol == ProtocolId.JUANG:
        _require(bool(outcome.masquerade_accepted), protocol, "R10", seed, "masquerade login refused")
        grid.mark(protocol, "R10", VerdictStatus.VIOLATED, "masquerade_accepted",
                  "server accepted a login with the stolen card and the recovered password")


def _replay_evidence(grid: _Grid, protocol: ProtocolId, seed: int) -> None:
    fixture = load_fixture(HONEST_FIXTURES[protocol])
    user = fixture.first("user")
    password = (user.password or "").encode("utf-8")
    if protocol == ProtocolId.JUANG:
        run = replay_juang(seed, user.name, password)
        what = "replayed Auth_s"
    else:
        run = replay_li(seed, user.name, password, (user.biometric or "").encode("utf-8"))
        what = "replayed M_8"
    if run.outcome.outcome == OutcomeKind.REJECTED:
        grid.mark(protocol, "R6", VerdictStatus.NOT_EVALUATED, "replay_rejected",
                  f"{what} rejected ({run.outcome.reason})", slot=R6_SLOTS[0])


_STEPS: List[Callable[[_Grid, ProtocolId, int], None]] = [_honest_evidence, _attack_evidence]


def run_attack_scenarios(seed: int) -> VerdictMatrix:
    """Execute honest runs, attacks and replay probes for all five schemes.

    Raises:
        EvidenceError: an attack did not produce the evidence it should
    """
    grid = _Grid(seed)
    for protocol in ProtocolId:
        for step in _STEPS:
            step(grid, protocol, seed)
        if protocol in (ProtocolId.JUANG, ProtocolId.LI):
            _replay_evidence(grid, protocol, seed)
    logger.info(f"Verdict matrix assembled for seed {seed}")
    return grid.matrix()


def _records(matrix: VerdictMatrix) -> List[VerdictRecord]:
    records = []
    for verdict in matrix.verdicts:
        if verdict.status == VerdictStatus.VIOLATED and not verdict.evidence:
            raise MatrixInvariantError(
                f"{verdict.protocol.value}/{verdict.requirement} is violated without evidence"
            )
        records.append(VerdictRecord(
            protocol=verdict.protocol,
            requirement=verdict.requirement,
            status=verdict.status,
            evidence_kind=verdict.evidence[0].kind if verdict.evidence else None,
            scenario_seed=matrix.seed,
            evidence=verdict.evidence,
            note=verdict.note,
        ))
    return records


def _render_text(matrix: VerdictMatrix, records: List[VerdictRecord]) -> str:
    requirements = list(REQUIREMENTS)
    lines = [f"seed={matrix.seed}", "protocol " + " ".join(f"{r:>3}" for r in requirements)]
    for protocol in ProtocolId:
        row = [STATUS_CODES[matrix.cell(protocol, r).status] for r in requirements]
        lines.append(f"{protocol.value:<8} " + " ".join(f"{code:>3}" for code in row))
    lines.append("")
    lines.append("V violated, S satisfied by demonstration, - not evaluated")
    lines.append("")
    for record in records:
        for evidence in record.evidence:
            slot = f" [{evidence.slot}]" if evidence.slot else ""
            lines.append(
                f"{record.protocol.value} {record.requirement} {record.status.value}{slot}: "
                f"{evidence.kind}: {evidence.summary}"
            )
        if record.note:
            lines.append(f"{record.protocol.value} {record.requirement} note: {record.note}")
    return "\n".join(lines) + "\n"


def render_matrix(matrix: VerdictMatrix, format: OutputFormat = OutputFormat.TEXT) -> bytes:
    """Deterministic rendering. The structured form is one JSON record per cell.

    Raises:
        MatrixInvariantError: a violated cell has no evidence
    """
    records = _records(matrix)
    if format == OutputFormat.STRUCTURED:
        text = "".join(record.model_dump_json() + "\n" for record in records)
    else:
        text = _render_text(matrix, records)
    return text.encode("utf-8")


def parse_matrix(data: bytes) -> VerdictMatrix:
    """Inverse of the structured rendering.

    Raises:
        ValueError: the input is not a structured matrix rendering
    """
    try:
        records = [VerdictRecord.model_validate_json(line) for line in data.decode("utf-8").splitlines() if line]
    except (ValidationError, UnicodeDecodeError) as e:
        raise ValueError(f"not a structured verdict matrix: {e}") from e
    if not records:
        raise ValueError("empty verdict matrix")
    verdicts = [
        Verdict(protocol=r.protocol, requirement=r.requirement, status=r.status, evidence=r.evidence, note=r.note)
        for r in records
    ]
    return VerdictMatrix(seed=records[0].scenario_seed, verdicts=verdicts)


def check_expected(matrix: VerdictMatrix, expected: List[ExpectedCell]) -> List[str]:
    """Cells of the expected fixture the matrix does not reproduce, in fixture order."""
    mismatches = []
    for cell in expected:
        actual = matrix.cell(cell.protocol, cell.requirement)
        if actual.status != cell.status:
            mismatches.append(
                f"{cell.protocol.value}/{cell.requirement}: expected {cell.status.value}, got {actual.status.value}"
            )
        elif cell.status == VerdictStatus.VIOLATED and not actual.evidence:
            mismatches.append(f"{cell.protocol.value}/{cell.requirement}: violated without evidence")
    return mismatches
