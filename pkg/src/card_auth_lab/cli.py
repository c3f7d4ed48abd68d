"""
Command-line entry point.

Every command is deterministic: identical flags, seed and dictionary give
byte-identical stdout. Logs go to stderr.

Exit codes:
    0  success (mutual acceptance, attack goal reached, matrix matches)
    2  configuration error (bad flags, unknown fixture, unreadable dictionary)
    3  protocol rejection
    4  password not found in the dictionary
    5  verdict or fixture expectation mismatch
"""

import logging
import sys
from functools import wraps
from pathlib import Path
from typing import Annotated, Any, Callable, Dict, List, Optional, Tuple, TypeVar

import typer
from pydantic import ValidationError

from .config import LOG_FORMAT, get_settings
from .evaluation import ATTACK_FIXTURES, check_expected, render_matrix, run_attack_scenarios
from .exceptions import (
    EvidenceError,
    FixtureNotFoundError,
    LabError,
    MatrixInvariantError,
    PasswordNotFoundError,
    ProtocolRejected,
    ScenarioConfigError,
)
from .fixtures import list_fixtures, load_expected_verdicts, load_fixture, outcome_mismatches, resolve_dictionary
from .models import (
    CliConfig,
    CommandName,
    OutcomeKind,
    OutputFormat,
    PartySpec,
    ProtocolId,
    ScenarioFixture,
    ScenarioOutcome,
)
from .scenarios import ScenarioRun, run_fixture

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_REJECTED = 3
EXIT_NOT_FOUND = 4
EXIT_MISMATCH = 5

OUTCOME_EXIT_CODES = {
    OutcomeKind.ACCEPTED: EXIT_OK,
    OutcomeKind.FOUND_PASSWORD: EXIT_OK,
    OutcomeKind.IMPERSONATION_ACCEPTED: EXIT_OK,
    OutcomeKind.REJECTED: EXIT_REJECTED,
    OutcomeKind.IMPERSONATION_REJECTED: EXIT_REJECTED,
    OutcomeKind.NOT_FOUND: EXIT_NOT_FOUND,
}

SUMMARY_FIELDS = (
    "protocol", "outcome", "seed", "reason", "recovered_password", "guesses_tried",
    "login_requests_sent", "online_messages", "masquerade_accepted", "user_session_key", "server_session_key",
)

GOLDEN_DIR = Path("tests") / "golden"

app = typer.Typer(
    name="card-auth-lab",
    help="Smart-card password authentication protocols, their attacks, and a verdict matrix.",
    epilog="Exit codes: 0 success, 2 configuration error, 3 protocol rejection, "
    "4 password not found, 5 verdict or fixture mismatch.",
    no_args_is_help=True,
    add_completion=False,
)

F = TypeVar("F", bound=Callable[..., Any])

ProtocolOption = Annotated[Optional[ProtocolId], typer.Option("--protocol", "-p", help="Protocol to run")]
SeedOption = Annotated[int, typer.Option("--seed", help="Scenario seed")]
FormatOption = Annotated[OutputFormat, typer.Option("--format", help="text or structured (JSON lines)")]
DeltaTOption = Annotated[Optional[int], typer.Option("--delta-t", help="Timestamp window in ticks (xu)")]


def handle_cli_errors(command: str) -> Callable[[F], F]:
    """Map lab exceptions raised inside a command to exit codes with a diagnostic on stderr."""
    def decorator(func: F) -> F:
        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            try:
                return func(*args, **kwargs)
            except (ValidationError, ScenarioConfigError, FixtureNotFoundError) as e:
                logger.error(f"Failed to configure '{command}': {e}")
                typer.echo(f"error: {e}", err=True)
                raise typer.Exit(EXIT_CONFIG)
            except ProtocolRejected as e:
                typer.echo(f"rejected: {e.reason.value}", err=True)
                raise typer.Exit(EXIT_REJECTED)
            except PasswordNotFoundError as e:
                typer.echo(f"not found: {e}", err=True)
                raise typer.Exit(EXIT_NOT_FOUND)
            except (EvidenceError, MatrixInvariantError) as e:
                typer.echo(f"mismatch: {e}", err=True)
                raise typer.Exit(EXIT_MISMATCH)
            except LabError as e:
                logger.error(f"Failed to run '{command}': {e}")
                typer.echo(f"error: {e}", err=True)
                raise typer.Exit(EXIT_CONFIG)
        return wrapper  # type: ignore[return-value]
    return decorator


@app.callback()
def _configure() -> None:
    settings = get_settings()
    logging.basicConfig(level=settings.log_level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def summary_line(outcome: ScenarioOutcome) -> str:
    data = outcome.model_dump(mode="json")
    parts = [f"{key}={data[key]}" for key in SUMMARY_FIELDS if data.get(key) is not None]
    parts.extend(f"{key}={value}" for key, value in sorted(outcome.details.items()))
    return " ".join(parts)


def render_run(run: ScenarioRun, format: OutputFormat) -> str:
    """Transcript followed by the outcome record."""
    if format == OutputFormat.STRUCTURED:
        return run.scenario.transcript.export_json_lines() + run.outcome.model_dump_json() + "\n"
    return run.scenario.transcript.export() + summary_line(run.outcome) + "\n"


def _with_password(fixture: ScenarioFixture, party_name: str, password: str) -> ScenarioFixture:
    parties: List[PartySpec] = [
        p.model_copy(update={"password": password}) if p.name == party_name else p for p in fixture.parties
    ]
    return fixture.model_copy(update={"parties": parties})


def _configured_fixture(config: CliConfig, name: str) -> ScenarioFixture:
    fixture = load_fixture(name)
    updates: Dict[str, Any] = {"delta_t": config.delta_t if config.delta_t is not None else get_settings().delta_t}
    if config.delay:
        updates["delay"] = config.delay
    if config.target is not None:
        if config.protocol != ProtocolId.XU:
            raise ScenarioConfigError("--target only applies to xu")
        updates["victim"] = config.target
    fixture = fixture.model_copy(update=updates)
    if config.password is not None:
        target = fixture.victim or fixture.first("user").name
        if any(p.name == target for p in fixture.parties):
            fixture = _with_password(fixture, target, config.password)
    return fixture


def honest_output(config: CliConfig) -> Tuple[str, int]:
    assert config.protocol is not None
    fixture = _configured_fixture(config, f"{config.protocol.value}_honest")
    run = run_fixture(fixture, config.seed)
    return render_run(run, config.format), OUTCOME_EXIT_CODES[run.outcome.outcome]


def attack_output(config: CliConfig) -> Tuple[str, int]:
    assert config.protocol is not None
    fixture = _configured_fixture(config, ATTACK_FIXTURES[config.protocol])
    dictionary = resolve_dictionary(fixture, config.dictionary_path)
    run = run_fixture(fixture, config.seed, dictionary)
    return render_run(run, config.format), OUTCOME_EXIT_CODES[run.outcome.outcome]


def evaluate_output(config: CliConfig) -> Tuple[str, int, List[str]]:
    matrix = run_attack_scenarios(config.seed)
    mismatches = check_expected(matrix, load_expected_verdicts())
    return render_matrix(matrix, config.format).decode("utf-8"), EXIT_MISMATCH if mismatches else EXIT_OK, mismatches


@app.command()
@handle_cli_errors("honest")
def honest(
    protocol: ProtocolOption = None,
    seed: SeedOption = 0,
    format: FormatOption = OutputFormat.TEXT,
    delta_t: DeltaTOption = None,
    delay: Annotated[int, typer.Option("--delay", help="Ticks between login send and server receipt (xu)")] = 0,
    password: Annotated[Optional[str], typer.Option("--password", help="Registered password")] = None,
) -> None:
    """Run an honest session (verify and change round trip for hsiang and kim) and print its transcript."""
    config = CliConfig(
        command=CommandName.HONEST, protocol=protocol, seed=seed, format=format,
        delta_t=delta_t, delay=delay, password=password,
    )
    text, code = honest_output(config)
    typer.echo(text, nl=False)
    raise typer.Exit(code)


@app.command()
@handle_cli_errors("attack")
def attack(
    protocol: ProtocolOption = None,
    dictionary: Annotated[Optional[str], typer.Option("--dictionary", "-d", help="One candidate per line")] = None,
    seed: SeedOption = 0,
    format: FormatOption = OutputFormat.TEXT,
    delta_t: DeltaTOption = None,
    password: Annotated[Optional[str], typer.Option("--password", help="Victim password")] = None,
    target: Annotated[Optional[str], typer.Option("--target", help="Identity the insider claims (xu)")] = None,
) -> None:
    """Run the protocol's attack and print the transcript and attack report.

    The dictionary defaults to the bundled 1000-entry demo list and is ignored for xu.
    """
    config = CliConfig(
        command=CommandName.ATTACK, protocol=protocol, dictionary_path=dictionary, seed=seed,
        format=format, delta_t=delta_t, password=password, target=target,
    )
    text, code = attack_output(config)
    typer.echo(text, nl=False)
    raise typer.Exit(code)


@app.command()
@handle_cli_errors("evaluate")
def evaluate(
    protocol: ProtocolOption = None,
    seed: SeedOption = 0,
    format: FormatOption = OutputFormat.TEXT,
) -> None:
    """Build the verdict matrix and compare it with the expected cells."""
    config = CliConfig(command=CommandName.EVALUATE, protocol=protocol, seed=seed, format=format)
    text, code, mismatches = evaluate_output(config)
    typer.echo(text, nl=False)
    if mismatches:
        typer.echo(f"mismatch: {mismatches[0]}", err=True)
    raise typer.Exit(code)


@app.command("fixtures")
@handle_cli_errors("fixtures")
def fixtures_command() -> None:
    """List the fixture corpus."""
    for name in list_fixtures():
        fixture = load_fixture(name)
        typer.echo(f"{name}\t{fixture.protocol.value}\t{fixture.kind.value}\t{fixture.description}")


@app.command()
@handle_cli_errors("replay")
def replay(
    name: Annotated[str, typer.Argument(help="Fixture name")],
    seed: SeedOption = 0,
    format: FormatOption = OutputFormat.TEXT,
) -> None:
    """Replay one fixture; exit 0 when it reproduces its expected outcome."""
    fixture = load_fixture(name)
    run = run_fixture(fixture, seed, resolve_dictionary(fixture))
    typer.echo(render_run(run, format), nl=False)
    problems = outcome_mismatches(fixture, run.outcome)
    for problem in problems:
        typer.echo(f"mismatch: {problem}", err=True)
    raise typer.Exit(EXIT_MISMATCH if problems else EXIT_OK)


@app.command("regen-goldens")
@handle_cli_errors("regen-goldens")
def regen_goldens(
    output_dir: Annotated[Path, typer.Option("--output-dir", help="Where golden files are written")] = GOLDEN_DIR,
    seed: SeedOption = 0,
) -> None:
    """Maintenance: rewrite the golden transcripts and matrix renderings."""
    output_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for protocol in ProtocolId:
        for command, render in (("honest", honest_output), ("attack", attack_output)):
            config = CliConfig(command=CommandName(command), protocol=protocol, seed=seed)
            text, _ = render(config)
            path = output_dir / f"{command}_{protocol.value}_seed{seed}.txt"
            path.write_text(text, encoding="utf-8")
            written.append(path)
    for format, suffix in ((OutputFormat.TEXT, "txt"), (OutputFormat.STRUCTURED, "jsonl")):
        text, _, _ = evaluate_output(CliConfig(command=CommandName.EVALUATE, seed=seed, format=format))
        path = output_dir / f"evaluate_seed{seed}.{suffix}"
        path.write_text(text, encoding="utf-8")
        written.append(path)
    for path in written:
        typer.echo(str(path))
    logger.info(f"Wrote {len(written)} golden files to {output_dir}")
