"""
Fixture Corpus

Scenario fixtures, the demo dictionary and the expected verdict cells ship as
package data under card_auth_lab/data. CARDLAB_FIXTURES_DIR points the
scenario lookup at another directory with the same layout.
"""

import json
import logging
from importlib import resources
try:
    from importlib.resources.abc import Traversable
except ImportError:  # Python < 3.11
    from importlib.abc import Traversable
from pathlib import Path
from typing import List, Optional, Union

from pydantic import TypeAdapter, ValidationError

from .config import get_settings
from .exceptions import FixtureNotFoundError, ScenarioConfigError
from .models import ExpectedCell, ScenarioFixture, ScenarioOutcome

logger = logging.getLogger(__name__)

DEMO_DICTIONARY = "demo"

_EXPECTED_CELLS = TypeAdapter(List[ExpectedCell])


def _data() -> Traversable:
    return resources.files("card_auth_lab").joinpath("data")


def _fixtures_dir() -> Union[Path, Traversable]:
    override = get_settings().fixtures_dir
    return override if override is not None else _data().joinpath("fixtures")


def list_fixtures() -> List[str]:
    """Names of every fixture in the corpus, sorted."""
    return sorted(
        entry.name[: -len(".json")] for entry in _fixtures_dir().iterdir() if entry.name.endswith(".json")
    )


def load_fixture(name: str) -> ScenarioFixture:
    """Load one fixture by name.

    Raises:
        FixtureNotFoundError: no fixture file with that name
        ScenarioConfigError: the file does not match the fixture schema
    """
    source = _fixtures_dir().joinpath(f"{name}.json")
    if not source.is_file():
        raise FixtureNotFoundError(name)
    try:
        fixture = ScenarioFixture.model_validate_json(source.read_text(encoding="utf-8"))
    except ValidationError as e:
        logger.error(f"Failed to parse fixture '{name}': {e}")
        raise ScenarioConfigError(f"fixture '{name}' is invalid: {e}") from e
    if fixture.name != name:
        raise ScenarioConfigError(f"fixture file '{name}.json' declares name '{fixture.name}'")
    return fixture


def parse_dictionary(text: str) -> List[str]:
    """One candidate per line, order kept. A trailing newline is optional; a blank line is the empty password."""
    return text.splitlines()


def load_dictionary(path: Optional[Union[str, Path]] = None) -> List[str]:
    """Read a dictionary file, or the 1000-entry demo dictionary when no path is given.

    Raises:
        ScenarioConfigError: the file cannot be read as UTF-8 text
    """
    if path is None or str(path) == DEMO_DICTIONARY:
        return parse_dictionary(_data().joinpath("dictionary.txt").read_text(encoding="utf-8"))
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        logger.error(f"Failed to read dictionary '{path}': {e}")
        raise ScenarioConfigError(f"cannot read dictionary '{path}': {e}") from e
    entries = parse_dictionary(text)
    logger.debug(f"Loaded {len(entries)} dictionary entries from {path}")
    return entries


def resolve_dictionary(fixture: ScenarioFixture, override: Optional[Union[str, Path]] = None) -> Optional[List[str]]:
    """The dictionary an attack fixture runs with; None for fixtures that take none."""
    if override is not None:
        return load_dictionary(override)
    if fixture.dictionary is None:
        return None
    return load_dictionary(fixture.dictionary)


def load_expected_verdicts() -> List[ExpectedCell]:
    return _EXPECTED_CELLS.validate_python(
        json.loads(_data().joinpath("expected_verdicts.json").read_text(encoding="utf-8"))
    )


def outcome_mismatches(fixture: ScenarioFixture, outcome: ScenarioOutcome) -> List[str]:
    """Fields of the fixture's expected outcome that the run did not reproduce."""
    expected = fixture.expected
    actual = {
        "outcome": outcome.outcome,
        "reason": outcome.reason,
        "login_requests_sent": outcome.login_requests_sent,
        "online_messages": outcome.online_messages,
        "password": outcome.recovered_password,
        "guesses_tried": outcome.guesses_tried,
    }
    problems = []
    for key, want in expected.model_dump(exclude_none=True).items():
        if actual[key] != want:
            problems.append(f"{fixture.name}: {key} expected {want!r}, got {actual[key]!r}")
    return problems
