"""
Tests for the card-auth-lab command line.

Logs go to stderr; CARDLAB_LOG_LEVEL is raised to ERROR so stdout comparisons
stay byte-exact with any Click test runner.
"""

import json
import sys
from pathlib import Path

import pytest
from typer.testing import CliRunner

from card_auth_lab import main
from card_auth_lab.cli import (
    EXIT_CONFIG,
    EXIT_MISMATCH,
    EXIT_NOT_FOUND,
    EXIT_OK,
    EXIT_REJECTED,
    GOLDEN_DIR,
    app,
    attack_output,
    evaluate_output,
    honest_output,
)
from card_auth_lab.models import CliConfig, CommandName, ExpectedCell, ProtocolId, VerdictStatus

runner = CliRunner()

GOLDEN_ROOT = Path(__file__).parent / "golden"


@pytest.fixture(autouse=True)
def quiet_logs(monkeypatch):
    monkeypatch.setenv("CARDLAB_LOG_LEVEL", "ERROR")


def invoke(*args: str):
    return runner.invoke(app, list(args))


@pytest.mark.integration
class TestHonestCommand:
    """Test cases for `honest`"""

    @pytest.mark.parametrize("protocol", [p.value for p in ProtocolId])
    def test_every_protocol_accepts(self, protocol):
        """Test exit 0 and an accepted summary for each scheme"""
        result = invoke("honest", "--protocol", protocol)
        assert result.exit_code == EXIT_OK
        assert f"protocol={protocol} outcome=accepted seed=0" in result.stdout

    def test_output_is_deterministic(self):
        """Test byte-identical stdout for identical flags"""
        first = invoke("honest", "-p", "juang", "--seed", "5")
        second = invoke("honest", "-p", "juang", "--seed", "5")
        assert first.stdout == second.stdout

    @pytest.mark.parametrize("protocol", ["hsiang", "kim"])
    def test_password_equal_to_default_new_one(self, protocol):
        """Test exit 0 when the registered password is the default change target"""
        result = invoke("honest", "-p", protocol, "--password", "changed-passw0rd")
        assert result.exit_code == EXIT_OK
        assert "outcome=accepted" in result.stdout

    def test_seed_changes_transcript(self):
        """Test that another seed gives another transcript"""
        assert invoke("honest", "-p", "li", "--seed", "1").stdout != invoke("honest", "-p", "li", "--seed", "2").stdout

    def test_stale_login_exits_rejected(self):
        """Test exit 3 for a protocol rejection"""
        result = invoke("honest", "-p", "xu", "--delta-t", "0", "--delay", "1")
        assert result.exit_code == EXIT_REJECTED

    def test_structured_format(self):
        """Test JSON lines ending in the outcome record"""
        result = invoke("honest", "-p", "xu", "--format", "structured")
        lines = [json.loads(line) for line in result.stdout.splitlines()]
        assert lines[0]["kind"] == "xu.register"
        assert lines[-1]["outcome"] == "accepted"

    def test_missing_protocol(self):
        """Test exit 2 when --protocol is absent"""
        assert invoke("honest").exit_code == EXIT_CONFIG

    def test_unknown_protocol(self):
        """Test exit 2 for a protocol outside the five schemes"""
        assert invoke("honest", "-p", "rsa").exit_code == EXIT_CONFIG

    def test_password_override(self):
        """Test that --password registers and logs in with another password"""
        result = invoke("honest", "-p", "kim", "--password", "something-else")
        assert result.exit_code == EXIT_OK


@pytest.mark.integration
class TestAttackCommand:
    """Test cases for `attack`"""

    @pytest.mark.parametrize("protocol, password", [
        ("juang", "meadow19"), ("hsiang", "copper23"), ("kim", "violet14"), ("li", "ember12"),
    ])
    def test_guessing_attacks_with_demo_dictionary(self, protocol, password):
        """Test recovery with the bundled dictionary"""
        result = invoke("attack", "-p", protocol)
        assert result.exit_code == EXIT_OK
        assert f"recovered_password={password}" in result.stdout

    def test_extraction_event_lists_card_fields(self):
        """Test that the stolen card fields appear in the attack transcript"""
        result = invoke("attack", "-p", "hsiang")
        assert "event=card_extracted party=alice detail=R:" in result.stdout
        assert ",b:" in result.stdout and ",V:" in result.stdout

    def test_xu_insider(self):
        """Test exit 0 for an accepted impersonation"""
        result = invoke("attack", "-p", "xu")
        assert result.exit_code == EXIT_OK
        assert "outcome=impersonation_accepted" in result.stdout

    def test_xu_unknown_target(self):
        """Test exit 3 when the claimed identity is not registered"""
        result = invoke("attack", "-p", "xu", "--target", "nobody")
        assert result.exit_code == EXIT_REJECTED

    def test_target_only_for_xu(self):
        """Test exit 2 for --target on a guessing attack"""
        assert invoke("attack", "-p", "kim", "--target", "bob").exit_code == EXIT_CONFIG

    def test_password_absent_from_dictionary(self, tmp_path):
        """Test exit 4 when the dictionary misses the password"""
        words = tmp_path / "words.txt"
        words.write_text("alpha\nbeta\n", encoding="utf-8")
        result = invoke("attack", "-p", "kim", "-d", str(words))
        assert result.exit_code == EXIT_NOT_FOUND
        assert "outcome=not_found" in result.stdout
        assert "guesses_tried=2" in result.stdout

    def test_custom_dictionary_and_password(self, tmp_path):
        """Test --dictionary with --password"""
        words = tmp_path / "words.txt"
        words.write_text("alpha\nhunter2\nbeta\n", encoding="utf-8")
        result = invoke("attack", "-p", "li", "-d", str(words), "--password", "hunter2")
        assert result.exit_code == EXIT_OK
        assert "guesses_tried=2" in result.stdout

    def test_unreadable_dictionary(self, tmp_path):
        """Test exit 2 for a missing dictionary file"""
        assert invoke("attack", "-p", "juang", "-d", str(tmp_path / "missing.txt")).exit_code == EXIT_CONFIG


@pytest.mark.integration
class TestEvaluateCommand:
    """Test cases for `evaluate`"""

    def test_matrix_matches_expectations(self):
        """Test exit 0 and the text grid"""
        result = invoke("evaluate")
        assert result.exit_code == EXIT_OK
        assert result.stdout.startswith("seed=0\n")

    def test_structured_output(self):
        """Test 50 JSON records"""
        result = invoke("evaluate", "--format", "structured")
        assert result.exit_code == EXIT_OK
        assert len(result.stdout.splitlines()) == 50

    def test_protocol_is_refused(self):
        """Test exit 2 for --protocol on evaluate"""
        assert invoke("evaluate", "-p", "kim").exit_code == EXIT_CONFIG

    def test_expectation_mismatch(self, mocker):
        """Test exit 5 when an expected cell is not reproduced"""
        mocker.patch(
            "card_auth_lab.cli.load_expected_verdicts",
            return_value=[ExpectedCell(protocol=ProtocolId.KIM, requirement="R5", status=VerdictStatus.VIOLATED)],
        )
        assert invoke("evaluate").exit_code == EXIT_MISMATCH


@pytest.mark.integration
class TestCorpusCommands:
    """Test cases for `fixtures`, `replay` and `regen-goldens`"""

    def test_fixtures_lists_corpus(self):
        """Test one line per fixture"""
        result = invoke("fixtures")
        assert result.exit_code == EXIT_OK
        lines = result.stdout.splitlines()
        assert len(lines) == 17
        assert lines[0].split("\t")[:3] == ["hsiang_honest", "hsiang", "honest"]

    def test_replay_rejected_fixture_matches(self):
        """Test that a fixture expecting a rejection replays with exit 0"""
        assert invoke("replay", "xu_stale_login").exit_code == EXIT_OK

    def test_replay_unknown_fixture(self):
        """Test exit 2 for an unknown name"""
        assert invoke("replay", "nope").exit_code == EXIT_CONFIG

    def test_regen_goldens(self, tmp_path):
        """Test that every golden file is written"""
        result = invoke("regen-goldens", "--output-dir", str(tmp_path))
        assert result.exit_code == EXIT_OK
        written = sorted(path.name for path in tmp_path.iterdir())
        assert len(written) == 12
        assert "evaluate_seed0.jsonl" in written
        assert "attack_xu_seed0.txt" in written


@pytest.mark.integration
class TestGoldenFiles:
    """Test cases comparing output with checked-in golden files"""

    def test_matrix(self):
        """Test the seed-0 verdict matrix against the checked-in rendering"""
        path = GOLDEN_ROOT / "evaluate_seed0.txt"
        assert path.exists(), f"golden file {path} is missing"
        text, code, _ = evaluate_output(CliConfig(command=CommandName.EVALUATE, seed=0))
        assert code == EXIT_OK
        assert text == path.read_text(encoding="utf-8")

    def test_regenerated_matrix_matches_checked_in(self, tmp_path):
        """Test that regen-goldens reproduces the checked-in matrix byte for byte"""
        assert invoke("regen-goldens", "--output-dir", str(tmp_path)).exit_code == EXIT_OK
        assert (tmp_path / "evaluate_seed0.txt").read_bytes() == (GOLDEN_ROOT / "evaluate_seed0.txt").read_bytes()

    def test_regeneration_is_byte_identical(self, tmp_path):
        """Test that two regenerations write identical transcripts and matrices"""
        first, second = tmp_path / "first", tmp_path / "second"
        for target in (first, second):
            assert invoke("regen-goldens", "--output-dir", str(target)).exit_code == EXIT_OK
        names = sorted(path.name for path in first.iterdir())
        assert names == sorted(path.name for path in second.iterdir())
        for name in names:
            assert (first / name).read_bytes() == (second / name).read_bytes(), name

    def test_default_location(self):
        """Test that regen-goldens writes where these tests read"""
        assert GOLDEN_ROOT.parts[-2:] == GOLDEN_DIR.parts


@pytest.mark.unit
class TestEntryPoint:
    """Test cases for the console script"""

    def test_main_runs_command(self, monkeypatch):
        """Test that main dispatches to the Typer app and exits with its code"""
        monkeypatch.setattr(sys, "argv", ["card-auth-lab", "fixtures"])
        with pytest.raises(SystemExit) as exc_info:
            main()
        assert exc_info.value.code in (0, None)
