"""Shared fixtures.

The acceptance tests append one summary line per criterion; the terminal
summary hook replays them after the run so the pass/fail ledger is visible
in plain pytest output without -s.
"""

import json

import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion_line():
    """Record '[PASS/FAIL] criterion N: text' and assert on failure."""

    def _record(ok, num, text):
        tag = "PASS" if ok else "FAIL"
        ACCEPTANCE_LINES.append(f"[{tag}] criterion {num}: {text}")
        assert ok, f"criterion {num}: {text}"

    return _record


@pytest.fixture(scope="session")
def all_runs(tmp_path_factory):
    """Two complete 'run --scenario all --seed 7' invocations with artifacts.

    Returns [(exit_code, out_dir, parsed_json), ...].  Session scoped: the
    runs cost about half a minute each and several criteria read them back.
    """
    from hardycalc import cli

    runs = []
    for k in (1, 2):
        out = tmp_path_factory.mktemp(f"all_run_{k}")
        code = cli.main(["run", "--scenario", "all", "--seed", "7",
                         "--json", "--csv", "--out", str(out)])
        payload = json.loads((out / "reports_all.json").read_text())
        runs.append((code, out, payload))
    return runs


def reports_by_name(payload):
    return {r["name"]: r for r in payload["reports"]}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
