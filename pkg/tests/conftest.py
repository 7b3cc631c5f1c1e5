from __future__ import annotations

from pathlib import Path

import pytest

from corpus_util import FIXTURES, GPT_PROBLEM

from ra_forge.ingest import parse_response
from ra_forge.model import Comparison, merge_ingest


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def gpt_response() -> str:
    return (FIXTURES / "responses" / "gpt_fixture.md").read_text(encoding="utf-8")


@pytest.fixture()
def gpt_comparison(gpt_response) -> Comparison:
    parsed = parse_response(gpt_response)
    return merge_ingest(Comparison(problem=GPT_PROBLEM), parsed, "replace")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    reports = []
    for key in ("passed", "failed"):
        reports.extend(terminalreporter.stats.get(key, []))
    acceptance = [
        r for r in reports
        if r.when == "call" and "test_acceptance.py" in r.nodeid
    ]
    if not acceptance:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for report in sorted(acceptance, key=lambda r: r.nodeid):
        name = report.nodeid.split("::")[-1]
        status = "PASS" if report.passed else "FAIL"
        terminalreporter.write_line(f"{status}  {name}  ({report.duration:.2f}s)")
