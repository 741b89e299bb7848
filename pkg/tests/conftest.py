from pathlib import Path

import pytest

from tetherpair.scenario import load_scenario

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# criterion number -> (passed, summary, problems), filled by test_acceptance
VERDICTS: dict = {}


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.json"


def record(n: int, ok: bool, summary: str, problems=()) -> None:
    VERDICTS[n] = (ok, summary, list(problems))
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {summary}")


@pytest.fixture
def square():
    return load_scenario(fixture_path("square"))


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(VERDICTS):
        ok, summary, problems = VERDICTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {summary}")
        for p in problems[:5]:
            terminalreporter.write_line(f"    {p}")
