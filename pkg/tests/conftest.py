import os
from pathlib import Path

import pytest

ACCEPTANCE_LINES: list[str] = []

REPO = Path(__file__).resolve().parents[1]


def acceptance_dir() -> Path:
    """Where the desk-scale ensemble is cached between runs (delete it to recompute)."""
    return Path(os.environ.get("STQAOA_ACCEPTANCE_DIR", REPO / ".acceptance_cache"))


@pytest.fixture
def report():
    def _report(number, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}" + (f" | {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
