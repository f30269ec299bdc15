import functools

import pytest

from ucov.group import GroupTable

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@functools.lru_cache(maxsize=None)
def table(q: int) -> GroupTable:
    return GroupTable.build(q)


@pytest.fixture(scope="session")
def tables():
    return table


@pytest.fixture
def record_acceptance():
    def rec(name: str, ok: bool, detail: str = "") -> None:
        ACCEPTANCE[name] = (bool(ok), detail)

    return rec


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda s: (int(s.split()[0]), s)):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {name}  {detail}")
