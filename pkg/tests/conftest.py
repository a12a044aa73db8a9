import sys

import pytest

from pdc_match.materials import Database, default_database_path


@pytest.fixture(scope="session")
def db():
    return Database.load(default_database_path())


@pytest.fixture(scope="session")
def ppln(db):
    return db["PPLN"]


@pytest.fixture(scope="session")
def ppktp(db):
    return db["PPKTP"]


def pytest_terminal_summary(terminalreporter):
    module = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
