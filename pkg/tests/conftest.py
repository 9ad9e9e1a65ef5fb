import pytest

from painleve_kit.catalog import builtin_catalog

# criterion number -> (passed, detail); filled by the acceptance suite
ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def cat():
    return builtin_catalog()


@pytest.fixture(scope="session")
def ctx(cat):
    return cat.ctx


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
