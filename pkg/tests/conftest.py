import pytest

from heckesign.experiments import DEFAULT_WEIGHTS, forms_for

# filled by test_acceptance, printed once at the end of the run
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def all_forms():
    """Every eigenform of weight 12..300 at the default precision (memoised in experiments)."""
    return forms_for(DEFAULT_WEIGHTS)


@pytest.fixture(scope="session")
def forms_by_weight(all_forms):
    out = {}
    for f in all_forms:
        out.setdefault(f.k, []).append(f)
    return out


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
