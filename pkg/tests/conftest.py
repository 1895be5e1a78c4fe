import re

import pytest

# filled by test_acceptance; printed once at the end of the session
ACCEPTANCE_LINES = []


def _order(line):
    num = re.match(r"criterion (\d+)(\w*)", line)
    return int(num.group(1)), num.group(2)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=_order):
            terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Yield a recorder; the outcome line is written when the test finishes."""
    state = {}

    def start(number, title):
        state.update(number=number, title=title)

    yield start
    rep = getattr(request.node, "rep_call", None)
    if "number" not in state or rep is None:
        return
    outcome = "PASS" if rep.passed else "SKIP" if rep.skipped else "FAIL"
    line = f"criterion {state['number']}: {outcome}  {state['title']}"
    ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" or (rep.when == "setup" and rep.skipped):
        item.rep_call = rep
