import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, list[tuple[str, str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion checked by the test")


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    rep = yield
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return rep
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        if hasattr(rep, "wasxfail"):
            outcome = "XFAIL"
        elif rep.passed:
            outcome = "WARN" if any(k == "warn" for k, _ in item.user_properties) else "PASS"
        elif rep.skipped:
            outcome = "SKIP"
        else:
            outcome = "FAIL"
        detail = "; ".join(v for k, v in item.user_properties if k == "detail")
        _criteria.setdefault(mark.args[0], []).append((item.name, outcome, detail))
    return rep


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_criteria):
        parts = _criteria[n]
        outcomes = {o for _, o, _ in parts}
        if outcomes <= {"PASS"}:
            verdict = "PASS"
        elif "WARN" in outcomes:
            verdict = "WARN"
        else:
            verdict = "FAIL"
        tr.write_line(f"criterion {n:2d}: {verdict}")
        for name, outcome, detail in parts:
            tr.write_line(f"    {outcome:5s} {name}" + (f"  [{detail}]" if detail else ""))
