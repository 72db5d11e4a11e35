"""Shared fixtures and the per-criterion acceptance summary.

Tests in ``test_acceptance.py`` carry ``@pytest.mark.criterion(k, "label")``.
After the run one PASS/FAIL line is printed per criterion; a criterion passes
only if every test tagged with it passed.
"""

from collections import OrderedDict

import pytest

_OUTCOMES = OrderedDict()
_LABELS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, label): acceptance criterion tag")
    config.addinivalue_line("markers", "slow: long-running statistical test")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is None:
            continue
        num = mark.args[0]
        _LABELS[num] = mark.args[1] if len(mark.args) > 1 else ""
        _OUTCOMES.setdefault(num, [])


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    num = getattr(report, "criterion", None)
    if num is not None:
        _OUTCOMES[num].append((report.nodeid, report.outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        rep.criterion = mark.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    tr = terminalreporter
    tr.write_sep("=", "acceptance criteria")
    for num in sorted(_OUTCOMES):
        results = _OUTCOMES[num]
        if not results:
            status = "NOT RUN"
        elif all(o == "passed" for _, o in results):
            status = "PASS"
        elif any(o == "failed" for _, o in results):
            status = "FAIL"
        else:
            status = "SKIP"
        failed = [nid.split("::")[-1] for nid, o in results if o == "failed"]
        extra = f" (failed: {', '.join(failed)})" if failed else ""
        tr.write_line(f"criterion {num:>2} {status:<7} {_LABELS[num]}{extra}")
