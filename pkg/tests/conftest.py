"""Per-criterion PASS/FAIL summary for the acceptance suite.

Acceptance tests carry ``@pytest.mark.criterion(n)`` and may attach a short
``detail`` string through ``record_property``. After the run one line per
criterion is printed, failing if any of its tests failed or errored.
"""

from collections import defaultdict

_outcomes: dict[int, list[tuple[str, str, list[str]]]] = defaultdict(list)
_titles: dict[int, str] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            item.user_properties.append(("criterion", mark.args[0]))
            _titles.setdefault(mark.args[0], mark.args[1] if len(mark.args) > 1 else "")


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        details = [v for k, v in report.user_properties if k == "detail"]
        _outcomes[props["criterion"]].append((report.nodeid.split("::")[-1], report.outcome, details))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_outcomes):
        results = _outcomes[number]
        failed = [name for name, outcome, _ in results if outcome != "passed"]
        verdict = "FAIL" if failed else "PASS"
        tr.write_line(f"criterion {number:2d} {verdict}  {_titles.get(number, '')}  ({len(results) - len(failed)}/{len(results)} checks)")
        for name, outcome, details in results:
            for d in details:
                tr.write_line(f"      {'ok ' if outcome == 'passed' else 'BAD'} {name}: {d}")
