"""Collects acceptance outcomes and prints one PASS/FAIL line per criterion."""

from collections import OrderedDict

_CRITERIA: "OrderedDict[str, dict]" = OrderedDict()


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            cid, title = mark.args
            entry = _CRITERIA.setdefault(str(cid), {"title": title, "outcomes": []})
            entry.setdefault("nodes", set()).add(item.nodeid)


def pytest_runtest_logreport(report):
    for entry in _CRITERIA.values():
        if report.nodeid in entry.get("nodes", ()):
            if report.when == "call" or report.outcome != "passed":
                entry["outcomes"].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for cid, entry in sorted(_CRITERIA.items(), key=lambda kv: (int(kv[0].rstrip("ab")), kv[0])):
        outcomes = entry["outcomes"]
        if not outcomes:
            status = "NOT RUN"
        elif all(o == "passed" for o in outcomes):
            status = "PASS"
        elif any(o == "failed" for o in outcomes):
            status = "FAIL"
        else:
            status = "SKIP"
        terminalreporter.write_line(f"criterion {cid:<3} {status:<7} {entry['title']}")
