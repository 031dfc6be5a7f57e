"""Collects ``@pytest.mark.criterion(n, title)`` outcomes and prints one line per criterion."""

import pytest

_RESULTS: dict[int, dict] = {}


@pytest.fixture
def note(request):
    """Attach a short measured-value note to the current criterion line."""

    def add(text: str) -> None:
        request.node.user_properties.append(("note", text))

    return add


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and not report.failed):
        return
    number, title = marker.args
    entry = _RESULTS.setdefault(number, {"title": title, "ok": True, "notes": [], "failed": []})
    if report.failed:
        entry["ok"] = False
        entry["failed"].append(item.name)
    if report.when == "call":
        entry["notes"].extend(v for k, v in item.user_properties if k == "note")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        entry = _RESULTS[number]
        status = "PASS" if entry["ok"] else "FAIL"
        line = f"criterion {number:2d} {status}  {entry['title']}"
        details = entry["notes"] + [f"failed: {name}" for name in entry["failed"]]
        if details:
            line += "  [" + "; ".join(details) + "]"
        terminalreporter.write_line(line)
