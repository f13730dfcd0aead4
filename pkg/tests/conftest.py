import pytest

_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_RESULTS] = {}


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    report = yield
    marker = item.get_closest_marker("acceptance")
    if marker is not None and (report.when == "call" or report.failed or report.skipped):
        number, title = marker.args
        results = item.config.stash[_RESULTS]
        entry = results.setdefault(number, {"title": title, "ok": True, "seconds": 0.0})
        entry["ok"] &= report.passed or (report.when != "call" and not report.failed)
        entry["seconds"] += report.duration
        if report.skipped:
            entry["ok"] = False
    return report


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash[_RESULTS]
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        entry = results[number]
        status = "PASS" if entry["ok"] else "FAIL"
        terminalreporter.write_line(
            f"criterion {number:>2}: {status}  {entry['title']}  ({entry['seconds']:.2f} s)"
        )
