import pytest

_results: dict[str, list[str]] = {}
_labels: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(key, label): acceptance criterion this test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    key = str(marker.args[0])
    _labels[key] = marker.args[1] if len(marker.args) > 1 else ""
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _results.setdefault(key, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")

    def order(key):
        head = key.rstrip("abcdefghijklmnopqrstuvwxyz")
        return (int(head) if head.isdigit() else 99, key)

    for key in sorted(_results, key=order):
        outcomes = _results[key]
        status = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {key}: {status}  {_labels[key]}")
