"""Shared pytest wiring: a one-line verdict per end-to-end criterion."""


def pytest_terminal_summary(terminalreporter):
    tr = terminalreporter
    rows = []
    for outcome in ("passed", "failed"):
        for rep in tr.stats.get(outcome, []):
            if rep.when == "call" and "test_acceptance" in rep.nodeid:
                rows.append((rep.nodeid.split("::")[-1], outcome.upper()))
    if rows:
        tr.section("headline criteria")
        for name, verdict in rows:
            tr.write_line(f"{verdict:<7} {name}")
