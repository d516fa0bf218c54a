from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("repo")


def pytest_terminal_summary(terminalreporter):
    import verdicts

    if not verdicts.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in verdicts.EXPECTED:
        terminalreporter.write_line(verdicts.LINES.get(n, f"criterion {n:>2} FAIL: not run or aborted before its verdict"))
