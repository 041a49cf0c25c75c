def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULT_LINES
    if RESULT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in RESULT_LINES:
            terminalreporter.write_line(line)
