from hypothesis import settings

# first numba calls include JIT compilation
settings.register_profile("dpenc", deadline=None)
settings.load_profile("dpenc")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
