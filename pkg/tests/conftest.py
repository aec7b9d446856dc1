import os

from hypothesis import settings

settings.register_profile(
    "extlab",
    max_examples=int(os.environ.get("EXTLAB_EXAMPLES", "30")),
    deadline=None,
    derandomize=os.environ.get("EXTLAB_SEED") is None,
    database=None,
)
settings.load_profile("extlab")


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
