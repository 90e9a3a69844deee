import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from corpus import ACCEPTANCE_RESULTS  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        status, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {status}  {detail}")
