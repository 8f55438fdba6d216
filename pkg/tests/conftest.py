import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import acceptance_log  # noqa: E402

SUITE_BUDGET_S = 30.0


def pytest_sessionstart(session):
    session.config._suite_start = time.perf_counter()


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - session.config._suite_start
    session.config._suite_elapsed = elapsed
    if acceptance_log.RESULTS and elapsed >= SUITE_BUDGET_S:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not acceptance_log.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance_log.RESULTS:
        terminalreporter.write_line(line)
    elapsed = getattr(config, "_suite_elapsed", time.perf_counter() - config._suite_start)
    status = "PASS" if elapsed < SUITE_BUDGET_S else "FAIL"
    terminalreporter.write_line(
        f"[{status}] 10b full suite runtime {elapsed:.2f} s (limit {SUITE_BUDGET_S:.0f} s)")
