import pytest

from lptorus.spectral import make_partition

CRITERIA = {
    1: "partition/block exactness",
    2: "Bony decomposition",
    3: "paraproduct/resonant norm stability",
    4: "exact identity suite",
    5: "decay suites",
    6: "scaling exponents",
    7: "reduction consistency",
    8: "degenerate annihilation",
    9: "guard behaviour",
    10: "determinism",
}

_RESULTS: dict = {}


@pytest.fixture(scope="session")
def part():
    """The acceptance grid: d = 1, N = 2^14."""
    return make_partition()


@pytest.fixture(scope="session")
def small():
    return make_partition(grid_spec=(1, 2**10))


@pytest.fixture(scope="session")
def part2d():
    return make_partition(grid_spec=(2, 256))


@pytest.fixture
def acceptance():
    """record(criterion, passed, detail) for the summary printed at the end."""

    def record(cid: int, passed: bool, detail: str):
        _RESULTS.setdefault(cid, []).append((bool(passed), detail))
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid, name in CRITERIA.items():
        rows = _RESULTS.get(cid)
        if not rows:
            terminalreporter.write_line(f"AC{cid:<2} NOT RUN  {name}")
            continue
        status = "PASS" if all(ok for ok, _ in rows) else "FAIL"
        failed = [d for ok, d in rows if not ok]
        detail = "; ".join(failed or [d for _, d in rows])
        terminalreporter.write_line(f"AC{cid:<2} {status:<8} {name}: {detail}")
