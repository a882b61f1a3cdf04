import numpy as np
import pytest

# criterion number -> list of (passed, detail) filled by test_acceptance
ACCEPTANCE_RESULTS = {}
ACCEPTANCE_CRITERIA = {
    1: "null calibration, model 1",
    2: "null calibration, models 2 and 3",
    3: "power under the alternatives",
    4: "PP-plot fidelity",
    5: "annihilation of drift inputs",
    6: "Wiener benchmark sanity",
    7: "oracle equivalence",
    8: "estimator round trips",
    9: "determinism across worker counts",
}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num, title in ACCEPTANCE_CRITERIA.items():
        checks = ACCEPTANCE_RESULTS.get(num)
        if checks is None:
            tr.write_line(f"criterion {num} ({title}): NOT RUN")
            continue
        ok = all(passed for passed, _ in checks)
        failed = [d for passed, d in checks if not passed]
        detail = "; ".join(failed) if failed else "; ".join(d for _, d in checks[:3])
        if not failed and len(checks) > 3:
            detail += f"; ... {len(checks)} checks"
        tr.write_line(f"criterion {num} ({title}): {'PASS' if ok else 'FAIL'} :: {detail}")
