import numpy as np
import pytest

# Collected (number, description, passed) triples from the acceptance
# tests, echoed as a one-line-per-criterion summary at the end of the run.
ACCEPTANCE_LINES = []


def record_criterion(number, description, passed):
    ACCEPTANCE_LINES.append((number, description, bool(passed)))
    print(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'} - {description}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, description, passed in sorted(ACCEPTANCE_LINES):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status} - {description}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_hurwitz(rng, n, min_decay=0.1):
    """Random Hurwitz matrix: shift a Gaussian left of the axis."""
    a = rng.standard_normal((n, n))
    scale = max(1.0, float(np.linalg.norm(a, 2)))
    shift = float(np.max(np.linalg.eigvals(a).real)) + min_decay * scale
    return a - shift * np.eye(n)
