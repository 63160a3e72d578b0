import numpy as np
import pytest

from pcha.design import build_design


def tied_points(rng, n, d, levels=5):
    """Points on a coarse grid so that coordinate ties are common."""
    return rng.integers(0, levels, size=(n, d)) / (levels - 1)


def centered_design_pair(X_train, X_new, m):
    """Explicitly centered training and new-point designs (column means from training)."""
    H = build_design(X_train, X_train, m).astype(np.float64)
    Hn = build_design(X_train, X_new, m).astype(np.float64)
    mu = H.mean(axis=0)
    return H - mu, Hn - mu


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES = []


def record_criterion(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
