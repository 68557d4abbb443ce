import numpy as np
import pytest
from hypothesis import strategies as st

from msdgm.pattern import MarkedPointPattern, Window, demean_marks, rescale_to_unit_square


def random_pattern(rng, d, n_per_type, window=None, marks="normal"):
    """Uniform points in ``window`` (default unit square) with random marks."""
    window = window or Window.unit()
    counts = n_per_type if isinstance(n_per_type, (list, tuple)) else [n_per_type] * d
    n = sum(counts)
    x = rng.uniform(window.x_min, window.x_max, n)
    y = rng.uniform(window.y_min, window.y_max, n)
    ids = np.repeat(np.arange(d), counts)
    m = rng.standard_normal(n) if marks == "normal" else rng.gamma(2.0, 5.0, n)
    return MarkedPointPattern(x, y, ids, m, window, tuple(f"T{k}" for k in range(d)))


def prepared(pattern):
    return demean_marks(rescale_to_unit_square(pattern))


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@st.composite
def hermitian_pd(draw, min_d=3, max_d=8):
    """Random Hermitian positive-definite matrix via A A^H + c I."""
    d = draw(st.integers(min_d, max_d))
    seed = draw(st.integers(0, 2**32 - 1))
    r = np.random.default_rng(seed)
    a = r.standard_normal((d, d + 2)) + 1j * r.standard_normal((d, d + 2))
    return a @ a.conj().T + 0.1 * np.eye(d)


_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion, then assert."""
    def check(number, text, ok):
        _ACCEPTANCE.append((number, "PASS" if ok else "FAIL", text))
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}")
        assert ok, f"criterion {number} failed: {text}"
    return check


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number, status, text in sorted(_ACCEPTANCE):
            terminalreporter.write_line(f"[{status}] {number}: {text}")
