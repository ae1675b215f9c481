import math

import numpy as np
import pytest

from lptx.grid import Field, Grid


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_field(grid: Grid, rng: np.random.Generator, real: bool = True) -> Field:
    v = rng.standard_normal(grid.shape)
    if not real:
        v = v + 1j * rng.standard_normal(grid.shape)
    return Field(grid, v)


def dft_oracle(values: np.ndarray, L: float = 2 * math.pi) -> np.ndarray:
    """Direct O(n^4) sum of (L / n^2) * f(x) exp(-i xi.x), FFT-ordered output."""
    n = values.shape[0]
    h = L / n
    x = np.arange(n) * h
    freqs = np.fft.fftfreq(n, 1.0 / n) * (2 * math.pi / L)
    out = np.zeros((n, n), dtype=complex)
    for a, k1 in enumerate(freqs):
        for b, k2 in enumerate(freqs):
            s = 0j
            for i in range(n):
                for j in range(n):
                    s += values[i, j] * np.exp(-1j * (k1 * x[i] + k2 * x[j]))
            out[a, b] = s * L / n ** 2
    return out


def idft_oracle(hat: np.ndarray, L: float = 2 * math.pi) -> np.ndarray:
    n = hat.shape[0]
    x = np.arange(n) * (L / n)
    freqs = np.fft.fftfreq(n, 1.0 / n) * (2 * math.pi / L)
    out = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            ph = np.exp(1j * (freqs[:, None] * x[i] + freqs[None, :] * x[j]))
            out[i, j] = np.sum(hat * ph) / L
    return out


ACCEPTANCE_LINES: list = []


@pytest.fixture
def record():
    """Record one acceptance line; they are echoed again in the terminal summary."""

    def _record(label: str, ok: bool, detail: str):
        line = f"{label} {'PASS' if ok else 'FAIL'}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
