"""Littlewood-Paley calculus on the torus.

The dyadic bump is ``chi(r) = theta(r) - theta(2 r)`` where ``theta`` is the
smooth step equal to 1 on ``[0, 1]`` and 0 on ``[2, inf)``, built from
``psi(t) = exp(-1/t)``.  ``chi`` is supported in ``[1/2, 2]`` and the dyadic
sum telescopes to 1 for every ``r > 0``.

Band 0 is the complement ``1 - sum_{k>=1} chi(2^-k r) = theta(r)``; bands
``k >= 1`` are ``chi(2^-k r)``.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .grid import Field, Grid, _fwd, _inv

__all__ = [
    "smooth_step",
    "theta",
    "chi",
    "band_symbol",
    "low_symbol",
    "high_symbol",
    "project_band",
    "project_low",
    "project_high",
    "decompose",
    "recompose",
    "resolved_noise",
    "spectral_leakage",
    "bernstein_ratio",
]


def _psi(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    a = _psi(t)
    b = _psi(1.0 - np.asarray(t, dtype=float))
    return a / (a + b)


def theta(r):
    return smooth_step(2.0 - np.asarray(r, dtype=float))


def chi(r):
    """Dyadic bump supported in [1/2, 2]."""
    r = np.asarray(r, dtype=float)
    return theta(r) - theta(2.0 * r)


def _check_band(grid: Grid, k: int, allow: int = 0):
    if int(k) != k or k < 0:
        raise ValueError(f"band index must be a non-negative integer, got {k!r}")
    if k > grid.k_max + allow:
        raise ValueError(
            f"band {k} exceeds k_max={grid.k_max} for n={grid.n_points} "
            "(band would alias past Nyquist)")


@lru_cache(maxsize=256)
def _band_symbol(grid: Grid, k: int) -> np.ndarray:
    r = grid.abs_xi
    w = theta(r) if k == 0 else chi(r / 2.0 ** k)
    w.setflags(write=False)
    return w


@lru_cache(maxsize=256)
def _low_symbol(grid: Grid, k: int) -> np.ndarray:
    w = np.zeros(grid.shape)
    for j in range(k):
        w = w + _band_symbol(grid, j)
    w.setflags(write=False)
    return w


def band_symbol(grid: Grid, k: int) -> np.ndarray:
    _check_band(grid, k)
    return _band_symbol(grid, k)


def low_symbol(grid: Grid, k: int) -> np.ndarray:
    """Symbol of ``P_{<k} = sum_{j<k} P_j``."""
    _check_band(grid, k, allow=1)
    return _low_symbol(grid, k)


def high_symbol(grid: Grid, k: int) -> np.ndarray:
    return 1.0 - low_symbol(grid, k)


def _apply_symbol(f: Field, w: np.ndarray) -> Field:
    if f.spectral:
        return Field(f.grid, f.values * w, spectral=True)
    return Field(f.grid, _inv(_fwd(f.values, f.grid) * w, f.grid))


def project_band(f: Field, k: int) -> Field:
    """``P_k f``; output keeps the representation of the input."""
    return _apply_symbol(f, band_symbol(f.grid, k))


def project_low(f: Field, k: int) -> Field:
    return _apply_symbol(f, low_symbol(f.grid, k))


def project_high(f: Field, k: int) -> Field:
    """``f - P_{<k} f``, computed by subtraction so low + high == f."""
    fh = f.values if f.spectral else _fwd(f.values, f.grid)
    low = fh * low_symbol(f.grid, k)
    high = fh - low
    if f.spectral:
        return Field(f.grid, high, spectral=True)
    return Field(f.grid, _inv(high, f.grid))


def decompose(f: Field) -> list[tuple[int, Field]]:
    """Bands ``0..k_max`` of ``f``.

    The pieces sum to ``f`` whenever ``f`` is resolved, i.e. its spectrum
    lies in ``|xi| <= 2^k_max``; the remainder is ``project_high(f, k_max+1)``.
    """
    grid = f.grid
    fh = f.values if f.spectral else _fwd(f.values, grid)
    out = []
    for k in range(grid.k_max + 1):
        part = fh * _band_symbol(grid, k)
        out.append((k, Field(grid, part, True) if f.spectral else Field(grid, _inv(part, grid))))
    return out


def recompose(parts: list[tuple[int, Field]]) -> Field:
    if not parts:
        raise ValueError("nothing to recompose")
    total = parts[0][1]
    for _, p in parts[1:]:
        total = total + p
    return total


def resolved_noise(grid: Grid, rng: np.random.Generator, real: bool = True) -> Field:
    """Gaussian random field with spectrum inside the resolved bands.

    Coefficients are i.i.d. complex normals on ``|xi| <= 2^k_max`` with the
    DC mode removed.
    """
    mask = (grid.abs_xi <= 2.0 ** grid.k_max) & (grid.abs_xi > 0)
    hat = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)) * mask
    v = _inv(hat, grid)
    if real:
        v = v.real.astype(complex)
    return Field(grid, v)


def spectral_leakage(f: Field, w: np.ndarray) -> float:
    """Relative L2 mass of ``f`` outside the support of the window ``w``."""
    fh = f.values if f.spectral else _fwd(f.values, f.grid)
    total = np.linalg.norm(fh)
    if total == 0:
        return 0.0
    return float(np.linalg.norm(fh[w == 0]) / total)


def bernstein_ratio(f: Field, k: int) -> float:
    """``||f||_inf / (2^k ||f||_2)`` for a band-k field."""
    fp = f.to_physical()
    l2 = np.sqrt(f.grid.cell_area * np.sum(np.abs(fp.values) ** 2))
    return float(np.abs(fp.values).max() / (2.0 ** k * l2))
