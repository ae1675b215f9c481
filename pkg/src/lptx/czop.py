"""Translation-invariant Calderon-Zygmund multipliers on the torus.

A :class:`Multiplier` is a table of symbol samples ``m(xi)`` on the
frequency lattice.  Application is the spectral pointwise product.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .grid import Field, Grid, _fwd, _inv
from .lpcalc import band_symbol, high_symbol, low_symbol, spectral_leakage

__all__ = [
    "Multiplier",
    "SymbolRegularityError",
    "make_multiplier",
    "apply",
    "power",
    "localize",
    "commutator_apply",
    "symbol_constant",
    "kernel",
    "kernel_decay_exponent",
]

REGULARITY_LIMIT = 100.0
DIFF_ORDER = 4


class SymbolRegularityError(ValueError):
    """Symbol fails the discrete Mikhlin-type derivative bound."""


@dataclass(frozen=True)
class Multiplier:
    grid: Grid
    symbol: np.ndarray = field(repr=False)
    symbol_bound: float
    name: str = "table"
    localization: Optional[tuple[str, int]] = None

    def __post_init__(self):
        s = np.asarray(self.symbol, dtype=complex)
        s.setflags(write=False)
        object.__setattr__(self, "symbol", s)

    def __call__(self, f: Field) -> Field:
        return apply(self, f)


def _centered(m: np.ndarray, axis: int, order: int) -> np.ndarray:
    out = m
    for _ in range(order):
        out = (np.roll(out, -1, axis) - np.roll(out, 1, axis)) / 2.0
    return out


def symbol_constant(symbol: np.ndarray, grid: Grid, max_order: int = DIFF_ORDER) -> float:
    """Smallest ``c`` with ``|D^alpha m(xi)| <= c (1+|xi|)^-|alpha|`` on the lattice.

    ``D`` is the composed centered first difference in frequency units,
    evaluated only where the stencil does not wrap past the lattice edge.
    Orders whose stencil leaves no interior point on a small lattice are skipped.
    """
    n = grid.n_points
    h = 2 * np.pi / grid.domain_length
    idx = grid.integer_frequencies
    i1, i2 = np.meshgrid(idx, idx, indexing="ij")
    r = grid.abs_xi
    best = 0.0
    for a1 in range(max_order + 1):
        d1 = _centered(symbol, 0, a1)
        for a2 in range(max_order + 1 - a1):
            interior = (np.abs(i1) < n // 2 - a1) & (np.abs(i2) < n // 2 - a2)
            if not interior.any():
                continue
            d = _centered(d1, 1, a2) / h ** (a1 + a2)
            v = np.abs(d) * (1.0 + r) ** (a1 + a2)
            best = max(best, float(v[interior].max()))
    return best


_SPEC_RE = re.compile(r"^\s*(riesz|smoothed_riesz)\s*\(\s*([12])\s*,\s*([12])\s*\)\s*$")


def _builtin_symbol(spec: str, grid: Grid) -> np.ndarray:
    if spec.strip() == "identity":
        return np.ones(grid.shape, dtype=complex)
    m = _SPEC_RE.match(spec)
    if not m:
        raise ValueError(
            f"unknown multiplier spec {spec!r}; expected identity, riesz(i,j) "
            "or smoothed_riesz(i,j) with i, j in {1, 2}")
    kind, i, j = m.group(1), int(m.group(2)), int(m.group(3))
    xi = grid.xi
    num = xi[i - 1] * xi[j - 1]
    r2 = grid.abs_xi ** 2
    if kind == "riesz":
        # zero mode is isolated on the torus; its value is a convention
        with np.errstate(invalid="ignore", divide="ignore"):
            s = np.where(r2 > 0, num / np.where(r2 > 0, r2, 1.0), 0.0)
    else:
        s = num / (1.0 + r2)
    return s.astype(complex)


def make_multiplier(spec: Union[str, np.ndarray, Field], grid: Optional[Grid] = None) -> Multiplier:
    """Build a multiplier from a built-in name or an explicit symbol table.

    ``spec`` is ``"identity"``, ``"riesz(i,j)"``, ``"smoothed_riesz(i,j)"``,
    an ``n x n`` array in FFT order, or a spectral :class:`Field` (e.g. read
    from a field dump).
    """
    if isinstance(spec, Field):
        if not spec.spectral:
            raise ValueError("symbol tables must be spectral fields")
        grid = spec.grid
        symbol, name = spec.values, "table"
    elif isinstance(spec, str):
        if grid is None:
            raise ValueError("a grid is required for built-in symbols")
        symbol, name = _builtin_symbol(spec, grid), spec.replace(" ", "")
    else:
        if grid is None:
            raise ValueError("a grid is required for symbol tables")
        symbol = np.asarray(spec)
        if symbol.shape != grid.shape:
            raise ValueError(f"symbol table shape {symbol.shape} != grid shape {grid.shape}")
        name = "table"
    symbol = np.asarray(symbol, dtype=complex)
    if not np.all(np.isfinite(symbol)):
        raise ValueError("symbol table contains non-finite values")
    c = symbol_constant(symbol, grid)
    if c > REGULARITY_LIMIT:
        raise SymbolRegularityError(
            f"discrete symbol constant {c:.3g} exceeds {REGULARITY_LIMIT}")
    return Multiplier(grid, symbol, c, name)


def apply(M: Multiplier, f: Field) -> Field:
    if f.grid != M.grid:
        raise ValueError("multiplier and field live on different grids")
    if f.spectral:
        return Field(f.grid, f.values * M.symbol, spectral=True)
    return Field(f.grid, _inv(_fwd(f.values, f.grid) * M.symbol, f.grid))


def power(M: Multiplier, n: int) -> Multiplier:
    if M.localization is not None:
        raise ValueError("powers are taken of unlocalized multipliers")
    if int(n) != n or n < 1:
        raise ValueError(f"power must be a positive integer, got {n!r}; use 'identity' for n = 0")
    s = M.symbol ** int(n)
    name = M.name if n == 1 else f"{M.name}^{int(n)}"
    return Multiplier(M.grid, s, symbol_constant(s, M.grid), name)


_WINDOWS = {"band", "at_or_above", "below"}


def window_symbol(grid: Grid, window: str, k: int) -> np.ndarray:
    if window == "band":
        return band_symbol(grid, k)
    if window == "at_or_above":
        return high_symbol(grid, k)
    if window == "below":
        return low_symbol(grid, k)
    raise ValueError(f"window must be one of {sorted(_WINDOWS)}, got {window!r}")


def localize(M: Multiplier, window: str, k: int) -> Multiplier:
    """``P_J M`` for ``J`` = ``{k}``, ``[k, inf)`` or ``[0, k)``."""
    w = window_symbol(M.grid, window, k)
    s = M.symbol * w
    return Multiplier(M.grid, s, symbol_constant(s, M.grid), f"{M.name}|{window}{k}", (window, int(k)))


def commutator_apply(Mn_high: Multiplier, a_k: Field, f: Field, k: Optional[int] = None,
                     tol: float = 1e-12) -> Field:
    """``(M^n)_{>=k}(a_k f) - a_k (M^n)_{>=k} f`` with collocation products.

    ``a_k`` must be spectrally supported in band ``k`` (taken from the
    multiplier's localization when not given).
    """
    if k is None:
        if Mn_high.localization is None or Mn_high.localization[0] != "at_or_above":
            raise ValueError("commutator needs an at-or-above localized multiplier or explicit k")
        k = Mn_high.localization[1]
    a = a_k.to_physical()
    ff = f.to_physical()
    leak = spectral_leakage(a, band_symbol(a.grid, k))
    if leak > tol:
        raise ValueError(f"a_k has relative L2 mass {leak:.2e} outside band {k}")
    left = apply(Mn_high, Field(ff.grid, a.values * ff.values))
    right = a.values * apply(Mn_high, ff).values
    return Field(ff.grid, left.values - right)


def kernel(M: Multiplier) -> np.ndarray:
    """Convolution kernel on the grid: ``(M f)(x) = cell_area * sum_y K(x-y) f(y)``."""
    g = M.grid
    return _inv(M.symbol, g) / g.domain_length


def kernel_decay_exponent(M: Multiplier, floor: float = 1e-11) -> tuple[float, np.ndarray, np.ndarray]:
    """Fitted power-law exponent of the kernel's tail envelope.

    The envelope ``E(r) = max_{|x| >= r} |K(x)|`` is sampled at integer grid
    distances ``r`` and fitted as ``E ~ (1+r)^p`` over ``r >= 1`` where
    ``E`` stays above ``floor * max|K|``.  Returns ``(p, r, E)``.
    """
    g = M.grid
    K = np.abs(kernel(M))
    idx = g.integer_frequencies  # grid offsets in FFT order, reused as lattice distances
    i1, i2 = np.meshgrid(idx, idx, indexing="ij")
    dist = np.hypot(i1, i2)
    radii = np.arange(0, g.n_points // 2)
    env = np.array([K[dist >= r].max() for r in radii])
    keep = (radii >= 1) & (env > floor * K.max())
    r, e = radii[keep], env[keep]
    if r.size < 3:
        return float("-inf"), r, e
    p = np.polyfit(np.log(1.0 + r), np.log(e), 1)[0]
    return float(p), r, e
