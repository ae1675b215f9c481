"""Periodic grid on the 2-torus and its Fourier transform.

Spectral coefficients are taken against the orthonormal basis
``exp(i xi.x) / L`` of ``L^2([0, L)^2)``, so that the spectral l2 norm equals
the (Riemann-sum) physical L2 norm with no bookkeeping factors::

    fhat(xi) = (L / n^2) * sum_x f(x) exp(-i xi.x)
    f(x)     = (1 / L)   * sum_xi fhat(xi) exp(i xi.x)

Arrays are stored in FFT order (``numpy.fft.fftfreq`` layout).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as sfft

__all__ = [
    "Grid",
    "Field",
    "make_grid",
    "forward_transform",
    "inverse_transform",
    "multiply",
    "k_max",
]


@dataclass(frozen=True)
class Grid:
    """Uniform ``n x n`` grid on ``[0, L)^2`` with periodic boundaries."""

    n_points: int
    domain_length: float = 2 * math.pi

    def __post_init__(self):
        n = self.n_points
        if not isinstance(n, (int, np.integer)) or n < 8 or n & (n - 1):
            raise ValueError(
                f"n_points must be a power of two >= 8, got {n!r}")
        if not (self.domain_length > 0 and math.isfinite(self.domain_length)):
            raise ValueError(
                f"domain_length must be positive, got {self.domain_length!r}")

    @property
    def spacing(self) -> float:
        return self.domain_length / self.n_points

    @property
    def cell_area(self) -> float:
        return self.spacing ** 2

    @property
    def area(self) -> float:
        return self.domain_length ** 2

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_points, self.n_points)

    @property
    def k_max(self) -> int:
        """Largest dyadic band fully resolved below the Nyquist shell."""
        return int(round(math.log2(self.n_points // 2))) - 1

    @cached_property
    def integer_frequencies(self) -> np.ndarray:
        """Integer lattice ``{-n/2, ..., n/2-1}`` in FFT order."""
        return np.fft.fftfreq(self.n_points, d=1.0 / self.n_points).round().astype(int)

    @cached_property
    def xi(self) -> tuple[np.ndarray, np.ndarray]:
        k = self.integer_frequencies * (2 * math.pi / self.domain_length)
        k1, k2 = np.meshgrid(k, k, indexing="ij")
        k1.setflags(write=False)
        k2.setflags(write=False)
        return k1, k2

    @cached_property
    def abs_xi(self) -> np.ndarray:
        k1, k2 = self.xi
        r = np.hypot(k1, k2)
        r.setflags(write=False)
        return r

    @cached_property
    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.arange(self.n_points) * self.spacing
        x1, x2 = np.meshgrid(x, x, indexing="ij")
        x1.setflags(write=False)
        x2.setflags(write=False)
        return x1, x2

    def zeros(self) -> "Field":
        return Field(self, np.zeros(self.shape, dtype=complex))

    def constant(self, value: complex) -> "Field":
        return Field(self, np.full(self.shape, value, dtype=complex))

    def mode(self, m1: int, m2: int, amplitude: complex = 1.0) -> "Field":
        """Physical field ``amplitude * exp(i (m1 x1 + m2 x2) 2 pi / L)``."""
        x1, x2 = self.coords
        s = 2 * math.pi / self.domain_length
        return Field(self, amplitude * np.exp(1j * s * (m1 * x1 + m2 * x2)))


def make_grid(n_points: int, domain_length: float = 2 * math.pi) -> Grid:
    return Grid(int(n_points), float(domain_length))


def k_max(grid: Grid) -> int:
    return grid.k_max


@dataclass(frozen=True)
class Field:
    """Samples of a scalar function on a grid, physical or spectral."""

    grid: Grid
    values: np.ndarray = field(repr=False)
    spectral: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field samples must be finite")
        object.__setattr__(self, "values", v)

    # arithmetic is defined only between fields in the same representation
    def _check(self, other: "Field"):
        if other.grid != self.grid or other.spectral != self.spectral:
            raise ValueError("fields live on different grids or representations")

    def __add__(self, other: "Field") -> "Field":
        self._check(other)
        return Field(self.grid, self.values + other.values, self.spectral)

    def __sub__(self, other: "Field") -> "Field":
        self._check(other)
        return Field(self.grid, self.values - other.values, self.spectral)

    def __mul__(self, scalar: complex) -> "Field":
        return Field(self.grid, self.values * scalar, self.spectral)

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return Field(self.grid, -self.values, self.spectral)

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    def is_real(self, rtol: float = 1e-10) -> bool:
        if self.spectral:
            raise ValueError("reality is checked on physical samples")
        scale = max(np.abs(self.values).max(), np.finfo(float).tiny)
        return bool(np.abs(self.values.imag).max() <= rtol * scale)

    def to_spectral(self) -> "Field":
        return self if self.spectral else forward_transform(self)

    def to_physical(self) -> "Field":
        return inverse_transform(self) if self.spectral else self


def _fwd(values: np.ndarray, grid: Grid) -> np.ndarray:
    return sfft.fft2(values, norm="ortho") * grid.spacing


def _inv(values: np.ndarray, grid: Grid) -> np.ndarray:
    return sfft.ifft2(values, norm="ortho") / grid.spacing


def forward_transform(field: Field) -> Field:
    if field.spectral:
        raise ValueError("field is already spectral")
    return Field(field.grid, _fwd(field.values, field.grid), spectral=True)


def inverse_transform(spectral: Field) -> Field:
    if not spectral.spectral:
        raise ValueError("field is not spectral")
    return Field(spectral.grid, _inv(spectral.values, spectral.grid), spectral=False)


def _pad(hat: np.ndarray, m: int) -> np.ndarray:
    """Embed FFT-ordered coefficients of an n-grid into an m-grid (m >= n)."""
    n = hat.shape[0]
    out = np.zeros((m, m), dtype=complex)
    idx_n = np.fft.fftfreq(n, 1.0 / n).round().astype(int)
    idx_m = np.where(idx_n < 0, idx_n + m, idx_n)
    out[np.ix_(idx_m, idx_m)] = hat
    return out


def _truncate(hat: np.ndarray, n: int) -> np.ndarray:
    m = hat.shape[0]
    idx_n = np.fft.fftfreq(n, 1.0 / n).round().astype(int)
    idx_m = np.where(idx_n < 0, idx_n + m, idx_n)
    return hat[np.ix_(idx_m, idx_m)]


def multiply(f: Field, g: Field, dealias: bool = False) -> Field:
    """Pointwise product of two physical fields.

    With ``dealias=True`` the product is formed on a grid of twice the
    resolution and truncated back, which is the exact product of the two
    trigonometric interpolants restricted to the lattice. Without it the
    product is the plain collocation product (high modes alias).
    """
    if f.spectral or g.spectral:
        raise ValueError("multiply expects physical fields")
    if f.grid != g.grid:
        raise ValueError("grid mismatch")
    grid = f.grid
    if not dealias:
        return Field(grid, f.values * g.values)
    big = Grid(2 * grid.n_points, grid.domain_length)
    fb = _inv(_pad(_fwd(f.values, grid), big.n_points), big)
    gb = _inv(_pad(_fwd(g.values, grid), big.n_points), big)
    hat = _truncate(_fwd(fb * gb, big), grid.n_points)
    return Field(grid, _inv(hat, grid))
