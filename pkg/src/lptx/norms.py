"""Scalar functionals on fields and space-time fields.

All physical-space norms are Riemann sums ``(cell_area * sum |f|^p)^(1/p)``;
spectral norms use the unitary coefficients of :mod:`lptx.grid`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import Field, Grid, _fwd
from .lpcalc import _band_symbol
from .spacetime import SpaceTimeField, trapezoid

__all__ = [
    "log_plus",
    "lp_norm",
    "sobolev_norm",
    "besov_norm",
    "distribution",
    "weak_l1",
    "level_split",
    "n_of_g",
    "n_compact",
    "CellPartition",
    "WeightProfile",
    "make_cells",
    "make_weight",
    "n_mu_beta",
    "coefficient_norms",
]


def log_plus(x):
    """``log(2 + |x|)``; nondecreasing in ``|x|`` and at least ``log 2``."""
    return np.log(2.0 + np.abs(x))


def _hat(f: Field) -> np.ndarray:
    return f.values if f.spectral else _fwd(f.values, f.grid)


def _phys(f: Field) -> np.ndarray:
    return f.to_physical().values


def lp_norm(f: Field, p: float) -> float:
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p!r}")
    v = np.abs(_phys(f))
    if math.isinf(p):
        return float(v.max())
    if p == 1:
        return float(f.grid.cell_area * v.sum())
    return float((f.grid.cell_area * np.sum(v ** p)) ** (1.0 / p))


def sobolev_norm(f: Field, s: float) -> float:
    w = (1.0 + f.grid.abs_xi ** 2) ** s
    return float(np.sqrt(np.sum(w * np.abs(_hat(f)) ** 2)))


def _besov_from_hat(hat: np.ndarray, grid: Grid) -> float:
    total = 0.0
    for k in range(grid.k_max + 1):
        bk = np.sqrt(np.sum(np.abs(hat * _band_symbol(grid, k)) ** 2))
        total += (1.0 if k == 0 else 2.0 ** k) * bk
    return float(total)


def besov_norm(f: Field) -> float:
    """Inhomogeneous ``B^1_{2,1}`` norm over the resolved bands."""
    return _besov_from_hat(_hat(f), f.grid)


def distribution(f: Field, lam: float) -> float:
    """Measure of ``{|f| > lam}``."""
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    return float(f.grid.cell_area * np.count_nonzero(np.abs(_phys(f)) > lam))


def weak_l1(f: Field) -> float:
    """``sup_lam lam * |{|f| > lam}|``.

    For grid functions the supremum is attained as ``lam`` increases to one of
    the sample magnitudes ``v``, where the measure is ``|{|f| >= v}|``.
    """
    v = np.sort(np.abs(_phys(f)).ravel())[::-1]
    if v.size == 0 or v[0] == 0:
        return 0.0
    # count of samples >= v[j] is the index of the last tie plus one
    counts = np.searchsorted(-v, -v, side="right")
    return float(f.grid.cell_area * np.max(v * counts))


def level_split(f: Field, lam: float) -> tuple[Field, Field]:
    """``(f_{<lam}, f_{>=lam})`` with ``f = f_{<lam} + f_{>=lam}``."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    v = _phys(f)
    low = np.where(np.abs(v) < lam, v, 0.0)
    return Field(f.grid, low), Field(f.grid, v - low)


def n_compact(l1: float, linf: float) -> float:
    return float(l1 * log_plus(linf) + 1.0)


def n_of_g(g: SpaceTimeField | Field) -> float:
    """``||g||_{L^1} log^+ ||g||_{L^inf} + 1``.

    For a space-time field the L1 norm is over ``[0,1] x torus`` (trapezoid in
    time); a plain field is treated as a single time slice.
    """
    if isinstance(g, Field):
        return n_compact(lp_norm(g, 1), lp_norm(g, math.inf))
    l1 = float(trapezoid(g.l1_per_time(), g.times))
    linf = float(np.abs(g.values).max())
    return n_compact(l1, linf)


def _torus_offset(x: np.ndarray, c: float, L: float) -> np.ndarray:
    return (x - c + L / 2) % L - L / 2


@dataclass(frozen=True)
class CellPartition:
    """Smooth tensor-product partition of unity on a periodic lattice of centers.

    ``factors[j]`` is the 1-D weight of center ``j`` along either axis; the
    cell weight of center ``(a1, a2)`` is ``factors[a1] x factors[a2]``.
    """

    grid: Grid
    centers: np.ndarray
    factors: np.ndarray = field(repr=False)
    half_width: float

    @property
    def n_cells(self) -> int:
        return len(self.centers)

    def weight(self, a1: int, a2: int) -> np.ndarray:
        return np.outer(self.factors[a1], self.factors[a2])

    def total(self) -> np.ndarray:
        s = self.factors.sum(axis=0)
        return np.outer(s, s)


def make_cells(grid: Grid, spacing: float = 1.0, half_width: float = 1.4) -> CellPartition:
    """Partition of unity with about ``L/spacing`` centers per axis.

    The center spacing is ``L / round(L / spacing)`` so the lattice closes up
    on the torus.  Each 1-D factor is supported in ``|x - c| < half_width``;
    with ``half_width < sqrt(2)`` the 2-D cells sit inside radius-2 balls.
    """
    L = grid.domain_length
    m = max(int(round(L / spacing)), 1)
    h = L / m
    if half_width <= h / 2 * 1.0001:
        raise ValueError("half_width too small to cover the torus")
    centers = np.arange(m) * h
    x = np.arange(grid.n_points) * grid.spacing
    raw = np.zeros((m, grid.n_points))
    for j, c in enumerate(centers):
        s = np.abs(_torus_offset(x, c, L)) / half_width
        inside = s < 1
        raw[j, inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    factors = raw / raw.sum(axis=0, keepdims=True)
    return CellPartition(grid, centers, factors, half_width)


@dataclass(frozen=True)
class WeightProfile:
    field: Field
    l1: float
    center: tuple[float, float]


def make_weight(grid: Grid) -> WeightProfile:
    """``beta(x) = (1 + |x - x_c|)^-3`` with the flat torus distance to the center."""
    L = grid.domain_length
    x1, x2 = grid.coords
    c = L / 2
    d = np.hypot(_torus_offset(x1, c, L), _torus_offset(x2, c, L))
    beta = Field(grid, (1.0 + d) ** -3)
    return WeightProfile(beta, lp_norm(beta, 1), (c, c))


def _cell_neighbours(m: int, radius: float) -> list[tuple[int, int]]:
    out = []
    for d1 in range(-(m // 2), m - m // 2):
        for d2 in range(-(m // 2), m - m // 2):
            if d1 * d1 + d2 * d2 <= radius * radius:
                out.append((d1, d2))
    return out


def n_mu_beta(f: Field, mu: float, beta: WeightProfile, cells: CellPartition,
              summed: bool = True) -> float:
    """Cell-refined log functional with weight ``beta`` and scale ``mu``.

    With ``summed=False`` the neighbour sum over ``|b - a| <= 3`` is replaced by
    the single cell ``a``.
    """
    if not mu > 0:
        raise ValueError("mu must be positive")
    v = np.abs(_phys(f))
    bv = np.abs(beta.field.values)
    m = cells.n_cells
    sup_cell = np.zeros((m, m))
    beta_cell = np.zeros((m, m))
    for a1 in range(m):
        for a2 in range(m):
            w = cells.weight(a1, a2)
            sup_cell[a1, a2] = (w * v).max()
            beta_cell[a1, a2] = cells.grid.cell_area * (w * bv).sum()
    if summed:
        num = np.zeros_like(sup_cell)
        for d1, d2 in _cell_neighbours(m, 3.0):
            num += np.roll(np.roll(sup_cell, -d1, axis=0), -d2, axis=1)
    else:
        num = sup_cell
    arg = float(np.max(num / (mu * beta_cell)))
    return float(mu * beta.l1 + lp_norm(f, 1) * log_plus(arg))


def _slice_sobolev_sq(hat: np.ndarray, grid: Grid, s: float) -> np.ndarray:
    w = (1.0 + grid.abs_xi ** 2) ** s
    return np.sum(w * np.abs(hat) ** 2, axis=(-2, -1))


def coefficient_norms(cd) -> tuple[float, float, float]:
    """``(||a||_1, ||b||_2, ||c||_3)`` of a coefficient decomposition.

    ``||a||_1 = ||a||_{L^2_t H^1}``,
    ``||b||_2 = (||b||_{L^2_t H^2}^2 + ||d_t b||_{L^2_t H^1}^2)^(1/2)``,
    ``||c||_3 = ||c||_{L^1_t B^1_{2,1}}``; trapezoid in time.
    """
    grid, t = cd.a.grid, cd.a.times
    for other in (cd.b, cd.c, cd.db):
        if other.grid != grid or not np.array_equal(other.times, t):
            raise ValueError("coefficient fields use mismatched grids")
    a_hat, b_hat, c_hat, db_hat = (x.spectral() for x in (cd.a, cd.b, cd.c, cd.db))
    na = math.sqrt(float(trapezoid(_slice_sobolev_sq(a_hat, grid, 1.0), t)))
    nb = math.sqrt(float(trapezoid(_slice_sobolev_sq(b_hat, grid, 2.0), t))
                   + float(trapezoid(_slice_sobolev_sq(db_hat, grid, 1.0), t)))
    besov = np.array([_besov_from_hat(h, grid) for h in c_hat])
    nc = float(trapezoid(besov, t))
    return na, nb, nc
