"""Time-indexed fields on a uniform grid over [0, 1] and time quadrature."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .grid import Field, Grid

__all__ = ["SpaceTimeField", "time_grid", "trapezoid", "cumulative_trapezoid"]


def time_grid(n_steps: int) -> np.ndarray:
    """Nodes ``t_0 = 0 < ... < t_N = 1``."""
    if int(n_steps) != n_steps or n_steps < 1:
        raise ValueError(f"n_steps must be a positive integer, got {n_steps!r}")
    return np.linspace(0.0, 1.0, int(n_steps) + 1)


def trapezoid(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Trapezoid integral over the leading axis."""
    dt = np.diff(times)
    v = np.asarray(values)
    mid = 0.5 * (v[1:] + v[:-1])
    return np.tensordot(dt, mid, axes=(0, 0))


def cumulative_trapezoid(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Running trapezoid integral along the leading axis, starting at 0."""
    v = np.asarray(values)
    dt = np.diff(times).reshape((-1,) + (1,) * (v.ndim - 1))
    out = np.zeros_like(v)
    np.cumsum(0.5 * dt * (v[1:] + v[:-1]), axis=0, out=out[1:])
    return out


@dataclass(frozen=True)
class SpaceTimeField:
    grid: Grid
    times: np.ndarray
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if t.ndim != 1 or t.size < 2:
            raise ValueError("need at least two time nodes")
        dt = np.diff(t)
        if not np.allclose(dt, dt[0], rtol=1e-12, atol=0):
            raise ValueError("time grid must be uniform")
        if v.shape != (t.size,) + self.grid.shape:
            raise ValueError(f"values shape {v.shape} inconsistent with {t.size} nodes on {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("space-time samples must be finite")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, grid: Grid, times: np.ndarray) -> "SpaceTimeField":
        return cls(grid, times, np.zeros((len(times),) + grid.shape, dtype=complex))

    @classmethod
    def from_slices(cls, times: np.ndarray, slices: list[Field]) -> "SpaceTimeField":
        grid = slices[0].grid
        if any(s.grid != grid for s in slices):
            raise ValueError("slices must share one grid")
        return cls(grid, times, np.stack([s.to_physical().values for s in slices]))

    @classmethod
    def separable(cls, grid: Grid, times: np.ndarray, profile: np.ndarray, f: Field) -> "SpaceTimeField":
        """``profile(t) * f(x)``."""
        p = np.asarray(profile, dtype=complex).reshape(-1, 1, 1)
        return cls(grid, times, p * f.to_physical().values[None])

    @property
    def n_steps(self) -> int:
        return self.times.size - 1

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def __len__(self) -> int:
        return self.times.size

    def slice(self, i: int) -> Field:
        return Field(self.grid, self.values[i])

    def spectral(self) -> np.ndarray:
        """Batched forward transform of every slice."""
        return sfft.fft2(self.values, axes=(-2, -1), norm="ortho") * self.grid.spacing

    def _check(self, other: "SpaceTimeField"):
        if other.grid != self.grid or other.times.shape != self.times.shape or \
                not np.array_equal(other.times, self.times):
            raise ValueError("space-time fields live on different grids")

    def __add__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        self._check(other)
        return SpaceTimeField(self.grid, self.times, self.values + other.values)

    def __sub__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        self._check(other)
        return SpaceTimeField(self.grid, self.times, self.values - other.values)

    def __mul__(self, scalar: complex) -> "SpaceTimeField":
        return SpaceTimeField(self.grid, self.times, self.values * scalar)

    __rmul__ = __mul__

    def l1_per_time(self) -> np.ndarray:
        return self.grid.cell_area * np.abs(self.values).sum(axis=(1, 2))

    def sup_l1(self) -> float:
        return float(self.l1_per_time().max())
