"""Solvers for ``d_t u = a (M u) + g``, ``u(0) = 0``.

The reference integrator is classical RK4 on a refined time grid with the
data interpolated by cubic Lagrange polynomials.  Picard iterates and Dyson
terms use cumulative trapezoid sums on the data grid, so that
``u^(n+1) = sum_{j <= n} J_j`` holds to round-off.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
import scipy.fft as sfft

from .coeff import CoefficientDecomposition
from .czop import Multiplier
from .fielddump import save_field
from .lpcalc import _check_band, band_symbol
from .spacetime import SpaceTimeField, cumulative_trapezoid

__all__ = [
    "SolveResult",
    "SolverBlowUp",
    "BLOWUP_THRESHOLD",
    "reference_solve",
    "picard_iterates",
    "dyson_term",
    "dyson_series",
    "dyson_term_localized",
    "simplex_integral",
]

BLOWUP_THRESHOLD = 1e12


class SolverBlowUp(ArithmeticError):
    def __init__(self, time: float):
        super().__init__(f"solution exceeded {BLOWUP_THRESHOLD:g} at t = {time:.6g}")
        self.time = time


@dataclass(frozen=True)
class SolveResult:
    u: SpaceTimeField
    method: str
    steps: int
    sup_l1: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "sup_l1", self.u.sup_l1())

    def summary(self) -> dict:
        l1 = self.u.l1_per_time()
        return {
            "method": self.method,
            "steps": int(self.steps),
            "grid": int(self.u.grid.n_points),
            "domain_length": float(self.u.grid.domain_length),
            "n_times": int(self.u.times.size),
            "sup_l1": float(self.sup_l1),
            "l1_final": float(l1[-1]),
            "linf_final": float(np.abs(self.u.values[-1]).max()),
        }

    def save(self, directory: Union[str, os.PathLike], stem: str = "solution") -> tuple[str, str]:
        """Write ``u(1)`` as a field dump plus a JSON sidecar; returns both paths."""
        os.makedirs(directory, exist_ok=True)
        dump = os.path.join(directory, f"{stem}.lptxf")
        side = os.path.join(directory, f"{stem}.json")
        save_field(dump, self.u.slice(-1))
        with open(side, "w") as fh:
            json.dump({**self.summary(), "field_dump": os.path.basename(dump),
                       "l1_per_time": [float(x) for x in self.u.l1_per_time()]}, fh, indent=2)
        return dump, side


def _check_inputs(cd: CoefficientDecomposition, M: Multiplier, g: SpaceTimeField):
    if cd.grid != g.grid or M.grid != g.grid:
        raise ValueError("coefficient, operator and forcing live on different grids")
    if not np.array_equal(cd.times, g.times):
        raise ValueError("coefficient and forcing use different time grids")


def _apply_batched(M: Multiplier, v: np.ndarray) -> np.ndarray:
    axes = (-2, -1)
    return sfft.ifft2(sfft.fft2(v, axes=axes) * M.symbol, axes=axes)


def _lagrange_weights(times: np.ndarray, t: float) -> tuple[int, np.ndarray]:
    """Start index and weights of the (up to) 4-point Lagrange stencil at ``t``."""
    N = times.size - 1
    m = min(4, N + 1)
    dt = times[1] - times[0]
    j = min(int((t - times[0]) / dt), N - 1)
    start = min(max(j - 1, 0), N + 1 - m)
    nodes = times[start:start + m]
    w = np.ones(m)
    for i in range(m):
        for q in range(m):
            if q != i:
                w[i] *= (t - nodes[q]) / (nodes[i] - nodes[q])
    return start, w


def _interp(values: np.ndarray, times: np.ndarray, t: float) -> np.ndarray:
    start, w = _lagrange_weights(times, t)
    return np.tensordot(w, values[start:start + w.size], axes=(0, 0))


def reference_solve(cd: CoefficientDecomposition, M: Multiplier, g: SpaceTimeField,
                    substeps: int = 1) -> SolveResult:
    """Classical RK4 with ``substeps`` steps per data interval, sampled on the data grid."""
    _check_inputs(cd, M, g)
    if int(substeps) != substeps or substeps < 1:
        raise ValueError("substeps must be a positive integer")
    substeps = int(substeps)
    times = g.times
    a, gv = cd.a.values, g.values
    h = g.dt / substeps
    u = np.zeros(g.grid.shape, dtype=complex)
    out = np.zeros_like(gv)

    def rhs(t, v):
        return _interp(a, times, t) * _apply_batched(M, v) + _interp(gv, times, t)

    for i in range(g.n_steps):
        t0 = times[i]
        for s in range(substeps):
            t = t0 + s * h
            k1 = rhs(t, u)
            k2 = rhs(t + h / 2, u + h / 2 * k1)
            k3 = rhs(t + h / 2, u + h / 2 * k2)
            k4 = rhs(t + h, u + h * k3)
            u = u + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(u)) or np.abs(u).max() > BLOWUP_THRESHOLD:
            raise SolverBlowUp(float(times[i + 1]))
        out[i + 1] = u
    return SolveResult(SpaceTimeField(g.grid, times, out), "rk4", g.n_steps * substeps)


def _duhamel(a: np.ndarray, M: Multiplier, v: np.ndarray, times: np.ndarray) -> np.ndarray:
    """``int_0^t a(s) (M v)(s) ds`` by cumulative trapezoid."""
    w = a * _apply_batched(M, v)
    if not np.all(np.isfinite(w)) or np.abs(w).max() > BLOWUP_THRESHOLD:
        raise SolverBlowUp(float(times[-1]))
    return cumulative_trapezoid(w, times)


def picard_iterates(cd: CoefficientDecomposition, M: Multiplier, g: SpaceTimeField,
                    n_max: int) -> list[SolveResult]:
    """``u^(1), ..., u^(n_max)`` with ``u^(n+1) = int_0^t (a M u^(n) + g)``."""
    _check_inputs(cd, M, g)
    if int(n_max) != n_max or n_max < 1:
        raise ValueError("n_max must be a positive integer")
    G = cumulative_trapezoid(g.values, g.times)
    u = G
    out = [SolveResult(SpaceTimeField(g.grid, g.times, u), "picard", 1)]
    for n in range(2, int(n_max) + 1):
        u = G + _duhamel(cd.a.values, M, u, g.times)
        out.append(SolveResult(SpaceTimeField(g.grid, g.times, u), "picard", n))
    return out


def dyson_series(cd: CoefficientDecomposition, M: Multiplier, g: SpaceTimeField,
                 n_max: int) -> list[SpaceTimeField]:
    """``[J_0, ..., J_{n_max}]`` by the nested antiderivative recursion."""
    _check_inputs(cd, M, g)
    if int(n_max) != n_max or n_max < 0:
        raise ValueError("n must be a non-negative integer")
    v = cumulative_trapezoid(g.values, g.times)
    out = [SpaceTimeField(g.grid, g.times, v)]
    for _ in range(int(n_max)):
        v = _duhamel(cd.a.values, M, v, g.times)
        out.append(SpaceTimeField(g.grid, g.times, v))
    return out


def dyson_term(cd: CoefficientDecomposition, M: Multiplier, g: SpaceTimeField, n: int) -> SpaceTimeField:
    return dyson_series(cd, M, g, n)[-1]


def dyson_term_localized(cd: CoefficientDecomposition, M: Multiplier, g: SpaceTimeField,
                         bands: Sequence[int]) -> SpaceTimeField:
    """``J_{n,k}``: the factor at time ``t_i`` is ``P_{k_i} a(t_i)``.

    ``t_1 >= t_2 >= ... >= t_n``, so ``k_1`` is the outermost (latest) factor.
    """
    _check_inputs(cd, M, g)
    bands = [int(k) for k in bands]
    if not bands:
        raise ValueError("need at least one band index")
    for k in bands:
        _check_band(g.grid, k)
    a_hat = sfft.fft2(cd.a.values, axes=(-2, -1))
    v = cumulative_trapezoid(g.values, g.times)
    for k in reversed(bands):
        a_k = sfft.ifft2(a_hat * band_symbol(g.grid, k), axes=(-2, -1))
        v = _duhamel(a_k, M, v, g.times)
    return SpaceTimeField(g.grid, g.times, v)


Profile = Union[Callable[[np.ndarray], np.ndarray], np.ndarray]


def simplex_integral(profiles: Sequence[Profile], nodes: Union[int, np.ndarray] = 512) -> float:
    """``int f_1(t_1) ... f_n(t_n)`` over ``1 >= t_1 >= ... >= t_n >= 0``.

    Nested cumulative trapezoid: ``F_n = int_0^s f_n`` and
    ``F_m(s) = int_0^s f_m F_{m+1}``; returns ``F_1(1)``.  ``nodes`` is a node
    count on ``[0, 1]`` or the node array itself; array profiles must be
    sampled on those nodes.
    """
    if len(profiles) < 1:
        raise ValueError("need at least one profile")
    t = np.linspace(0.0, 1.0, int(nodes)) if np.ndim(nodes) == 0 else np.asarray(nodes, dtype=float)
    vals = [np.asarray(p(t) if callable(p) else p, dtype=float) for p in profiles]
    for v in vals:
        if v.shape != t.shape:
            raise ValueError("profile samples do not match the quadrature nodes")
    F = np.ones_like(t)
    for v in reversed(vals):
        F = cumulative_trapezoid(v * F, t)
    return float(F[-1])
