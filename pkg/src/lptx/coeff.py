"""Admissible coefficient data ``a = d_t b + c`` and forcing families.

Coefficients are finite sums of band atoms times trigonometric time profiles,
so the time derivative of ``b`` is evaluated analytically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .grid import Field, Grid, _fwd, _inv
from .lpcalc import band_symbol
from .norms import coefficient_norms, sobolev_norm
from .spacetime import SpaceTimeField, time_grid

__all__ = [
    "CoefficientDecomposition",
    "TimeProfile",
    "AtomSpec",
    "random_band_atom",
    "synthesize",
    "preset",
    "g_family",
    "unit_spike",
    "G_KINDS",
]

CONSISTENCY_TOL = 1e-10
NORM_SLACK = 1e-9


@dataclass(frozen=True)
class CoefficientDecomposition:
    """``a = d_t b + c`` sampled on a shared time grid; ``db`` holds ``d_t b``."""

    a: SpaceTimeField
    b: SpaceTimeField
    c: SpaceTimeField
    db: SpaceTimeField
    delta0: float

    def __post_init__(self):
        for f in (self.b, self.c, self.db):
            if f.grid != self.a.grid or not np.array_equal(f.times, self.a.times):
                raise ValueError("coefficient fields use mismatched grids")

    @property
    def grid(self) -> Grid:
        return self.a.grid

    @property
    def times(self) -> np.ndarray:
        return self.a.times

    def consistency_residual(self) -> float:
        """Max relative defect of ``a - d_t b - c`` over interior nodes."""
        r = self.a.values - self.db.values - self.c.values
        scale = np.abs(self.a.values).max()
        if scale == 0:
            return float(np.abs(r[1:-1]).max(initial=0.0))
        return float(np.abs(r[1:-1]).max(initial=0.0) / scale)

    def norms(self) -> tuple[float, float, float]:
        return coefficient_norms(self)

    def max_norm(self) -> float:
        return max(self.norms())

    def check(self) -> None:
        """Raise if the structural identity or the smallness bound fails."""
        res = self.consistency_residual()
        if res > CONSISTENCY_TOL:
            raise ValueError(f"a != d_t b + c (relative residual {res:.2e})")
        m = self.max_norm()
        if m > self.delta0 * (1 + NORM_SLACK):
            raise ValueError(f"coefficient norm {m:.6g} exceeds delta0 {self.delta0:.6g}")

    def scaled(self, factor: float) -> "CoefficientDecomposition":
        return CoefficientDecomposition(self.a * factor, self.b * factor, self.c * factor,
                                        self.db * factor, self.delta0 * abs(factor))

    def with_delta0(self, delta0: float) -> "CoefficientDecomposition":
        """Common rescale so the largest of the three norms equals ``delta0``."""
        m = self.max_norm()
        if m == 0:
            raise ValueError("cannot rescale a zero decomposition")
        out = self.scaled(delta0 / m)
        return CoefficientDecomposition(out.a, out.b, out.c, out.db, float(delta0))

    @classmethod
    def from_coefficient(cls, a: SpaceTimeField) -> "CoefficientDecomposition":
        """Trivial split ``b = 0``, ``c = a``; ``delta0`` is set to the measured max norm."""
        z = SpaceTimeField.zeros(a.grid, a.times)
        cd = cls(a, z, a, z, 0.0)
        return cls(a, z, a, z, cd.max_norm())

    @classmethod
    def zero(cls, grid: Grid, times: np.ndarray) -> "CoefficientDecomposition":
        z = SpaceTimeField.zeros(grid, times)
        return cls(z, z, z, z, 0.0)


_PROFILE_KINDS = ("sin", "cos", "const", "bump")


@dataclass(frozen=True)
class TimeProfile:
    """Trigonometric polynomial in ``t`` with an analytic derivative.

    ``sin``/``cos``: ``sin(2 pi freq t + phase)``;  ``const``: 1;
    ``bump``: ``cos(pi (t - center))^(2p)``, a periodic bump of width about
    ``width`` (``p = ceil(1 / (pi width)^2)``).
    """

    kind: str = "const"
    freq: int = 1
    phase: float = 0.0
    width: float = 0.25
    center: float = 0.5

    def __post_init__(self):
        if self.kind not in _PROFILE_KINDS:
            raise ValueError(f"profile kind must be one of {_PROFILE_KINDS}, got {self.kind!r}")
        if self.kind == "bump" and not self.width > 0:
            raise ValueError("bump width must be positive")

    @property
    def power(self) -> int:
        return max(1, math.ceil(1.0 / (math.pi * self.width) ** 2))

    def __call__(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        w = 2 * math.pi * self.freq
        if self.kind == "sin":
            return np.sin(w * t + self.phase)
        if self.kind == "cos":
            return np.cos(w * t + self.phase)
        if self.kind == "const":
            return np.ones_like(t)
        return np.cos(math.pi * (t - self.center)) ** (2 * self.power)

    def derivative(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        w = 2 * math.pi * self.freq
        if self.kind == "sin":
            return w * np.cos(w * t + self.phase)
        if self.kind == "cos":
            return -w * np.sin(w * t + self.phase)
        if self.kind == "const":
            return np.zeros_like(t)
        p = self.power
        s = math.pi * (t - self.center)
        return -2 * p * math.pi * np.cos(s) ** (2 * p - 1) * np.sin(s)

    @classmethod
    def from_dict(cls, d: dict) -> "TimeProfile":
        unknown = set(d) - {"kind", "freq", "phase", "width", "center"}
        if unknown:
            raise ValueError(f"unknown profile keys {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class AtomSpec:
    """One term ``amplitude * profile(t) * atom(x)`` of ``b`` or ``c``."""

    target: str
    band: int
    profile: TimeProfile = field(default_factory=TimeProfile)
    amplitude: float = 1.0
    atom: str = "packet"

    def __post_init__(self):
        if self.target not in ("b", "c"):
            raise ValueError(f"atom target must be 'b' or 'c', got {self.target!r}")
        if self.atom not in ("packet", "noise"):
            raise ValueError(f"atom kind must be 'packet' or 'noise', got {self.atom!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "AtomSpec":
        unknown = set(d) - {"field", "band", "profile", "amplitude", "atom"}
        if unknown:
            raise ValueError(f"unknown atom keys {sorted(unknown)}")
        if "field" not in d or "band" not in d:
            raise ValueError("atom entries need 'field' and 'band'")
        prof = d.get("profile", {})
        prof = TimeProfile.from_dict(prof) if isinstance(prof, dict) else TimeProfile(kind=str(prof))
        return cls(d["field"], int(d["band"]), prof, float(d.get("amplitude", 1.0)),
                   d.get("atom", "packet"))


def random_band_atom(grid: Grid, k: int, seed: int, target_h1: float, kind: str = "packet",
                     center: Optional[tuple[float, float]] = None) -> Field:
    """Real field spectrally supported in band ``k`` with ``H^1`` norm ``target_h1``.

    ``packet`` is ``P_k`` applied to a point mass at a random (or given)
    location, a near-extremal profile for sup-norm estimates; ``noise`` is
    ``P_k`` applied to white noise.
    """
    w = band_symbol(grid, k)
    if target_h1 < 0:
        raise ValueError("target_h1 must be non-negative")
    rng = np.random.default_rng(seed)
    if kind == "packet":
        if center is None:
            center = tuple(rng.uniform(0, grid.domain_length, size=2))
        k1, k2 = grid.xi
        hat = np.exp(-1j * (k1 * center[0] + k2 * center[1])) * w
    elif kind == "noise":
        hat = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)) * w
    else:
        raise ValueError(f"atom kind must be 'packet' or 'noise', got {kind!r}")
    if target_h1 == 0:
        return Field(grid, np.zeros(grid.shape))
    # real part, then re-mask so round-off cannot leave the band support
    h = _fwd(_inv(hat, grid).real, grid) * (w != 0)
    f = Field(grid, _inv(h, grid).real)
    return Field(grid, f.values * (target_h1 / sobolev_norm(f, 1.0)))


def _atom_seeds(seed: int, n: int) -> list[int]:
    ss = np.random.SeedSequence(seed).spawn(n)
    return [int(s.generate_state(1)[0]) for s in ss]


def synthesize(entries: Sequence[AtomSpec | dict], delta0: float, seed: int, grid: Grid,
               n_steps: int = 256, times: Optional[np.ndarray] = None) -> CoefficientDecomposition:
    """Assemble ``b``, ``c`` from atoms, set ``a = d_t b + c`` and rescale to ``delta0``."""
    if not delta0 > 0:
        raise ValueError("delta0 must be positive")
    entries = [e if isinstance(e, AtomSpec) else AtomSpec.from_dict(e) for e in entries]
    if not entries:
        raise ValueError("coefficient spec is empty")
    t = time_grid(n_steps) if times is None else np.asarray(times, dtype=float)
    shape = (t.size,) + grid.shape
    b = np.zeros(shape)
    db = np.zeros(shape)
    c = np.zeros(shape)
    for e, s in zip(entries, _atom_seeds(seed, len(entries))):
        phi = random_band_atom(grid, e.band, s, e.amplitude, e.atom).values.real
        p = e.profile(t)[:, None, None]
        if e.target == "b":
            b += p * phi
            db += e.profile.derivative(t)[:, None, None] * phi
        else:
            c += p * phi
    a = db + c
    cd = CoefficientDecomposition(*(SpaceTimeField(grid, t, x) for x in (a, b, c, db)), delta0=0.0)
    return cd.with_delta0(delta0)


def preset(name: str, grid: Grid) -> list[AtomSpec]:
    """Built-in coefficient specs.

    ``smooth``: a few low bands with ``sin``/``cos``/``const`` profiles.
    ``sharp``: one ``b`` atom per band ``1..k_max`` with a time bump of width
    ``2^-k`` (the regime where the ``2^(-k/2)`` gain of ``b`` is sharp), plus a
    small ``c`` part.
    """
    km = grid.k_max
    if name == "smooth":
        return [
            AtomSpec("b", 1, TimeProfile("sin", 1), 1.0),
            AtomSpec("b", min(2, km), TimeProfile("cos", 1, 0.3), 0.7),
            AtomSpec("b", min(3, km), TimeProfile("sin", 2, 1.1), 0.5),
            AtomSpec("c", 0, TimeProfile("const"), 0.5),
            AtomSpec("c", 1, TimeProfile("cos", 1), 0.8),
            AtomSpec("c", min(2, km), TimeProfile("sin", 1, 0.7), 0.4),
        ]
    if name == "sharp":
        out = [AtomSpec("b", k, TimeProfile("bump", width=2.0 ** -k, center=0.5), 1.0)
               for k in range(1, km + 1)]
        out.append(AtomSpec("c", 1, TimeProfile("const"), 0.3))
        return out
    raise ValueError(f"unknown preset {name!r}; expected 'smooth' or 'sharp'")


G_KINDS = ("spike-sweep", "band-limited", "constant")

# exponent split of the peak between space and time for the spike family
_SPACE_SHARE = 0.6


def _solve_width(mass_of_width, target: float) -> float:
    """Width ``w`` (log-bracketed) with ``mass_of_width(w) = target``."""
    f = lambda lw: math.log(mass_of_width(math.exp(lw))) - math.log(target)
    lo, hi = -12.0, 12.0
    if f(lo) > 0 or f(hi) < 0:
        raise ValueError("peak/mass combination is not representable on this grid")
    return math.exp(brentq(f, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=200))


def _von_mises(d: np.ndarray, w: float) -> np.ndarray:
    """Peak-1 periodic bump ``exp(-(1 - cos d) / w)``."""
    return np.exp(-(1.0 - np.cos(d)) / w)


def g_family(kind: str, lam: float, seed: int, grid: Grid, n_steps: int = 256,
             times: Optional[np.ndarray] = None) -> SpaceTimeField:
    """Forcing families with unit space-time ``L^1`` mass.

    ``spike-sweep``: ``g = S(x) T(t)`` with spatial peak ``lam^0.6``, temporal
    peak ``lam^0.4``, each factor of unit mass under the discrete quadrature,
    so ``max g = lam`` and ``||g||_{L^1} = 1``; centered at a random grid point
    and at the middle time node.  At ``lam = 1`` the time factor is flat.
    ``band-limited``: time-independent positive field with spectrum in
    ``|xi| <= sqrt(2)``.
    ``constant``: ``g = 1 / area``.
    """
    t = time_grid(n_steps) if times is None else np.asarray(times, dtype=float)
    if kind not in G_KINDS:
        raise ValueError(f"g kind must be one of {G_KINDS}, got {kind!r}")
    rng = np.random.default_rng(seed)
    L, dA = grid.domain_length, grid.cell_area
    if kind == "constant":
        return SpaceTimeField(grid, t, np.full((t.size,) + grid.shape, 1.0 / grid.area))
    if kind == "band-limited":
        c1, c2 = rng.uniform(0, L, size=2)
        x1, x2 = grid.coords
        phi = (1.0 + 0.5 * np.cos(2 * math.pi / L * (x1 - c1)) * np.cos(2 * math.pi / L * (x2 - c2)))
        phi = phi / (dA * phi.sum())
        return SpaceTimeField(grid, t, np.broadcast_to(phi, (t.size,) + grid.shape))
    if not lam >= 1:
        raise ValueError(f"spike-sweep needs lambda >= 1, got {lam!r}")
    i1, i2 = rng.integers(0, grid.n_points, size=2)
    q = lam ** _SPACE_SHARE
    p = lam / q
    spatial = unit_spike(grid, q, (int(i1), int(i2))).values.real
    j0 = (t.size - 1) // 2
    dt_ = 2 * math.pi * (t - t[j0])
    temporal = _peaked(p, lambda w: _trap_mass(_von_mises(dt_, w), t),
                       lambda w: _von_mises(dt_, w), 1.0)
    return SpaceTimeField(grid, t, temporal[:, None, None] * spatial[None])


def unit_spike(grid: Grid, peak: float, index: tuple[int, int]) -> Field:
    """Positive periodic bump at grid point ``index`` with max ``peak`` and unit mass.

    ``peak`` must lie between ``1 / area`` and ``1 / cell_area``.
    """
    L, dA = grid.domain_length, grid.cell_area
    x1, x2 = grid.coords
    d1 = 2 * math.pi / L * (x1 - x1[index])
    d2 = 2 * math.pi / L * (x2 - x2[index])
    v = _peaked(peak, lambda w: dA * float((_von_mises(d1, w) * _von_mises(d2, w)).sum()),
                lambda w: _von_mises(d1, w) * _von_mises(d2, w), grid.area)
    return Field(grid, v)


def _trap_mass(v: np.ndarray, t: np.ndarray) -> float:
    return float(np.sum(0.5 * np.diff(t) * (v[1:] + v[:-1])))


def _peaked(peak: float, mass_of_width, shape_of_width, full_mass: float) -> np.ndarray:
    """Peak-``peak`` unit-mass profile from a one-parameter family of peak-1 bumps.

    A peak equal to ``1 / full_mass`` gives the flat profile; smaller peaks
    cannot carry unit mass and are rejected.
    """
    target = 1.0 / peak
    if target >= full_mass:
        if abs(target - full_mass) <= 1e-15 * full_mass:
            return np.full(np.shape(shape_of_width(1.0)), peak)
        raise ValueError("peak too small for unit mass on this domain")
    w = _solve_width(mass_of_width, target)
    return peak * shape_of_width(w)
