"""Numerical checks of the dyadic, commutator, multilinear and log-loss estimates.

Every check returns an :class:`EstimateReport` whose verdict thresholds are
module constants listed next to the check.  Banks are seeded through
``numpy.random.SeedSequence`` so each case is reproducible on its own and the
rows do not depend on the thread count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from ..coeff import (CoefficientDecomposition, g_family, random_band_atom,
                     unit_spike)
from ..czop import Multiplier, commutator_apply, localize, power
from ..grid import Field, Grid, _inv, multiply
from ..lpcalc import _band_symbol, _check_band, project_band, resolved_noise
from ..norms import (lp_norm, make_cells, make_weight, n_mu_beta, n_of_g, sobolev_norm)
from ..solver import dyson_series, reference_solve
from ..spacetime import SpaceTimeField, trapezoid
from .report import EstimateReport, linear_fit

__all__ = [
    "MultiIndex",
    "alpha_exponent",
    "mu_weight",
    "band_support",
    "tri_vanishes",
    "check_logL1",
    "check_commutator",
    "check_trifrequency",
    "check_multilinear",
    "check_interpolation",
    "check_simplex_combinatorics",
    "probe_log_loss",
    "sweep_delta0",
    "default_triples",
]

# declared verdict thresholds
C_LOG = 1.0
COMMUTATOR_SLOPE_MAX = 0.15
COMMUTATOR_RATE_MAX = 20.0
TRI_VANISH_TOL = 1e-12
TRI_SLOPE_MAX = -0.8
MULTI_R2_MIN = 0.8
MULTI_SPREAD_MAX = 10.0
INTERP_SPREAD_MAX = 3.0
SIMPLEX_C = 1.0
SIMPLEX_QUAD_TOL = 0.02
LOGLOSS_R2_MIN = 0.9
LOGLOSS_RATIO_SPREAD_MAX = 3.0


def _seeds(seed: int, n: int) -> list[int]:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n)]


def _pmap(fn: Callable, items: Sequence, threads: int = 1) -> list:
    """Ordered map; rows never depend on the worker count."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _point_mass(grid: Grid, index: tuple[int, int]) -> Field:
    v = np.zeros(grid.shape)
    v[index] = 1.0 / grid.cell_area
    return Field(grid, v)


def _spread(values: np.ndarray) -> float:
    values = np.asarray(values, dtype=float)
    med = float(np.median(values))
    return float(values.max() / med) if med > 0 else math.inf


# ---------------------------------------------------------------- multi-indices

@dataclass(frozen=True)
class MultiIndex:
    entries: tuple[int, ...]

    def __post_init__(self):
        e = tuple(int(x) for x in self.entries)
        if len(e) < 1:
            raise ValueError("a multi-index needs at least one entry")
        if any(x < 0 for x in e):
            raise ValueError("band indices are non-negative")
        object.__setattr__(self, "entries", e)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def check(self, grid: Grid) -> "MultiIndex":
        for k in self.entries:
            _check_band(grid, k)
        return self


def alpha_exponent(l: Sequence[int], k: Sequence[int]) -> float:
    """``1/2 sum_{m=2}^n min(|l_m - l_{m-1}|, |l_m - k_m|)``; a multiple of 1/2, exact in floats."""
    l, k = tuple(l), tuple(k)
    if len(l) != len(k):
        raise ValueError("multi-indices have different lengths")
    if len(l) < 2:
        raise ValueError("need n >= 2")
    s = sum(min(abs(l[m] - l[m - 1]), abs(l[m] - k[m])) for m in range(1, len(l)))
    return s / 2


def mu_weight(l: Sequence[int], k: Sequence[int], atom_h1_norms: Sequence[float]) -> float:
    """``A_k 2^(-alpha(l))`` with ``A_k`` the product of the atom ``H^1`` norms."""
    return float(np.prod(atom_h1_norms)) * 2.0 ** (-alpha_exponent(l, k))


# ---------------------------------------------------------------- log-L1

def check_logL1(M: Multiplier, bank_size: int = 50, mu: float = 1.0, seed: int = 0,
                threads: int = 1) -> EstimateReport:
    """``||M f||_1 / N_{mu,beta}(f)`` over spikes and noise with peaks ``2^0..2^10``."""
    grid = M.grid
    cells = make_cells(grid)
    beta = make_weight(grid)
    peak_cap = 0.5 / grid.cell_area
    seeds = _seeds(seed, bank_size)

    def case(i):
        rng = np.random.default_rng(seeds[i])
        amp = 2.0 ** (10.0 * i / max(bank_size - 1, 1))
        if i % 2 == 0:
            family = "spike"
            f = unit_spike(grid, min(amp, peak_cap), tuple(int(x) for x in rng.integers(0, grid.n_points, 2)))
        else:
            family = "noise"
            f = resolved_noise(grid, rng)
            f = Field(grid, f.values * (amp / np.abs(f.values).max()))
        lhs = lp_norm(M(f), 1)
        l1 = lp_norm(f, 1)
        return (i, family, amp), lhs, n_mu_beta(f, mu, beta, cells), \
            n_mu_beta(f, mu, beta, cells, summed=False), l1

    rep = EstimateReport("logL1", ["case", "family", "amplitude"])
    out = _pmap(case, range(bank_size), threads)
    unsummed, l1_ratio, amps_spike = [], [], []
    for params, lhs, rhs, rhs0, l1 in out:
        rep.add_row(params, lhs, rhs)
        unsummed.append(lhs / rhs0)
        if params[1] == "spike":
            l1_ratio.append(lhs / l1)
            amps_spike.append(params[2])
    ratio = rep.column("ratio")
    c_log = float(ratio.max())
    c_log0 = float(max(unsummed))
    slope_l1, _, _ = linear_fit(np.log2(amps_spike), np.log2(l1_ratio))
    spike_ratio = ratio[rep.column("family") == "spike"]
    rep.fits.update({
        "C_log": c_log,
        "C_log_unsummed": c_log0,
        "summation_sensitivity": abs(c_log0 - c_log) / c_log,
        "spike_l1_ratio_slope_log2": slope_l1,
        "spike_l1_ratio_range": [float(min(l1_ratio)), float(max(l1_ratio))],
        "spike_log_ratio_range": [float(spike_ratio.min()), float(spike_ratio.max())],
        "mu": mu,
        "beta_l1": beta.l1,
    })
    rep.add_verdict("max ratio <= C_log", c_log, "<=", C_LOG)
    rep.add_verdict("plain L1 ratio grows on spikes (log2 slope)", slope_l1, ">", 0.0)
    rep.provenance.update(seed=seed, grid=grid.n_points, bank_size=bank_size, operator=M.name,
                          cells=cells.n_cells)
    return rep


# ---------------------------------------------------------------- commutator

def check_commutator(M: Multiplier, n_range: Sequence[int] = (1, 2, 3),
                     k_range: Optional[Sequence[int]] = None, bank_size: int = 50, seed: int = 0,
                     threads: int = 1) -> EstimateReport:
    """``||[(M^n)_{>=k}, a_k] f||_1 / (||a_k||_inf ||f||_1)``.

    ``f`` is a unit point mass and ``a_k`` a band-``k`` packet centered at a
    random offset of at most ``2^(1-k)`` from it, so the sampled geometry is
    the same in the rescaled variable ``2^k x`` for every ``k``.
    """
    grid = M.grid
    ks = list(range(1, grid.k_max + 1)) if k_range is None else [int(k) for k in k_range]
    for k in ks:
        _check_band(grid, k)
    ns = [int(n) for n in n_range]
    seeds = _seeds(seed, len(ks) * bank_size)
    pairs = {}
    for j, k in enumerate(ks):
        for i in range(bank_size):
            rng = np.random.default_rng(seeds[j * bank_size + i])
            c = tuple(int(x) for x in rng.integers(0, grid.n_points, 2))
            rho, th = rng.uniform(0, 2.0), rng.uniform(0, 2 * math.pi)
            r = rho * 2.0 ** -k
            center = (c[0] * grid.spacing + r * math.cos(th), c[1] * grid.spacing + r * math.sin(th))
            pairs[k, i] = (c, center, int(rng.integers(2 ** 31)))
    ops = {(n, k): localize(power(M, n), "at_or_above", k) for n in ns for k in ks}

    def case(key):
        n, k, i = key
        c, center, s = pairs[k, i]
        a = random_band_atom(grid, k, s, 1.0, "packet", center=center)
        f = _point_mass(grid, c)
        com = commutator_apply(ops[n, k], a, f, k)
        return (n, k, i), lp_norm(com, 1), lp_norm(a, math.inf) * lp_norm(f, 1)

    rep = EstimateReport("commutator", ["n", "k", "pair"])
    for params, lhs, rhs in _pmap(case, [(n, k, i) for n in ns for k in ks for i in range(bank_size)], threads):
        rep.add_row(params, lhs, rhs)
    ratio, ncol, kcol = rep.column("ratio"), rep.column("n"), rep.column("k")
    slopes, maxima = {}, {}
    for n in ns:
        per_k = [float(ratio[(ncol == n) & (kcol == k)].max()) for k in ks]
        maxima[n] = per_k
        slopes[n] = linear_fit(ks, np.log2(np.maximum(per_k, 1e-300)))[0] if len(ks) > 1 else 0.0
    R = [max(maxima[n]) for n in ns]
    rates = [R[i + 1] / R[i] for i in range(len(R) - 1) if R[i] > 0]
    rate = max(rates) if rates else 0.0
    rep.fits.update({"slope_log2_vs_k": slopes, "max_ratio_per_k": maxima,
                     "max_ratio_per_n": dict(zip(ns, R)), "rate_vs_n": rate})
    rep.add_verdict("max slope of log2 ratio vs k", max(slopes.values()), "<=", COMMUTATOR_SLOPE_MAX)
    if rates:
        rep.add_verdict("geometric rate in n", rate, "<=", COMMUTATOR_RATE_MAX)
    rep.provenance.update(seed=seed, grid=grid.n_points, bank_size=bank_size, operator=M.name)
    return rep


# ---------------------------------------------------------------- tri-frequency

def band_support(k: int) -> tuple[float, float]:
    """Open radial interval outside of which the band-``k`` symbol vanishes."""
    return (0.0, 2.0) if k == 0 else (2.0 ** (k - 1), 2.0 ** (k + 1))


def tri_vanishes(l_prev: int, k: int, l: int) -> bool:
    """True when ``P_{l_prev}(a_k P_l h)`` is zero for every band-``k`` ``a_k`` and every ``h``.

    The product spectrum lies in the Minkowski sum of two annuli, the closed
    annulus ``max(0, r1 - R2, r2 - R1) <= |xi| <= R1 + R2``; the check is
    disjointness from the open support of band ``l_prev``.
    """
    r1, R1 = band_support(k)
    r2, R2 = band_support(l)
    lo, hi = max(0.0, r1 - R2, r2 - R1), R1 + R2
    p_lo, p_hi = band_support(l_prev)
    return hi <= p_lo or lo >= p_hi


def default_triples(grid: Grid) -> list[tuple[int, int, int]]:
    K = grid.k_max
    if K < 4:
        raise ValueError("tri-frequency defaults need k_max >= 4")
    sweep = [(K, K, l) for l in range(K, max(K - 6, -1), -1)]
    below = [(K - 1, K, K), (K - 1, K, K - 3), (0, K - 1, 0), (1, K, 2)]
    above = [(K, K - 3, K), (K, K - 3, K - 1), (K, 1, K - 3), (K - 3, K - 3, K)]
    return sweep + below + above


def _tri_case(l_prev: int, k: int, l: int) -> str:
    return "below" if l_prev < k else ("above" if l_prev > k else "equal")


def check_trifrequency(M: Multiplier, triples: Optional[Iterable[tuple[int, int, int]]] = None,
                       bank_size: int = 50, seed: int = 0, threads: int = 1) -> EstimateReport:
    """``||M_{l'} a_k P_l h||_1 / (||a_k||_{H^1} ||h||_1)`` with ``M_{l'} = P_{l'} M``.

    Half the bank pairs a packet atom with a point mass at its center, the
    other half a spread (noise) atom with a random point mass.  Products are
    dealiased.
    """
    grid = M.grid
    triples = default_triples(grid) if triples is None else [tuple(int(x) for x in t) for t in triples]
    for t in triples:
        for b in t:
            _check_band(grid, b)
    seeds = _seeds(seed, bank_size)
    outer = {lp: localize(M, "band", lp) for lp in {t[0] for t in triples}}

    def case(key):
        (lp, k, l), i = key
        rng = np.random.default_rng(seeds[i])
        c = tuple(int(x) for x in rng.integers(0, grid.n_points, 2))
        s = int(rng.integers(2 ** 31))
        if i % 2 == 0:
            a = random_band_atom(grid, k, s, 1.0, "packet", center=(c[0] * grid.spacing, c[1] * grid.spacing))
            kind = "packet"
        else:
            a = random_band_atom(grid, k, s, 1.0, "noise")
            kind = "noise"
        h = _point_mass(grid, c)
        prod = multiply(a, project_band(h, l), dealias=True)
        lhs = lp_norm(outer[lp](prod), 1)
        scale = lp_norm(a, math.inf) * lp_norm(h, 1)
        return (lp, k, l, _tri_case(lp, k, l), kind, i), lhs, sobolev_norm(a, 1) * lp_norm(h, 1), scale

    rep = EstimateReport("trifrequency", ["l_prev", "k", "l", "case", "atom", "sample"])
    vanish_worst = 0.0
    best = {}
    for params, lhs, rhs, scale in _pmap(case, [(t, i) for t in triples for i in range(bank_size)], threads):
        rep.add_row(params, lhs, rhs)
        t = params[:3]
        if tri_vanishes(*t):
            vanish_worst = max(vanish_worst, lhs / scale)
        else:
            best[t] = max(best.get(t, 0.0), lhs / rhs)
    seps = {t: min(abs(t[2] - t[0]), abs(t[2] - t[1])) for t in best}
    fit_t = [t for t in best if seps[t] <= 5 and best[t] > 0]
    slope, intercept, r2 = linear_fit([seps[t] for t in fit_t], [math.log2(best[t]) for t in fit_t])
    rep.fits.update({
        "decay_slope": slope, "decay_intercept": intercept, "decay_r2": r2,
        "max_ratio": {" ".join(map(str, t)): best[t] for t in sorted(best)},
        "separation": {" ".join(map(str, t)): seps[t] for t in sorted(best)},
        "vanishing_triples": [" ".join(map(str, t)) for t in triples if tri_vanishes(*t)],
        "vanishing_max_relative": vanish_worst,
    })
    rep.add_verdict("vanishing cases relative size", vanish_worst, "<=", TRI_VANISH_TOL)
    rep.add_verdict("decay slope of log2 ratio vs separation", slope, "<=", TRI_SLOPE_MAX)
    rep.provenance.update(seed=seed, grid=grid.n_points, bank_size=bank_size, operator=M.name)
    return rep


# ---------------------------------------------------------------- multilinear

def check_multilinear(M: Multiplier, n_range: Sequence[int] = (1, 2, 3, 4), bank_size: int = 50,
                      seed: int = 0, threads: int = 1) -> EstimateReport:
    """``||M a_{k_1} M ... a_{k_n} M f||_1 / (A_k N(f))`` over random ``k`` tuples.

    ``f`` is a unit-mass spike with peak between ``2^4`` and the grid limit;
    the atoms are packets centered on the spike.
    """
    grid = M.grid
    ns = [int(n) for n in n_range]
    if min(ns) < 1:
        raise ValueError("n must be positive")
    seeds = _seeds(seed, len(ns) * bank_size)
    peak_cap = 0.5 / grid.cell_area

    def case(key):
        j, i = key
        n = ns[j]
        rng = np.random.default_rng(seeds[j * bank_size + i])
        ks = tuple(int(k) for k in rng.integers(1, grid.k_max + 1, n))
        c = tuple(int(x) for x in rng.integers(0, grid.n_points, 2))
        peak = min(2.0 ** rng.uniform(4, 10), peak_cap)
        f = unit_spike(grid, peak, c)
        center = (c[0] * grid.spacing, c[1] * grid.spacing)
        w = M(f)
        A = 1.0
        for k in reversed(ks):
            a = random_band_atom(grid, k, int(rng.integers(2 ** 31)), 1.0, "packet", center=center)
            A *= sobolev_norm(a, 1)
            w = M(Field(grid, a.values * w.values))
        return (n, i, ks), lp_norm(w, 1), A * n_of_g(f)

    rep = EstimateReport("multilinear", ["n", "sample", "bands"])
    keys = [(j, i) for j in range(len(ns)) for i in range(bank_size)]
    for params, lhs, rhs in _pmap(case, keys, threads):
        rep.add_row(params, lhs, rhs)
    ratio, ncol = rep.column("ratio"), rep.column("n")
    R = np.array([ratio[ncol == n].max() for n in ns])
    spreads = {n: _spread(ratio[ncol == n]) for n in ns}
    lr = np.log(R)
    if len(ns) >= 2:
        slope, icpt, r2 = linear_fit(ns, lr)
        logfact = np.array([math.lgamma(n + 1) for n in ns])
        fslope, _, fr2 = linear_fit(ns, lr - logfact)
    else:
        # one order gives no growth rate; report R itself as the constant
        slope, icpt, r2 = float(lr[0]) / ns[0], 0.0, math.nan
        fslope, fr2 = math.nan, math.nan
    rep.fits.update({"B": math.exp(slope), "log_prefactor": icpt, "r2_exponential": r2,
                     "factorial_model_B": math.exp(fslope), "factorial_model_r2": fr2,
                     "max_ratio_per_n": dict(zip(ns, R.tolist())), "max_over_median_per_n": spreads})
    if len(ns) >= 3:
        rep.add_verdict("R^2 of exponential model", r2, ">=", MULTI_R2_MIN)
    rep.add_verdict("fitted B finite", math.exp(slope), "<", math.inf)
    rep.add_verdict("max/median over k sample", max(spreads.values()), "<=", MULTI_SPREAD_MAX)
    rep.provenance.update(seed=seed, grid=grid.n_points, bank_size=bank_size, operator=M.name)
    return rep


# ---------------------------------------------------------------- interpolation

def _sobolev_sq(hat: np.ndarray, grid: Grid, s: float) -> np.ndarray:
    return np.sum((1.0 + grid.abs_xi ** 2) ** s * np.abs(hat) ** 2, axis=(-2, -1))


def check_interpolation(cd: CoefficientDecomposition, bands: Optional[Sequence[int]] = None,
                        rel_floor: float = 1e-12) -> EstimateReport:
    """``sup_t ||b_k||_X 2^(k/2) / ||b_k||_2`` for ``X = L^inf`` and ``X = H^1``."""
    grid, t = cd.grid, cd.times
    b_hat, db_hat = cd.b.spectral(), cd.db.spectral()
    if not np.any(b_hat):
        raise ValueError("b is identically zero")
    ks = list(range(1, grid.k_max + 1)) if bands is None else [int(k) for k in bands]
    total = math.sqrt(float(trapezoid(_sobolev_sq(b_hat, grid, 2.0), t)))
    rep = EstimateReport("interpolation", ["k", "norm"])
    mids = []
    for k in ks:
        _check_band(grid, k)
        w = _band_symbol(grid, k)
        bk, dbk = b_hat * w, db_hat * w
        n2 = math.sqrt(float(trapezoid(_sobolev_sq(bk, grid, 2.0), t))
                       + float(trapezoid(_sobolev_sq(dbk, grid, 1.0), t)))
        if n2 <= rel_floor * total:
            continue
        phys = _inv(bk, grid)
        sup_inf = float(np.abs(phys).max())
        sup_h1 = float(np.sqrt(_sobolev_sq(bk, grid, 1.0).max()))
        geo = math.sqrt(math.sqrt(float(trapezoid(_sobolev_sq(dbk, grid, 1.0), t)))
                        * math.sqrt(float(trapezoid(_sobolev_sq(bk, grid, 1.0), t))))
        rep.add_row((k, "linf"), sup_inf * 2.0 ** (k / 2), n2)
        rep.add_row((k, "h1"), sup_h1 * 2.0 ** (k / 2), n2)
        mids.append((k, geo * 2.0 ** (k / 2) / n2))
    if not rep.rows:
        raise ValueError("b has no mass in the requested bands")
    norm = rep.column("norm")
    ratio = rep.column("ratio")
    s_inf = _spread(ratio[norm == "linf"])
    s_h1 = _spread(ratio[norm == "h1"])
    rep.fits.update({"C_I_linf": float(ratio[norm == "linf"].max()),
                     "C_I_h1": float(ratio[norm == "h1"].max()),
                     "max_over_median_linf": s_inf, "max_over_median_h1": s_h1,
                     "geometric_mean_ratio": dict(mids)})
    rep.add_verdict("max/median over k (L^inf)", s_inf, "<=", INTERP_SPREAD_MAX)
    rep.add_verdict("max/median over k (H^1)", s_h1, "<=", INTERP_SPREAD_MAX)
    rep.provenance.update(grid=grid.n_points, n_times=int(t.size), bands=len(ks))
    return rep


# ---------------------------------------------------------------- simplex

def _random_profile(rng: np.random.Generator, t: np.ndarray) -> np.ndarray:
    """Positive trigonometric-exponential profile; every fourth one is a narrow bump."""
    if rng.random() < 0.25:
        c, w = rng.uniform(0.1, 0.9), rng.uniform(0.02, 0.2)
        return np.exp(-0.5 * ((t - c) / w) ** 2) + 1e-3
    m = rng.integers(1, 4)
    phase = rng.uniform(0, 2 * math.pi, m)
    amp = rng.normal(0, 1, m)
    return np.exp(sum(amp[j] * np.sin(2 * math.pi * (j + 1) * t + phase[j]) for j in range(m)))


def check_simplex_combinatorics(n_range: Sequence[int] = (2, 3, 4, 5, 6),
                                m_splits: Optional[Sequence[int]] = None, seed: int = 0,
                                bank_size: int = 10, nodes: int = 512) -> EstimateReport:
    """Simplex integral over ``prod ||f_i||_{L^1} prod ||f_j||_{L^2} / sqrt((n-m)!)``.

    Roles are assigned to random positions.  Also records the pure-volume
    rows (all profiles 1) against ``1/n!``.
    """
    from ..solver import simplex_integral

    t = np.linspace(0.0, 1.0, int(nodes))
    ns = [int(n) for n in n_range]
    if max(ns) > 7 or min(ns) < 1:
        raise ValueError("n must lie in 1..7")
    rep = EstimateReport("simplex", ["n", "m", "sample"])
    vol_err = 0.0
    keys = [(n, m) for n in ns for m in (range(n + 1) if m_splits is None else m_splits) if 0 <= m <= n]
    seeds = _seeds(seed, len(keys))
    for (n, m), s in zip(keys, seeds):
        rng = np.random.default_rng(s)
        for i in range(bank_size):
            prof = [_random_profile(rng, t) for _ in range(n)]
            l1_idx = set(rng.choice(n, size=m, replace=False).tolist())
            bound = 1.0 / math.sqrt(math.factorial(n - m))
            for j, p in enumerate(prof):
                if j in l1_idx:
                    bound *= float(trapezoid(p, t))
                else:
                    bound *= math.sqrt(float(trapezoid(p ** 2, t)))
            rep.add_row((n, m, i), simplex_integral(prof, t), bound)
    for n in ns:
        v = simplex_integral([np.ones_like(t)] * n, t)
        vol_err = max(vol_err, abs(v * math.factorial(n) - 1.0))
        rep.add_row((n, n, "volume"), v, 1.0)
    ratio = rep.column("ratio")
    per = {f"{n},{m}": float(max(r[3] for r in rep.rows if r[0][:2] == (n, m) and r[0][2] != "volume"))
           for n, m in keys}
    rep.fits.update({"C": float(ratio.max()), "max_ratio_per_nm": per,
                     "volume_max_relative_error": vol_err})
    rep.add_verdict("max ratio <= declared C (with quadrature slack)", float(ratio.max()), "<=",
                    SIMPLEX_C * (1 + SIMPLEX_QUAD_TOL))
    rep.add_verdict("simplex volume vs 1/n! relative error", vol_err, "<=", SIMPLEX_QUAD_TOL)
    rep.provenance.update(seed=seed, nodes=int(nodes), bank_size=bank_size)
    return rep


# ---------------------------------------------------------------- log-loss probe

DEFAULT_LAMBDAS = tuple(2.0 ** j for j in range(2, 11))


def probe_log_loss(M: Multiplier, cd: CoefficientDecomposition, lambdas: Sequence[float] = DEFAULT_LAMBDAS,
                   substeps: int = 1, seed: int = 0, threads: int = 1) -> EstimateReport:
    """``sup_t ||u||_1`` against ``N(g)`` along the spike family ``||g||_1 = 1``, ``max g = lambda``."""
    lams = [float(x) for x in lambdas]
    if any(x < 1 for x in lams):
        raise ValueError("lambda values must be >= 1")

    def case(lam):
        g = g_family("spike-sweep", lam, seed, cd.grid, times=cd.times)
        return lam, reference_solve(cd, M, g, substeps).sup_l1, n_of_g(g)

    rep = EstimateReport("log-loss", ["lambda"])
    for lam, sup_l1, N in _pmap(case, lams, threads):
        rep.add_row((lam,), sup_l1, N)
    y = rep.column("lhs")
    x = np.log(np.array(lams))
    ratio = rep.column("ratio")
    rep.fits["ratio_max_over_min"] = float(ratio.max() / ratio.min())
    rep.fits["delta0"] = cd.delta0
    if len(lams) >= 3:
        A, B, r2 = linear_fit(x, y)
        order = np.argsort(x)
        resid = (y - (A * x + B))[order]
        curv = float(np.mean(np.diff(resid, 2))) if len(lams) >= 3 else 0.0
        rep.fits.update({"A": A, "B": B, "r2": r2, "residual_second_difference_mean": curv})
        rep.add_verdict("R^2 of A log(lambda) + B", r2, ">=", LOGLOSS_R2_MIN)
        rep.add_verdict("mean second difference of residuals", curv, "<=", 0.0)
    rep.add_verdict("max/min of sup||u||_1 / N(g)", rep.fits["ratio_max_over_min"], "<=",
                    LOGLOSS_RATIO_SPREAD_MAX)
    rep.provenance.update(seed=seed, grid=cd.grid.n_points, n_times=int(cd.times.size),
                          substeps=int(substeps), operator=M.name)
    return rep


# ---------------------------------------------------------------- contraction sweep

DEFAULT_DELTAS = (0.05, 0.1, 0.2, 0.4)


def sweep_delta0(M: Multiplier, cd: CoefficientDecomposition, deltas: Sequence[float] = DEFAULT_DELTAS,
                 g: Optional[SpaceTimeField] = None, n_max: int = 6, seed: int = 0,
                 threads: int = 1) -> EstimateReport:
    """Geometric rate ``rho(Delta_0)`` of ``sup_t ||J_n||_1`` in ``n`` for rescaled copies of ``cd``."""
    ds = [float(d) for d in deltas]
    if any(b <= a for a, b in zip(ds, ds[1:])):
        raise ValueError("delta list must be increasing")
    if g is None:
        g = g_family("band-limited", 1.0, seed, cd.grid, times=cd.times)
    N = n_of_g(g)
    base = cd.max_norm()
    if base == 0:
        raise ValueError("base coefficient is zero")

    def case(d):
        J = dyson_series(cd.scaled(d / base), M, g, n_max)
        return d, [j.sup_l1() for j in J]

    rep = EstimateReport("delta0-sweep", ["delta0", "n"])
    rhos = {}
    for d, s in _pmap(case, ds, threads):
        for n, v in enumerate(s):
            rep.add_row((d, n), v, N)
        tail = np.array(s[1:])
        if n_max < 2 or np.any(tail <= 0):
            rhos[d] = 0.0
        else:
            rhos[d] = math.exp(linear_fit(np.arange(1, n_max + 1), np.log(tail))[0])
    rho = np.array([rhos[d] for d in ds])
    fits = {"rho": rhos}
    if np.all(rho > 0) and len(ds) >= 2:
        p, q, _ = linear_fit(np.log(ds), np.log(rho))
        fits.update(rho_power=p, threshold_delta0=math.exp(-q / p) if p > 0 else math.inf)
    rep.fits.update(fits)
    if len(ds) >= 2:
        rep.add_verdict("min increment of rho over delta list", float(np.min(np.diff(rho))), ">", 0.0)
    rep.add_verdict("rho at smallest delta0", float(rho[0]), "<", 1.0)
    rep.provenance.update(seed=seed, grid=cd.grid.n_points, n_times=int(cd.times.size),
                          n_max=int(n_max), operator=M.name)
    return rep
