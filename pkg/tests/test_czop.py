
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lptx.coeff import random_band_atom, unit_spike
from lptx.czop import (SymbolRegularityError, apply, commutator_apply, kernel_decay_exponent,
                       localize, make_multiplier, power)
from lptx.grid import Field, make_grid
from lptx.lpcalc import project_band
from lptx.norms import lp_norm, weak_l1

from conftest import dft_oracle, idft_oracle, random_field

SPECS = ["identity", "riesz(1,1)", "riesz(1,2)", "riesz(2,2)", "smoothed_riesz(1,1)",
         "smoothed_riesz(1,2)"]


def symbol_at(M, m1, m2):
    idx = list(M.grid.integer_frequencies)
    return M.symbol[idx.index(m1), idx.index(m2)]


def test_identity():
    M = make_multiplier("identity", make_grid(16))
    assert np.all(M.symbol == 1)
    assert M.symbol_bound == 1.0


@pytest.mark.parametrize("spec,xi,value", [
    ("riesz(1,1)", (3, 0), 1.0),
    ("riesz(1,1)", (0, 3), 0.0),
    ("riesz(1,1)", (0, 0), 0.0),
    ("riesz(1,2)", (2, 2), 0.5),
    ("smoothed_riesz(1,2)", (1, 1), 1 / 3),
    ("smoothed_riesz(2,2)", (0, 2), 0.8),
])
def test_builtin_symbol_values(spec, xi, value):
    M = make_multiplier(spec, make_grid(16))
    assert symbol_at(M, *xi) == pytest.approx(value, abs=1e-15)


@pytest.mark.parametrize("spec", SPECS)
def test_symbol_bound_dominates_symbol(spec):
    M = make_multiplier(spec, make_grid(64))
    assert np.abs(M.symbol).max() <= M.symbol_bound


@pytest.mark.parametrize("bad", ["riesz(3,1)", "laplace", "riesz(1)"])
def test_unknown_spec(bad):
    with pytest.raises(ValueError):
        make_multiplier(bad, make_grid(16))


def test_table_errors():
    g = make_grid(16)
    with pytest.raises(ValueError):
        make_multiplier(np.ones((8, 8)), g)
    bad = np.ones(g.shape)
    bad[1, 1] = np.inf
    with pytest.raises(ValueError):
        make_multiplier(bad, g)


def test_rough_table_rejected(rng):
    g = make_grid(32)
    with pytest.raises(SymbolRegularityError):
        make_multiplier(rng.choice([-1.0, 1.0], size=g.shape), g)


def test_table_from_spectral_field():
    g = make_grid(16)
    sym = make_multiplier("riesz(1,2)", g).symbol
    M = make_multiplier(Field(g, sym, spectral=True))
    np.testing.assert_array_equal(M.symbol, sym)


def test_apply_identity_exact(rng):
    g = make_grid(16)
    f = random_field(g, rng)
    np.testing.assert_allclose(apply(make_multiplier("identity", g), f).values, f.values, atol=1e-14)


def test_riesz_eigenfunction():
    g = make_grid(16)
    f = g.mode(3, 0)
    np.testing.assert_allclose(apply(make_multiplier("riesz(1,1)", g), f).values, f.values, atol=1e-14)


@pytest.mark.parametrize("spec", ["riesz(1,2)", "smoothed_riesz(1,1)"])
def test_apply_matches_direct_sum(rng, spec):
    g = make_grid(8)
    M = make_multiplier(spec, g)
    f = random_field(g, rng, real=False)
    expect = idft_oracle(M.symbol * dft_oracle(f.values))
    np.testing.assert_allclose(apply(M, f).values, expect, atol=1e-12)


def test_apply_grid_mismatch(rng):
    M = make_multiplier("identity", make_grid(16))
    with pytest.raises(ValueError):
        apply(M, random_field(make_grid(8), rng))


@pytest.mark.parametrize("spec", SPECS)
def test_l2_bound(rng, spec):
    g = make_grid(32)
    M = make_multiplier(spec, g)
    for _ in range(10):
        f = random_field(g, rng)
        assert lp_norm(apply(M, f), 2) <= np.abs(M.symbol).max() * lp_norm(f, 2) * (1 + 1e-10)
        assert lp_norm(apply(M, f), 2) <= M.symbol_bound * lp_norm(f, 2) * (1 + 1e-10)


def test_power_identity():
    g = make_grid(16)
    np.testing.assert_array_equal(power(make_multiplier("identity", g), 7).symbol, 1)


def test_power_symbol():
    M = power(make_multiplier("riesz(1,1)", make_grid(16)), 2)
    assert symbol_at(M, 1, 1) == pytest.approx(0.25)


@pytest.mark.parametrize("spec", ["riesz(1,2)", "smoothed_riesz(1,1)"])
def test_power_matches_composition(rng, spec):
    g = make_grid(32)
    M = make_multiplier(spec, g)
    f = random_field(g, rng)
    ref = apply(M, apply(M, apply(M, f)))
    got = apply(power(M, 3), f)
    assert np.abs(got.values - ref.values).max() <= 1e-10 * np.abs(ref.values).max()


def test_power_errors():
    M = make_multiplier("riesz(1,1)", make_grid(16))
    with pytest.raises(ValueError):
        power(M, 0)
    with pytest.raises(ValueError):
        power(localize(M, "band", 1), 2)


def test_localize_identity_is_projection(rng):
    g = make_grid(32)
    f = random_field(g, rng)
    P2 = localize(make_multiplier("identity", g), "band", 2)
    np.testing.assert_allclose(apply(P2, f).values, project_band(f, 2).values, atol=1e-13)


def test_localize_below_zero_is_zero():
    M = localize(make_multiplier("riesz(1,1)", make_grid(32)), "below", 0)
    assert np.all(M.symbol == 0)


def test_localize_complementary():
    g = make_grid(64)
    M = make_multiplier("riesz(1,2)", g)
    total = localize(M, "at_or_above", 2).symbol + localize(M, "below", 2).symbol
    np.testing.assert_allclose(total, M.symbol, rtol=0, atol=1e-15)


@pytest.mark.parametrize("k", [0, 2, 4])
def test_localize_band_commutes_with_projection(rng, k):
    g = make_grid(64)
    M = make_multiplier("riesz(1,1)", g)
    f = random_field(g, rng)
    np.testing.assert_allclose(apply(localize(M, "band", k), f).values,
                               project_band(apply(M, f), k).values, atol=1e-12)


def test_localized_symbol_vanishes_outside_window():
    g = make_grid(64)
    M = localize(make_multiplier("riesz(1,1)", g), "band", 3)
    r = g.abs_xi
    assert np.all(M.symbol[(r <= 4) | (r >= 16)] == 0)


def test_localize_errors():
    M = make_multiplier("identity", make_grid(32))
    with pytest.raises(ValueError):
        localize(M, "band", 9)
    with pytest.raises(ValueError):
        localize(M, "sideways", 1)


def test_commutator_zero_atom(rng):
    g = make_grid(32)
    Mh = localize(make_multiplier("riesz(1,1)", g), "at_or_above", 2)
    out = commutator_apply(Mh, g.zeros(), random_field(g, rng))
    assert np.abs(out.values).max() == 0


def test_commutator_full_identity(rng):
    g = make_grid(32)
    Mh = localize(make_multiplier("identity", g), "at_or_above", 0)
    a = random_band_atom(g, 0, 0, 1.0)
    out = commutator_apply(Mh, a, random_field(g, rng))
    assert np.abs(out.values).max() < 1e-13


def test_commutator_hand_spectral_oracle():
    # a = cos(2 x1) sits in band 1; f = exp(i(5 x1 + x2)); product modes (7,1), (3,1)
    g = make_grid(32)
    x1, _ = g.coords
    a = Field(g, np.cos(2 * x1))
    f = g.mode(5, 1)
    Mh = localize(make_multiplier("riesz(1,1)", g), "at_or_above", 1)

    def h(m1, m2):
        return m1 ** 2 / (m1 ** 2 + m2 ** 2)  # window is 1 for |xi| >= 2

    expect = (0.5 * (h(7, 1) - h(5, 1)) * g.mode(7, 1).values
              + 0.5 * (h(3, 1) - h(5, 1)) * g.mode(3, 1).values)
    np.testing.assert_allclose(commutator_apply(Mh, a, f).values, expect, atol=1e-12)


def test_commutator_matches_two_sided_oracle(rng):
    g = make_grid(64)
    M = power(make_multiplier("riesz(1,2)", g), 2)
    Mh = localize(M, "at_or_above", 3)
    a = random_band_atom(g, 3, 5, 1.0)
    f = random_field(g, rng)
    ref = apply(Mh, Field(g, a.values * f.values)).values - a.values * apply(Mh, f).values
    got = commutator_apply(Mh, a, f).values
    assert np.abs(got - ref).max() <= 1e-12 * np.abs(ref).max()


def test_commutator_rejects_off_band_atom(rng):
    g = make_grid(32)
    Mh = localize(make_multiplier("riesz(1,1)", g), "at_or_above", 2)
    with pytest.raises(ValueError):
        commutator_apply(Mh, random_field(g, rng), random_field(g, rng))
    with pytest.raises(ValueError):
        commutator_apply(make_multiplier("riesz(1,1)", g), random_band_atom(g, 2, 0, 1.0),
                         random_field(g, rng))


@pytest.mark.parametrize("spec", ["riesz(1,1)", "riesz(1,2)", "smoothed_riesz(1,1)"])
def test_weak_l1_constant(spec):
    g = make_grid(128)
    M = make_multiplier(spec, g)
    rng = np.random.default_rng(3)
    ratios = []
    for s in range(50):
        if s % 2:
            f = Field(g, rng.standard_normal(g.shape))
        else:
            f = unit_spike(g, 2.0 ** rng.uniform(0, 8), tuple(int(i) for i in rng.integers(0, 128, 2)))
        f = f * (1 / lp_norm(f, 1))
        ratios.append(weak_l1(apply(M, f)))
    c_w = max(ratios)
    print(f"{spec}: C_w = {c_w:.4g}")
    assert 0 < c_w <= 2.0


@pytest.mark.parametrize("spec", ["riesz(1,1)", "smoothed_riesz(1,2)"])
@pytest.mark.parametrize("band", [4, 5])
def test_kernel_decay(spec, band):
    g = make_grid(128)
    p, r, _ = kernel_decay_exponent(localize(make_multiplier(spec, g), "band", band))
    assert r.size >= 3
    assert p <= -3 + 0.3


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 2), st.integers(1, 2), st.floats(-5, 5), st.floats(-5, 5))
def test_apply_linear(i, j, alpha, beta):
    g = make_grid(16)
    rng = np.random.default_rng(0)
    f, h = random_field(g, rng), random_field(g, rng)
    M = make_multiplier(f"riesz({i},{j})", g)
    lhs = apply(M, f * alpha + h * beta).values
    rhs = alpha * apply(M, f).values + beta * apply(M, h).values
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)
