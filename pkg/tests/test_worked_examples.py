"""Small hand-checkable cases for every module, with the oracle named in each test."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats

from idslab.averaging import (
    QuadratureSpec,
    average_over_site,
    combine_weighted,
    estimate_averaged_hoelder,
    mc_average_transform,
)
from idslab.config import ConfigError, loads_config
from idslab.measures import (
    cantor,
    cdf,
    delta,
    interval_mass,
    mixture,
    modulus_of_continuity,
    sample,
    scale_measure,
    translate_measure,
    uniform,
)
from idslab.operators import (
    LatticeOperator,
    Modulation,
    OperatorConfig,
    QuasiPeriodicBackground,
    build_hamiltonian,
    sample_disorder,
    split_rank_one,
)
from idslab.rng import CounterStream
from idslab.spectral import resolvent_element, spectral_measure
from idslab.transforms import (
    GridSpec,
    aggregated_transform,
    borel_transform,
    hoelder_constant_direct,
    poisson_smooth,
    reciprocal_imag_ratio,
)

from conftest import measure_zoo

ZOO = measure_zoo()
TWO_POINT = mixture((0.5, delta(-1.0)), (0.5, delta(1.0)))


# measures

def test_interval_and_cdf_values():
    assert interval_mass(uniform(), 0.5, 0.25) == pytest.approx(0.5)
    assert interval_mass(delta(), 0.0, 1.0) == 1.0
    assert cdf(uniform(), 0.3) == pytest.approx(0.3)
    assert cdf(delta(), 0.0) == 1.0
    assert cdf(mixture((0.5, delta()), (0.5, uniform())), 0.5) == pytest.approx(0.75)
    assert modulus_of_continuity(uniform(), 0.2) == pytest.approx(0.2)
    assert modulus_of_continuity(delta(), 1e-6) == 1.0


def test_pushforward_values():
    assert scale_measure(uniform(), 2.0) == uniform(0.0, 0.5)
    assert scale_measure(delta(3.0), 3.0) == delta(1.0)
    assert translate_measure(delta(), 1.0) == delta(-1.0)
    assert translate_measure(uniform(), -1.0) == uniform(1.0, 2.0)
    m = cantor()
    assert translate_measure(m, 0.0) is m
    assert hoelder_constant_direct(scale_measure(uniform(), 2.0), 1.0).constant == pytest.approx(2.0)


def test_sampling_examples():
    s = CounterStream(1)
    assert np.all(sample(delta(), s, size=50) == 0.0)
    u = sample(uniform(), s, size=10_000)
    assert np.array_equal(u, sample(uniform(), CounterStream(1), size=10_000))
    assert stats.kstest(u, "uniform").statistic < 0.02
    x = sample(TWO_POINT, CounterStream(2), size=10_000)
    assert abs(x.mean()) < 3.0 / np.sqrt(10_000)


@given(st.sampled_from(sorted(ZOO)), st.floats(-3, 3), st.floats(1e-3, 2))
def test_cdf_difference_only_misses_endpoint_atoms(name, x, eps):
    m = ZOO[name]
    locs, w = m.atoms()
    at_ends = w[np.isclose(locs, x + eps, rtol=0, atol=0) | (locs == x + eps)].sum()
    diff = float(m.cdf(x + eps) - m.cdf(x - eps))
    assert diff - interval_mass(m, x, eps) == pytest.approx(at_ends, abs=1e-12)


@given(st.sampled_from(sorted(ZOO)), st.one_of(st.floats(-4, -0.25), st.floats(0.25, 4)))
def test_scaling_round_trip(name, c):
    m = ZOO[name]
    back = scale_measure(scale_measure(m, c), 1.0 / c)
    x = np.linspace(-3, 3, 41)[:, None]
    eps = np.geomspace(1e-3, 2, 9)[None, :]
    assert np.abs(back.interval_mass(x, eps) - m.interval_mass(x, eps)).max() <= 1e-12


@given(st.sampled_from(sorted(ZOO)), st.integers(-8, 8), st.floats(1e-3, 1))
def test_translation_keeps_the_modulus(name, shift, eps):
    # dyadic shifts keep every breakpoint exactly representable
    m = ZOO[name]
    c = shift / 4.0
    assert modulus_of_continuity(translate_measure(m, c), eps) == pytest.approx(modulus_of_continuity(m, eps), abs=1e-12)


@pytest.mark.parametrize("k", [4, 8, 12])
def test_cantor_depth_refinement(k, rng):
    x, eps = rng.uniform(0, 1, 100), rng.uniform(1e-3, 0.3, 100)
    coarse = cantor(depth=k).interval_mass(x, eps)
    fine = cantor(depth=2 * k).interval_mass(x, eps)
    assert np.abs(coarse - fine).max() <= 2.0**-k


# transforms

def test_transform_values():
    assert borel_transform(delta(), 1j) == pytest.approx(1j)
    assert borel_transform(uniform(), 0.5 + 1j) == pytest.approx(1j * np.arctan(4.0 / 3.0))
    for a in (0.1, 1.0, 3.0):
        assert borel_transform(TWO_POINT, 1j * a) == pytest.approx(1j * a / (1 + a * a))
        assert poisson_smooth(delta(), 0.0, a) == pytest.approx(1.0 / a)
    assert poisson_smooth(uniform(), 0.5, 1.0) == pytest.approx(0.9272952180016122)
    assert reciprocal_imag_ratio(TWO_POINT, 0.0, 1.0) == pytest.approx(-0.5)
    assert aggregated_transform(delta(), uniform(), 0.0, 1.0) == pytest.approx(np.pi / 4)


@given(st.sampled_from(sorted(ZOO)), st.floats(-4, 4), st.floats(1e-3, 3))
def test_point_coupling_recovers_background(name, y, a):
    sigma = ZOO[name]
    got = aggregated_transform(sigma, delta(), y, a)
    assert got == pytest.approx(np.imag(borel_transform(sigma, y + 1j * a)), rel=1e-9)


@given(st.sampled_from(sorted(ZOO)), st.floats(-4, 4), st.floats(1e-3, 3))
def test_poisson_is_imaginary_part(name, x, a):
    m = ZOO[name]
    assert abs(poisson_smooth(m, x, a) - borel_transform(m, x + 1j * a).imag) <= 1e-12


def test_aggregated_sweep_below_two_pi():
    ys, a = np.linspace(-3, 4, 71)[:, None], np.geomspace(1e-4, 10, 61)[None, :]
    assert np.abs(aggregated_transform(uniform(), uniform(), ys, a)).max() <= 2 * np.pi


def test_unbounded_scale_grid():
    g = GridSpec.around(uniform(), unbounded=True)
    assert g.eps_range[1] >= 6.0 and np.isclose(g.step_ratio(), GridSpec.around(uniform()).step_ratio(), rtol=1e-2)


# operators

def test_small_matrices():
    H = build_hamiltonian(OperatorConfig(1, 3), np.zeros(3))
    assert H.to_dense().tolist() == [[0, 1, 0], [1, 0, 1], [0, 1, 0]]
    H = build_hamiltonian(OperatorConfig(1, 2, uniform()), [0.2, 0.7])
    assert H.to_dense().tolist() == [[0.2, 1.0], [1.0, 0.7]]
    s = split_rank_one(LatticeOperator.from_matrix([[5.0, 1.0], [1.0, 2.0]]), 0)
    assert s.background.to_dense().tolist() == [[0.0, 1.0], [1.0, 2.0]] and s.coupling == 5.0


def test_decaying_diagonal():
    cfg = OperatorConfig(1, 9, uniform(), modulation=Modulation("decaying", 1.0))
    w = np.linspace(0.1, 0.9, 9)
    offsets = np.abs(np.arange(9) - 4)
    assert np.allclose(build_hamiltonian(cfg, w).diagonal(), w / (1 + offsets))


def test_background_diagonal_after_split():
    cfg = OperatorConfig(1, 5, uniform(), background=QuasiPeriodicBackground(0.8))
    H = build_hamiltonian(cfg, sample_disorder(cfg, 6))
    for n in range(5):
        assert split_rank_one(H, n).background.diagonal()[n] == cfg.background_values()[n]


def test_disorder_examples():
    assert np.all(sample_disorder(OperatorConfig(1, 10, delta()), 3).values == 0.0)
    v = sample_disorder(OperatorConfig(2, 50, uniform()), 11).values
    assert abs(v.mean() - 0.5) < 3 * (1 / np.sqrt(12)) / 50


@given(st.integers(0, 2**31), st.sampled_from([1, 2]))
def test_spectrum_inside_norm_bound(seed, dim):
    cfg = OperatorConfig(dim, 6, uniform(-1, 2), background=QuasiPeriodicBackground(0.5),
                         modulation=Modulation("growing", 0.5))
    H = build_hamiltonian(cfg, sample_disorder(cfg, seed))
    bound = 2 * dim + 0.5 + cfg.modulation_values().max() * 2.0
    assert np.abs(np.linalg.eigvalsh(H.to_dense())).max() <= bound + 1e-12


def test_shift_covariance():
    cfg = OperatorConfig(1, 12, uniform())
    w = sample_disorder(cfg, 2).values
    H, Hs = build_hamiltonian(cfg, w).to_dense(), build_hamiltonian(cfg, np.roll(w, 1)).to_dense()
    assert np.array_equal(Hs[1:, 1:], H[:-1, :-1])


# spectral

def test_spectral_examples():
    sm = spectral_measure(LatticeOperator.from_matrix([[0.0, 1.0], [1.0, 0.0]]), 0)
    assert np.allclose(sm.eigenvalues, [-1, 1]) and np.allclose(sm.weights, [0.5, 0.5])
    sm = spectral_measure(LatticeOperator.from_matrix([[3.0]]), 0)
    assert sm.rows() == [(3.0, 1.0)]
    assert resolvent_element(LatticeOperator.from_matrix([[0.0]]), 0, 1j) == pytest.approx(1j)


# averaging

def test_point_law_on_zero_background():
    assert average_over_site(LatticeOperator.from_matrix([[0.0]]), 0, delta(0.4)) == delta(0.4)


def test_two_site_average_against_quadrature():
    A = LatticeOperator.from_matrix([[0.0, 1.0], [1.0, 0.0]])
    z = 0.5 + 0.5j
    f0 = resolvent_element(A, 0, z)
    want = integrate.quad(lambda q: (1.0 / (q + 1.0 / f0)).imag, 0, 1)[0]
    for rule in ("spectral-shift", "gauss-legendre"):
        nu = average_over_site(A, 0, uniform(), QuadratureSpec(rule, 64))
        assert borel_transform(nu, z).imag == pytest.approx(want, abs=1e-6)


def test_gauss_nodes_converge():
    A = build_hamiltonian(OperatorConfig(1, 20), np.zeros(20))
    z = np.linspace(-2.5, 2.5, 20) + 0.5j
    f = [borel_transform(average_over_site(A, 9, uniform(), QuadratureSpec("gauss-legendre", n)), z) for n in (64, 128)]
    assert np.abs(f[0].imag - f[1].imag).max() <= 1e-6


@given(st.integers(2, 25), st.integers(0, 2**31))
def test_site_average_bound_at_three_exponents(n, seed):
    cfg = OperatorConfig(1, n, uniform(-1, 1))
    A = split_rank_one(build_hamiltonian(cfg, sample_disorder(cfg, seed)), n // 2).background
    nu = average_over_site(A, n // 2, uniform())
    for alpha in (0.5, 0.75, 1.0):
        assert hoelder_constant_direct(nu, alpha).constant <= 2 ** (2 - alpha) * np.pi * hoelder_constant_direct(uniform(), alpha).constant


def test_no_disorder_table_is_exact():
    cfg = OperatorConfig(1, 20, delta(), background=QuasiPeriodicBackground(1.0))
    e, a = np.linspace(-2, 2, 7), np.array([0.05, 0.5])
    t = mc_average_transform(cfg, [10], e, a, 4, seed=0)
    H = build_hamiltonian(cfg, np.zeros(20))
    assert np.array_equal(t.stderr, np.zeros_like(t.stderr))
    assert np.allclose(t.mean[0], np.imag(resolvent_element(H, 10, e[None, :] + 1j * a[:, None])), rtol=1e-13)


def test_anderson_table_below_pi_at_smallest_scale():
    cfg = OperatorConfig(1, 500, uniform())
    t = mc_average_transform(cfg, [249], np.linspace(-2.5, 3.5, 61), np.array([0.05]), 200, seed=7)
    assert np.all(t.mean > 0)
    assert np.all(t.mean - 3 * t.stderr <= np.pi)


def test_one_site_mc_converges_to_exact_transform():
    cfg = OperatorConfig(1, 1, uniform())
    e, a = np.linspace(-0.5, 1.5, 9), np.array([0.1, 0.5])
    exact = np.imag(borel_transform(uniform(), e[None, :] + 1j * a[:, None]))
    for n in (100, 1600):
        t = mc_average_transform(cfg, [0], e, a, n, seed=n)
        assert np.abs(t.mean[0] - exact).max() <= 4 * t.stderr[0].max()


def test_averaged_estimates():
    free = build_hamiltonian(OperatorConfig(1, 10), np.zeros(10))
    atoms = average_over_site(free, 4, delta())
    assert not estimate_averaged_hoelder(atoms, 0.5).finite
    chain = build_hamiltonian(OperatorConfig(1, 50), np.zeros(50))
    est = estimate_averaged_hoelder(average_over_site(chain, 24, uniform()), 1.0)
    assert est.finite and est.constant <= 2 * np.pi


def test_weighted_examples():
    single, r = combine_weighted([(1.0, uniform())], 1.0, [1.0], d_mu=1.0)
    assert single == uniform() and r.extra["implied_constant_sharp"] == pytest.approx(1.0)
    shells = np.abs(np.arange(21) - 10)
    beta = 2.0**-shells / np.sum(2.0**-shells)
    terms = [(b, uniform(k, k + 1)) for k, b in enumerate(beta)]
    _, ok = combine_weighted(terms, 0.5, (1.0 + shells) ** -1.0, 1.0, shells=shells, estimate=False)
    assert ok.extra["summable"] and not ok.forced_fail
    _, bad = combine_weighted(terms, 1.0, 2.0**-shells, 1.0, shells=shells, estimate=False)
    assert not bad.extra["summable"] and not bad.passed


def test_mc_scale_floor():
    text = """
seed: 1
operator: {side: 5, single_site: {type: uniform}}
mc: {realizations: 2, scales: {range: [0.001, 1.0], count: 3}}
"""
    with pytest.raises(ConfigError, match="floor"):
        loads_config(text)
