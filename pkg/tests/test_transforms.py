import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from idslab.measures import cantor, delta, mixture, uniform
from idslab.transforms import (
    GridSpec,
    TransformError,
    aggregated_transform,
    borel_transform,
    borel_values,
    direct_ratios,
    divergence_slope,
    hoelder_constant_borel,
    hoelder_constant_direct,
    poisson_smooth,
    reciprocal_imag_ratio,
)

from conftest import measure_zoo

ZOO = measure_zoo()
upper = st.tuples(st.floats(-4, 4), st.floats(1e-3, 5))


def quad_density_oracle(lo, hi, z):
    dens = 1.0 / (hi - lo)
    re = integrate.quad(lambda x: dens * ((x - z) ** -1).real, lo, hi, limit=400, points=[z.real])[0]
    im = integrate.quad(lambda x: dens * ((x - z) ** -1).imag, lo, hi, limit=400, points=[z.real])[0]
    return re + 1j * im


def cantor_borel_oracle(z, far=200.0):
    """Self-similarity F(z) = 3/2 [F(3z) + F(3z - 2)], closed by a far-field multipole expansion."""
    c = 0.5 - z
    if abs(c) > far:
        # symmetric about 1/2 with variance 1/8; odd moments vanish
        return 1.0 / c + 0.125 / c**3
    return 1.5 * (cantor_borel_oracle(3.0 * z, far) + cantor_borel_oracle(3.0 * z - 2.0, far))


@pytest.mark.parametrize("z", [0.5 + 1j, -1.0 + 0.1j, 0.3 + 0.01j, 2.0 + 3.0j])
def test_uniform_borel_matches_quadrature(z):
    got = borel_transform(uniform(-2.0, 3.0), z)
    assert got == pytest.approx(quad_density_oracle(-2.0, 3.0, z), rel=1e-8, abs=1e-10)


def test_uniform_borel_frozen_value():
    # 2i arctan(1/2), from the quadrature oracle above
    assert borel_transform(uniform(), 0.5 + 1j) == pytest.approx(0.9272952180016122j, abs=1e-12)


@pytest.mark.parametrize("z", [0.5 + 0.5j, 0.2 + 0.05j, 1.3 + 0.2j, -0.5 + 1j])
def test_cantor_borel_matches_parts_integration(z):
    assert borel_transform(cantor(), z) == pytest.approx(cantor_borel_oracle(z), rel=2e-5)


def test_atomic_closed_form():
    m = mixture((0.25, delta(-1.0)), (0.75, delta(2.0)))
    z = 0.3 + 0.7j
    assert borel_transform(m, z) == pytest.approx(0.25 / (-1.0 - z) + 0.75 / (2.0 - z))


def test_real_axis_rejected():
    with pytest.raises(TransformError):
        borel_transform(uniform(), 0.5)


@given(st.sampled_from(sorted(ZOO)), upper)
def test_herglotz_and_reflection(name, p):
    m = ZOO[name]
    z = complex(p[0], p[1])
    f = borel_transform(m, z)
    assert f.imag > 0
    assert abs(f) <= 1.0 / z.imag * (1 + 1e-9)
    assert borel_transform(m, z.conjugate()) == pytest.approx(f.conjugate(), rel=1e-9, abs=1e-12)


def test_poisson_smoothing_total_mass():
    total = integrate.quad(lambda x: poisson_smooth(uniform(), x, 0.3), -np.inf, np.inf, limit=400)[0]
    assert total == pytest.approx(np.pi, rel=1e-7)


@given(st.sampled_from(sorted(ZOO)), st.floats(-5, 5), st.floats(1e-4, 10))
def test_reciprocal_ratio_below_one(name, y, a):
    assert abs(reciprocal_imag_ratio(ZOO[name], y, a)) <= 1.0 + 1e-9


def test_reciprocal_ratio_delta_is_minus_one():
    # F = -1/z for the point mass at 0, so 1/F = -z and a / Im(1/F) = -1
    assert reciprocal_imag_ratio(delta(), 0.7, 0.2) == pytest.approx(-1.0)


@given(st.sampled_from(sorted(ZOO)), st.floats(-3, 3), st.floats(1e-3, 3))
def test_aggregated_over_point_background(name, y, a):
    mu = ZOO[name]
    got = aggregated_transform(delta(0.0), mu, y, a)
    assert got == pytest.approx(np.imag(borel_transform(mu, y + 1j * a)), rel=1e-9, abs=1e-12)


@given(st.sampled_from(sorted(ZOO)), st.floats(0.05, 1.0))
def test_direct_below_scaled_borel_pointwise(name, alpha):
    m = ZOO[name]
    g = GridSpec((-2.5, 3.5), 41, (1e-3, 2.0), 17)
    d = direct_ratios(m, alpha, g)
    b = borel_values(m, alpha, g)
    assert np.all(d <= 2.0 ** (1.0 - alpha) * b * (1 + 1e-9) + 1e-12)


def test_divergence_slope_recovers_power_law():
    s = np.geomspace(1e-4, 1, 41)
    assert divergence_slope(s, 3.0 * s**-0.4) == pytest.approx(0.4, abs=1e-9)
    assert divergence_slope(s, np.ones_like(s)) == pytest.approx(0.0, abs=1e-12)
    # decay toward fine scales reads as bounded: the running max is flat
    assert divergence_slope(s, s) == pytest.approx(0.0, abs=1e-12)


def test_uniform_estimates():
    d = hoelder_constant_direct(uniform(), 1.0)
    b = hoelder_constant_borel(uniform(), 1.0)
    assert d.constant == pytest.approx(1.0, abs=1e-12)
    assert np.pi - 0.05 <= b.constant <= np.pi + 1e-6
    assert d.constant <= 2.0 ** 0 * b.constant


@pytest.mark.parametrize("alpha", [0.3, 0.5, 1.0])
def test_point_mass_sentinel(alpha):
    for est in (hoelder_constant_direct(delta(), alpha), hoelder_constant_borel(delta(), alpha)):
        assert not est.finite
        assert est.divergence_slope == pytest.approx(alpha, abs=0.05)


def test_cantor_dichotomy_at_its_dimension():
    m = cantor()
    assert hoelder_constant_direct(m, m.dimension).finite
    assert hoelder_constant_borel(m, m.dimension).finite
    assert not hoelder_constant_direct(m, 0.7).finite
    assert not hoelder_constant_borel(m, 0.7).finite


@given(st.sampled_from(["unit", "wide", "half-atom", "two-point"]), st.floats(0.2, 1.0))
def test_refined_grid_never_lowers_the_sup(name, alpha):
    m = ZOO[name]
    g = GridSpec.around(m, x_count=51, eps_count=21)
    coarse = hoelder_constant_direct(m, alpha, g).grid_sup
    fine = hoelder_constant_direct(m, alpha, g.refined()).grid_sup
    assert fine >= coarse - 1e-12


def test_refined_grid_is_nested():
    g = GridSpec((-1, 2), 11, (1e-3, 1), 7)
    r = g.refined()
    assert np.allclose(r.xs()[::2], g.xs()) and np.allclose(r.eps()[::2], g.eps())


@pytest.mark.parametrize("alpha", [0.0, -0.1, 1.5])
def test_alpha_range(alpha):
    with pytest.raises(TransformError, match=r"alpha outside \(0,1\]"):
        hoelder_constant_direct(uniform(), alpha)


def test_resolution_unit_bounds_between_scale_sup():
    # uniform at alpha = 1/2: the exact sup over eps of min(2eps,1)/(2eps)^0.5 is 1 at eps = 1/2
    g = GridSpec((-1, 2), 301, (1e-3, 1.0), 9)
    est = hoelder_constant_direct(uniform(), 0.5, g)
    assert 1.0 - est.constant <= est.resolution
