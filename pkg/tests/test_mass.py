import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ahmass.charts import Chart
from ahmass.errors import DivergenceError
from ahmass.mass import (
    CausalCharacter,
    RadiusSchedule,
    causal_character,
    energy_momentum,
    hemisphere_energy_momentum,
    mass_integrand,
    momentum_from_aspect,
    write_convergence_csv,
)
from ahmass.models import conformal_perturbation, hyperbolic_metric, schwarzschild_ads
from ahmass.quadrature import product_gauss, sphere_area

from oracles import schwarzschild_ads_mass_oracle

# frozen from oracles.schwarzschild_ads_mass_oracle(n, 1)
SADS_N3 = 25.132741228718345
SADS_N4 = 118.43525281307231


def test_frozen_oracle_values():
    assert schwarzschild_ads_mass_oracle(3, 1.0) == pytest.approx(SADS_N3, rel=1e-14)
    assert schwarzschild_ads_mass_oracle(4, 1.0) == pytest.approx(SADS_N4, rel=1e-14)


@pytest.fixture(scope="module")
def q3():
    return product_gauss(3, 12)


@pytest.mark.parametrize("chart", [Chart.BALL, Chart.POLAR])
def test_integrand_vanishes_for_b(q3, chart):
    assert np.max(np.abs(mass_integrand(hyperbolic_metric(chart, 3), q3.nodes, 64.0))) == 0


def test_integrand_positive_for_sads(q3):
    dens = mass_integrand(schwarzschild_ads(3, 1.0), q3.nodes, 128.0)
    assert np.all(dens[:, 0] > 0)


def test_integrand_linear_in_perturbation(q3):
    d = [0.1, 0.2, 0.3]
    a = mass_integrand(conformal_perturbation(3, 1e-3, direction=d), q3.nodes[:50], 32.0)
    b = mass_integrand(conformal_perturbation(3, 5e-4, direction=d), q3.nodes[:50], 32.0)
    assert np.max(np.abs(a - 2 * b)) < 1e-3 * np.max(np.abs(a))


@pytest.mark.parametrize("n", [3, 4])
def test_zero_mass_of_b(n):
    res = energy_momentum(hyperbolic_metric(Chart.BALL, n), product_gauss(n, 8))
    assert np.max(np.abs(res.m)) < 1e-6


@pytest.mark.parametrize("n, expect", [(3, SADS_N3), (4, SADS_N4)])
def test_sads_mass_matches_oracle(n, expect):
    res = energy_momentum(schwarzschild_ads(n, 1.0), product_gauss(n, 12 if n == 3 else 6))
    assert res.m[0] == pytest.approx(expect, rel=1e-4)
    assert np.max(np.abs(res.m[1:])) < 1e-6


def test_polar_chart_mass_of_b(q3):
    res_b = energy_momentum(hyperbolic_metric(Chart.POLAR, 3), q3)
    assert np.max(np.abs(res_b.m)) == 0


def test_mass_is_linear_in_parameter(q3):
    m1 = energy_momentum(schwarzschild_ads(3, 1.0), q3).m[0]
    m2 = energy_momentum(schwarzschild_ads(3, 2.0), q3).m[0]
    assert m2 == pytest.approx(2 * m1, rel=1e-6)


def test_hemispheres_add_up(q3):
    for g in (schwarzschild_ads(3, 1.0), conformal_perturbation(3, 0.5, direction=[0.3, 0.0, 0.4])):
        full = energy_momentum(g, q3).m
        up = hemisphere_energy_momentum(g, q3, "upper").m
        lo = hemisphere_energy_momentum(g, q3, "lower").m
        assert np.max(np.abs(up + lo - full)) < 1e-8 * max(1, np.max(np.abs(full)))


def test_sads_hemispheres_split_energy(q3):
    g = schwarzschild_ads(3, 1.0)
    up = hemisphere_energy_momentum(g, q3, "upper").m[0]
    lo = hemisphere_energy_momentum(g, q3, "lower").m[0]
    # finite-difference curvature is not mirror symmetric below ~1e-8
    assert up == pytest.approx(lo, rel=1e-7)


def test_lower_half_perturbation_invisible_from_upper(q3):
    g = conformal_perturbation(3, 1.0, lower_half=True)
    up = hemisphere_energy_momentum(g, q3, "upper").m
    assert np.max(np.abs(up)) < 1e-8
    full = energy_momentum(g, q3).m
    lo = hemisphere_energy_momentum(g, q3, "lower").m
    np.testing.assert_allclose(full, lo, atol=1e-8)


def test_slow_decay_diverges(q3):
    with pytest.raises(DivergenceError) as exc:
        energy_momentum(conformal_perturbation(3, 1.0, sigma=1.0), q3)
    assert exc.value.table is not None


def test_linearity_in_amplitude(q3):
    d = [0.3, 0.0, 0.5]
    a = energy_momentum(conformal_perturbation(3, 1e-2, direction=d), q3).m / 1e-2
    b = energy_momentum(conformal_perturbation(3, 5e-3, direction=d), q3).m / 5e-3
    assert np.max(np.abs(a - b)) < 1e-2 * np.max(np.abs(a))


def test_schedule_validation():
    with pytest.raises(ValueError):
        RadiusSchedule((8.0, 4.0))
    assert RadiusSchedule().radii[0] == 8.0 and RadiusSchedule().radii[-1] == 256.0


def test_convergence_csv(q3):
    res = energy_momentum(schwarzschild_ads(3, 1.0), q3)
    buf = io.StringIO()
    write_convergence_csv(res, buf)
    lines = buf.getvalue().split("\n")
    assert lines[0].startswith("radius,m0,m1,m2,m3,extrapolant0")
    assert len([ln for ln in lines if ln]) == 7


@pytest.mark.parametrize(
    "m, expect",
    [
        ((1, 0, 0, 0), CausalCharacter.TIMELIKE_FUTURE),
        ((-1, 2, 0, 0), CausalCharacter.SPACELIKE),
        ((-1, 1, 0, 0), CausalCharacter.NULL_PAST),
        ((1, 0, 1, 0), CausalCharacter.NULL_FUTURE),
        ((-2, 1, 0, 0), CausalCharacter.TIMELIKE_PAST),
        ((0, 0, 0, 0), CausalCharacter.ZERO),
    ],
)
def test_causal_character(m, expect):
    assert causal_character(m) is expect


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.floats(-10, 10), min_size=4, max_size=4),
    st.floats(1e-3, 1e3),
)
def test_causal_character_scale_invariant(m, lam):
    m = np.asarray(m)
    if np.max(np.abs(m)) < 1e-6 or np.max(np.abs(lam * m)) < 1e-6:
        return
    assert causal_character(lam * m) is causal_character(m)


def test_momentum_from_aspect():
    q = product_gauss(3, 10)
    m = momentum_from_aspect(np.ones(len(q)), q)
    np.testing.assert_allclose(m, [sphere_area(3), 0, 0, 0], atol=1e-12)
    m = momentum_from_aspect(q.nodes[:, 0], q)
    assert abs(m[0]) < 1e-12 and m[1] == pytest.approx(sphere_area(3) / 3, rel=1e-12)
    m = momentum_from_aspect(-np.ones(len(q)), q)
    assert causal_character(m) is CausalCharacter.TIMELIKE_PAST
    m = momentum_from_aspect(lambda x: 1 + 0.5 * x[2], q)
    assert m[3] == pytest.approx(0.5 * sphere_area(3) / 3, rel=1e-12)
