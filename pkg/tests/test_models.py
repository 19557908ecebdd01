import numpy as np
import pytest
import sympy as sp

from ahmass.charts import Chart, to_hyperboloid, transition
from ahmass.errors import ConfigError, DomainError, NotKillingError
from ahmass.models import (
    DecaySpec,
    dilation_field,
    hyperbolic_metric,
    killing_basis,
    killing_form,
    schwarzschild_ads,
    smooth_step,
    static_kid,
)
from ahmass.verify import kid_suite, killing_suite

from conftest import ball_points, half_space_points


@pytest.mark.parametrize("n", [3, 4])
def test_kid_closed_forms_against_sympy(n):
    # the KIDs solve Hess V = V b; check symbolically in the half-space
    y = sp.symbols(f"y0:{n}", positive=True)
    z = y[-1]
    w2 = sum(v**2 for v in y[:-1])
    b = sp.diag(*([1 / z**2] * n))
    binv = b.inv()
    Gam = [[[sum(binv[k, l] * (sp.diff(b[l, i], y[j]) + sp.diff(b[l, j], y[i]) - sp.diff(b[i, j], y[l]))
                 for l in range(n)) / 2 for j in range(n)] for i in range(n)] for k in range(n)]
    kids = [(w2 + z**2 + 1) / (2 * z)] + [y[i] / z for i in range(n - 1)] + [(w2 + z**2 - 1) / (2 * z)]
    for V in kids:
        for i in range(n):
            for j in range(n):
                hess = sp.diff(V, y[i], y[j]) - sum(Gam[k][i][j] * sp.diff(V, y[k]) for k in range(n))
                assert sp.simplify(hess - V * b[i, j]) == 0
    pt = {v: sp.Rational(k + 2, 3) for k, v in enumerate(y)}
    num = np.array([[float(a.subs(pt)) for a in y]])
    for mu, V in enumerate(kids):
        assert static_kid(mu, n)(num)[0] == pytest.approx(float(V.subs(pt)), rel=1e-14)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_kid_residuals(rng, n):
    pts = half_space_points(rng, n, 200)
    assert kid_suite(n, pts).passed
    assert kid_suite(n, pts, fd=True).passed


def test_ball_kids_are_hyperboloid_coordinates(rng):
    x = ball_points(rng, 4, 50)
    X = to_hyperboloid(x, Chart.BALL)
    for mu in range(5):
        np.testing.assert_allclose(static_kid(mu, 4, Chart.BALL)(x), X[:, mu], rtol=1e-10, atol=1e-12)


def test_kid_index_range():
    with pytest.raises(ValueError):
        static_kid(5, 4)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_killing_basis_size_and_residuals(rng, n):
    basis = killing_basis(n)
    assert len(basis) == n * (n + 1) // 2
    assert killing_suite(n, half_space_points(rng, n, 200)).passed


def test_non_antisymmetric_rotation_is_rejected():
    with pytest.raises(NotKillingError):
        killing_form("euclidean", 3, rotation=np.array([[0.0, 1.0], [1.0, 0.0]]))


def test_dilation_field():
    x = np.array([0.5, 0.0, 0.0])
    np.testing.assert_allclose(dilation_field(x), [0.5 * 0.75 / 1.25, 0, 0])
    with pytest.raises(DomainError):
        dilation_field(np.array([1.0, 0, 0]))


def test_dilation_field_is_r_dr(rng):
    # in the ball, Z equals the pushforward of r d/dr from the polar chart
    x = ball_points(rng, 3, 10, rmax=0.8)
    p = transition(x, Chart.BALL, Chart.POLAR)
    eps = 1e-6
    p2 = p.copy()
    p2[:, 0] *= 1 + eps
    dx = (transition(p2, Chart.POLAR, Chart.BALL) - x) / eps
    np.testing.assert_allclose(dilation_field(x), dx, rtol=1e-5, atol=1e-7)


def test_decay_spec_validation():
    spec = DecaySpec(4, sigma=4.0, s=2.2)
    assert spec.mass_rate == pytest.approx(1.8)
    with pytest.raises(ConfigError):
        DecaySpec(4, sigma=4.0, s=1.5)
    with pytest.raises(ConfigError):
        DecaySpec(4, sigma=3.0, s=2.0)


def test_smooth_step():
    t = np.array([-1.0, 0.0, 0.5, 1.0, 2.0])
    np.testing.assert_allclose(smooth_step(t), [0, 0, 0.5, 1, 1])
    s = smooth_step(np.linspace(-0.5, 1.5, 101))
    assert np.all(np.diff(s) >= 0)


def test_schwarzschild_ads_radial_form(rng):
    # g(d_r, d_r) = 1/F in polar coordinates
    n, m = 3, 0.1
    g = schwarzschild_ads(n, m)
    x = ball_points(rng, n, 5, rmax=0.8)
    s = np.sum(x * x, axis=1)
    r = 2 * np.sqrt(s) / (1 - s)
    u = x / np.sqrt(s)[:, None]
    drho_dr = (1 - s) ** 2 / (2 * (1 + s))
    grr = np.einsum("ki,kij,kj->k", u, g(x), u) * drho_dr**2
    np.testing.assert_allclose(grr, 1 / (1 + r * r - 2 * m * r ** (2 - n)), rtol=1e-12)
    assert hyperbolic_metric(Chart.BALL, n).name != g.name
