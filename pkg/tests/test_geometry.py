import numpy as np
import pytest

from ahmass.charts import Chart, ChartPoint
from ahmass.errors import DegenerateMetricError, DomainMarginError
from ahmass.geometry import (
    Field,
    MetricField,
    christoffel,
    fd_gradient,
    fd_hessian,
    inverse_metric,
    ricci,
    ricci_from_derivatives,
    ricci_relative,
    scalar_curvature,
    tensor_norm,
)
from ahmass.models import conformal_perturbation, euclidean_metric, hyperbolic_metric

from conftest import ball_points, half_space_points


def _points(rng, chart, n):
    from ahmass.charts import transition

    if chart is Chart.HALF_SPACE:
        return half_space_points(rng, n, 20)
    x = ball_points(rng, n, 20, rmax=0.8)
    return transition(x, Chart.BALL, chart)


def test_fd_derivatives_of_polynomial(rng):
    f = lambda x: x[..., 0] ** 3 * x[..., 1] + x[..., 2] ** 2
    x = rng.uniform(-1, 1, (5, 3))
    h = np.full(5, 1e-3)
    g = fd_gradient(f, x, h)
    np.testing.assert_allclose(g[:, 0], 3 * x[:, 0] ** 2 * x[:, 1], atol=1e-9)
    H = fd_hessian(f, x, h)
    np.testing.assert_allclose(H[:, 0, 1], 3 * x[:, 0] ** 2, atol=1e-7)
    np.testing.assert_allclose(H[:, 2, 2], 2, atol=1e-7)


@pytest.mark.parametrize("n", [3, 4, 5])
@pytest.mark.parametrize("chart", [Chart.HALF_SPACE, Chart.BALL, Chart.POLAR])
def test_hyperbolic_metric_is_einstein(rng, n, chart):
    b = hyperbolic_metric(chart, n)
    x = _points(rng, chart, n)
    fd = MetricField(n, chart, Field(b.field.f))
    Ric_fd = ricci(fd, x)
    gx = b(x)
    rel = tensor_norm(Ric_fd + (n - 1) * gx, gx) / np.sqrt(n) / (n - 1)
    assert np.max(rel) < 1e-7
    Ric_an = ricci_from_derivatives(*b.derivatives(x))
    assert np.max(tensor_norm(Ric_an + (n - 1) * gx, gx)) < 1e-10
    _, R = scalar_curvature(b, x)
    np.testing.assert_allclose(R, -n * (n - 1), rtol=1e-12)


def test_analytic_derivatives_match_fd(rng):
    for chart in (Chart.HALF_SPACE, Chart.BALL, Chart.POLAR):
        b = hyperbolic_metric(chart, 4)
        x = _points(rng, chart, 4)
        h = 1e-3 * chart.scale(x)
        np.testing.assert_allclose(b.gradient(x, h), fd_gradient(b.field.f, x, h), rtol=1e-7, atol=1e-7)


def test_half_space_christoffels_closed_form(rng):
    # Gamma^z_ww = 1/z, Gamma^w_wz = -1/z, Gamma^z_zz = -1/z
    x = half_space_points(rng, 3, 10)
    G = christoffel(hyperbolic_metric(Chart.HALF_SPACE, 3), x)
    z = x[:, -1]
    np.testing.assert_allclose(G[:, 2, 0, 0], 1 / z, rtol=1e-12)
    np.testing.assert_allclose(G[:, 0, 0, 2], -1 / z, rtol=1e-12)
    np.testing.assert_allclose(G[:, 2, 2, 2], -1 / z, rtol=1e-12)
    np.testing.assert_allclose(G, np.swapaxes(G, -1, -2), atol=0)


def test_flat_metric_has_zero_curvature(rng):
    e = euclidean_metric(3)
    x = rng.uniform(-1, 1, (4, 3))
    assert np.max(np.abs(ricci_from_derivatives(*e.derivatives(x)))) == 0


def test_ricci_relative_matches_direct(rng):
    g = conformal_perturbation(3, 0.3, sigma=3.0, direction=[0.2, 0.1, -0.3])
    x = ball_points(rng, 3, 20, rmax=0.7)
    b = g.background
    direct = ricci(MetricField(3, Chart.BALL, Field(g.field.f)), x)
    rel = ricci_relative(g, x) + b.ricci(x)
    assert np.max(np.abs(direct - rel)) < 1e-6 * np.max(np.abs(direct))


def test_chart_point_accepted(rng):
    b = hyperbolic_metric(Chart.BALL, 3)
    p = ChartPoint(Chart.HALF_SPACE, [0.1, 0.2, 1.3])
    from ahmass.charts import transition

    np.testing.assert_allclose(
        christoffel(b, p), christoffel(b, transition(p.coords, Chart.HALF_SPACE, Chart.BALL)), rtol=1e-14
    )


def test_degenerate_metric():
    with pytest.raises(DegenerateMetricError):
        inverse_metric(np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_margin_error_near_boundary():
    b = MetricField(3, Chart.BALL, Field(hyperbolic_metric(Chart.BALL, 3).field.f))
    with pytest.raises(DomainMarginError):
        christoffel(b, np.array([0.0, 0.0, 1 - 1e-6]), h=1e-3)
