import numpy as np
import pytest

from ahmass.extrapolation import richardson, richardson_table
from ahmass.quadrature import default_quadrature, monte_carlo, product_gauss, sphere_area

from oracles import sphere_moment_oracle


@pytest.mark.parametrize("n", [3, 4])
def test_product_gauss_exactness(n):
    q = product_gauss(n, 12)
    x = q.nodes
    area = sphere_area(n)
    assert q.integrate(np.ones(len(q))) == pytest.approx(area, rel=1e-12)
    for i in range(n):
        assert abs(q.integrate(x[:, i])) < 1e-10
        for j in range(n):
            expect = area / n if i == j else 0.0
            assert abs(q.integrate(x[:, i] * x[:, j]) - expect) < 1e-10
    assert abs(q.integrate(x[:, 0] ** 4) - sphere_moment_oracle(n, [4])) < 1e-10
    mixed = [2] + [0] * (n - 2) + [2]
    assert abs(q.integrate(x[:, 0] ** 2 * x[:, -1] ** 2) - sphere_moment_oracle(n, mixed)) < 1e-10


def test_hemispheres_partition_the_rule():
    q = product_gauss(3, 8)
    up, lo = q.restrict("upper"), q.restrict("lower")
    assert len(up) + len(lo) == len(q)
    assert np.all(up.nodes[:, -1] > 0) and np.all(lo.nodes[:, -1] < 0)
    f = np.exp(q.nodes[:, 0] + 2 * q.nodes[:, 2])
    assert up.integrate(f[q.half == 1]) + lo.integrate(f[q.half == -1]) == pytest.approx(q.integrate(f), rel=1e-14)


def test_monte_carlo_antithetic_and_error():
    q = monte_carlo(5, 20000, seed=3)
    np.testing.assert_allclose(q.nodes[0::2], -q.nodes[1::2])
    assert q.integrate(q.nodes[:, 0]) == pytest.approx(0, abs=1e-12)
    f = q.nodes[:, 0] ** 2
    err = q.standard_error(f)
    assert err > 0
    assert abs(q.integrate(f) - sphere_area(5) / 5) < 5 * err


def test_default_quadrature_choice():
    assert default_quadrature(4).kind == "product-gauss"
    assert default_quadrature(5, samples=1000).kind == "monte-carlo"


def test_richardson_removes_inverse_powers():
    r = 2.0 ** np.arange(3, 9)
    values = 3.0 + 2 / r - 5 / r**2 + 7 / r**3
    limit, err, diag = richardson(values, r)
    assert limit == pytest.approx(3.0, abs=1e-12)
    assert err < 1e-12
    T = richardson_table(values, r)
    assert np.isnan(T[0, 1])
