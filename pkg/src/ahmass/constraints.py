r"""Einstein constraint operator, energy conditions and graph initial data.

Conventions (``kappa = 1``):

.. math::

    \rho = \tfrac12\big(R(g) - |K|_g^2 + (\mathrm{tr}_g K)^2 - 2\Lambda\big),
    \qquad
    J_j = D^i\big(K_{ij} - \mathrm{tr}_g K\, g_{ij}\big).

The dominant energy condition is ``rho >= |J|_g``.  Second fundamental
forms of graphs in Minkowski space are taken with respect to the
future-pointing unit normal, so the lower hyperboloid has ``K = -g``.
"""

import csv
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .charts import Chart
from .errors import ConstructionError, NotSpacelikeError
from .geometry import (
    Field,
    MetricField,
    christoffel_from_derivatives,
    fd_step,
    inverse_metric,
    ricci_from_derivatives,
    tensor_norm,
    covector_norm,
)
from .models import smooth_step

__all__ = [
    "ah_lambda",
    "InitialDataSet",
    "ConstraintValues",
    "zero_tensor",
    "constraint_operator",
    "dec_check",
    "ah_to_ae_shift",
    "GraphHypersurface",
    "graph_data",
    "graph_initial_data",
    "hyperboloid_graph",
    "random_trig_graph",
    "interpolating_graph",
    "modified_constraint",
    "modified_linearization",
    "interpolation_mismatch",
    "cutoff",
    "slack_function",
    "slack_constant",
    "slack_inequality",
    "weighted_test_pair",
    "write_constraint_csv",
]


def ah_lambda(n):
    """Cosmological constant ``-n(n-1)/2`` of asymptotically hyperbolic data."""
    return -n * (n - 1) / 2


class _Combination:
    """Linear combination ``sum c_k F_k`` of tensor fields.

    Derivatives combine the summands' own derivatives, so analytic pieces
    stay analytic.  Items are ``(coef, field)``; a field is either a
    :class:`Field` or a :class:`MetricField`.
    """

    def __init__(self, items):
        self.items = list(items)

    def __call__(self, x):
        return sum(c * f(x) for c, f in self.items)

    def grad(self, x, h):
        return sum(c * _grad(f, x, h) for c, f in self.items)

    def hess(self, x, h):
        return sum(c * _hess(f, x, h) for c, f in self.items)


def _as_field(f):
    if isinstance(f, (Field, MetricField, _Combination)):
        return f
    return Field(f)


def _grad(f, x, h):
    return f.gradient(x, h) if isinstance(f, MetricField) else f.grad(x, h)


def _hess(f, x, h):
    return f.hessian(x, h) if isinstance(f, MetricField) else f.hess(x, h)


def zero_tensor(n):
    """The zero symmetric 2-tensor field with exact (zero) derivatives."""

    def f(x):
        return np.zeros(np.shape(x)[:-1] + (n, n))

    def d(x):
        return np.zeros(np.shape(x)[:-1] + (n, n, n))

    return Field(f, d)


@dataclass(frozen=True)
class InitialDataSet:
    """Initial data ``(g, K)`` with cosmological constant ``lambda_cosm``."""

    g: MetricField
    K: object
    lambda_cosm: float = 0.0
    name: str = "data"

    def __post_init__(self):
        n = self.g.dim
        allowed = (0.0, ah_lambda(n))
        if not any(abs(self.lambda_cosm - a) < 1e-12 for a in allowed):
            raise ValueError(f"cosmological constant must be 0 or {ah_lambda(n)}")
        object.__setattr__(self, "K", _as_field(self.K))

    @property
    def dim(self):
        return self.g.dim

    @property
    def chart(self):
        return self.g.chart


@dataclass
class ConstraintValues:
    """Energy density ``rho``, momentum density ``J`` and the metric they live on."""

    rho: np.ndarray
    J: np.ndarray
    g: Optional[np.ndarray] = None

    @property
    def J_norm(self):
        if self.g is None:
            return np.linalg.norm(self.J, axis=-1)
        return covector_norm(self.J, self.g)

    def dec(self, tol=0.0):
        return dec_check(self, tol=tol)


def _covariant_K(G, K, dK):
    # D[k, i, j] = nabla_k K_ij
    return (
        dK
        - np.einsum("...lki,...lj->...kij", G, K)
        - np.einsum("...lkj,...il->...kij", G, K)
    )


def constraint_operator(data, p, h=None):
    """``(rho, J)`` at coordinates ``p`` (batched) of the data's chart."""
    x = np.asarray(p)
    h = fd_step(data.chart, x) if h is None else h
    g, dg, ddg = data.g.derivatives(x, h)
    ginv = inverse_metric(g)
    Ric = data.g.ricci(x) if data.g.ricci is not None else ricci_from_derivatives(g, dg, ddg)
    R = np.einsum("...ij,...ij->...", ginv, Ric)
    K = data.K(x)
    dK = data.K.grad(x, h)
    Kup = np.einsum("...ia,...aj->...ij", ginv, K)
    trK = np.trace(Kup, axis1=-2, axis2=-1)
    K2 = np.einsum("...ij,...ji->...", Kup, Kup)
    rho = 0.5 * (R - K2 + trK**2 - 2 * data.lambda_cosm)
    G = christoffel_from_derivatives(g, dg, ginv)
    D = _covariant_K(G, K, dK)
    div = np.einsum("...ki,...kij->...j", ginv, D)
    dtr = np.einsum("...ab,...jab->...j", ginv, D)
    return ConstraintValues(rho, div - dtr, g)


def dec_check(cv, g=None, tol=0.0):
    """``rho >= |J|_g - tol`` (elementwise for batched values)."""
    if g is not None:
        cv = ConstraintValues(cv.rho, cv.J, g)
    return np.asarray(cv.rho) >= cv.J_norm - tol


def ah_to_ae_shift(data):
    """``(g, K, -n(n-1)/2) -> (g, K - g, 0)``.

    ``J`` is unchanged because ``g`` is parallel.  ``rho`` changes by
    ``(1 - n) tr_g K``, so it is preserved exactly when ``K`` is traceless
    (in particular for ``K = 0``).
    """
    n = data.dim
    if abs(data.lambda_cosm - ah_lambda(n)) > 1e-12:
        raise ValueError("the shift applies to data with cosmological constant -n(n-1)/2")
    K2 = _Combination([(1.0, data.K), (-1.0, data.g)])
    return InitialDataSet(data.g, K2, 0.0, name=f"{data.name}, shifted")


# ---------------------------------------------------------------------------
# graphs in Minkowski space


@dataclass(frozen=True)
class GraphHypersurface:
    """The graph ``t = f(x)`` in Minkowski space, with ``f`` a :class:`Field`.

    ``f.d`` and ``f.dd`` should be given analytically; otherwise they are
    computed by finite differences in the Euclidean chart.
    """

    f: Field
    dim: int
    name: str = "graph"
    outer_radius: Optional[float] = None
    slope_margin: Optional[float] = None

    def slope(self, x):
        """``|df|`` at ``x``."""
        return np.linalg.norm(self.f.grad(np.asarray(x), fd_step(Chart.EUCLIDEAN, x)), axis=-1)


def _graph_parts(hyp, x, h):
    df = hyp.f.grad(x, h)
    s = np.sum(df * df, axis=-1)
    if np.any(s >= 1):
        raise NotSpacelikeError(f"graph is not spacelike: max |df| = {np.sqrt(np.max(s)):.6g}")
    return df, hyp.f.hess(x, h), np.sqrt(1 - s)


def graph_data(hyp, p):
    """Induced metric ``delta - df df`` and ``K = dd f / sqrt(1 - |df|^2)``."""
    x = np.asarray(p, float)
    h = fd_step(Chart.EUCLIDEAN, x)
    df, ddf, lapse = _graph_parts(hyp, x, h)
    n = hyp.dim
    g = np.eye(n) - np.einsum("...i,...j->...ij", df, df)
    return g, ddf / lapse[..., None, None]


def graph_initial_data(hyp):
    """Vacuum initial data ``(g, K, 0)`` on the Euclidean chart."""
    n = hyp.dim

    def g(x):
        return graph_data(hyp, x)[0]

    def dg(x):
        df, ddf, _ = _graph_parts(hyp, x, fd_step(Chart.EUCLIDEAN, x))
        # d_k g_ij = -(f_ki f_j + f_i f_kj)
        t = np.einsum("...ki,...j->...kij", ddf, df)
        return -(t + np.swapaxes(t, -1, -2))

    def K(x):
        return graph_data(hyp, x)[1]

    metric = MetricField(n, Chart.EUCLIDEAN, Field(g, dg), name=f"induced({hyp.name})")
    return InitialDataSet(metric, Field(K), 0.0, name=hyp.name)


def hyperboloid_graph(n):
    """``f = -sqrt(1 + |x|^2)``, whose induced data is ``(b, -b)``."""

    def f(x):
        return -np.sqrt(1 + np.sum(x * x, axis=-1))

    def d(x):
        return x / f(x)[..., None]

    def dd(x):
        w = -f(x)
        return -(np.eye(n) / w[..., None, None] - np.einsum("...i,...j->...ij", x, x) / w[..., None, None] ** 3)

    return GraphHypersurface(Field(f, d, dd), n, "hyperboloid")


def random_trig_graph(n, rng, terms=4, max_slope=0.9, max_wavenumber=2.0):
    """Random trigonometric polynomial ``f`` with ``|df| <= max_slope`` everywhere.

    ``f = sum_k a_k sin(k.x + phi_k) + c``; the amplitudes are rescaled so
    that ``sum |a_k| |k| = max_slope``, which bounds the slope globally.
    """
    ks = rng.uniform(-max_wavenumber, max_wavenumber, (terms, n))
    a = rng.standard_normal(terms)
    phase = rng.uniform(0, 2 * np.pi, terms)
    a *= max_slope / np.sum(np.abs(a) * np.linalg.norm(ks, axis=1))
    c = rng.standard_normal()

    def arg(x):
        return x @ ks.T + phase

    def f(x):
        return np.sin(arg(x)) @ a + c

    def d(x):
        return (np.cos(arg(x)) * a) @ ks

    def dd(x):
        return -np.einsum("...t,ti,tj->...ij", np.sin(arg(x)) * a, ks, ks)

    return GraphHypersurface(Field(f, d, dd), n, "trigonometric graph")


def _smooth_step_derivative(t):
    t = np.asarray(t, float)
    inside = (t > 0) & (t < 1)
    u = np.where(inside, t, 0.5)
    a, c = np.exp(-1 / u), np.exp(-1 / (1 - u))
    val = a * c * (1 / u**2 + 1 / (1 - u) ** 2) / (a + c) ** 2
    return np.where(inside, val, 0.0)


def interpolating_graph(R, n=3, width=2.0, grid=4001):
    """Graph equal to the lower hyperboloid for ``|x| <= R + 1`` and constant far out.

    The slope is blended rather than the height: ``f'(r) = -r/sqrt(1+r^2) *
    (1 - s((r - R - 1)/width))`` with ``s`` the smooth step, integrated
    outward.  Since ``|f'|`` never exceeds the hyperboloid slope the graph
    is spacelike by construction; a radial grid check guards the
    construction anyway and records the slope margin.  Constant for
    ``|x| >= R + 1 + width``.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    r0 = R + 1.0
    L = width

    def slope(r):
        return -r / np.sqrt(1 + r * r) * (1 - smooth_step((r - r0) / L))

    r_grid = np.linspace(0, r0 + L + 1, grid)
    worst = np.abs(slope(r_grid))
    if not np.max(worst) < 1:
        k = int(np.argmax(worst))
        raise ConstructionError("interpolating graph is not spacelike", radius=float(r_grid[k]))

    def f_radial(r):
        r = np.asarray(r, float)
        out = -np.sqrt(1 + np.minimum(r, r0) ** 2)
        for idx in zip(*np.nonzero(r > r0)):
            out[idx] += quad(slope, r0, min(r[idx], r0 + L))[0]
        return out

    def d2_radial(r):
        t = (r - r0) / L
        hyp1 = -r / np.sqrt(1 + r * r)
        hyp2 = -1 / (1 + r * r) ** 1.5
        return hyp2 * (1 - smooth_step(t)) - hyp1 * _smooth_step_derivative(t) / L

    def f(x):
        return f_radial(np.linalg.norm(x, axis=-1))

    def d(x):
        r = np.linalg.norm(x, axis=-1)[..., None]
        inner = -x / np.sqrt(1 + r * r)
        with np.errstate(invalid="ignore", divide="ignore"):
            outer = slope(r) * x / r
        return np.where(r <= r0, inner, outer)

    def dd(x):
        r = np.linalg.norm(x, axis=-1)
        inner = hyperboloid_graph(n).f.dd(x)
        safe = np.where(r > 0, r, 1.0)
        u = x / safe[..., None]
        uu = np.einsum("...i,...j->...ij", u, u)
        outer = d2_radial(r)[..., None, None] * uu + (slope(r) / safe)[..., None, None] * (np.eye(n) - uu)
        return np.where((r <= r0)[..., None, None], inner, outer)

    return GraphHypersurface(
        Field(f, d, dd), n, f"interpolating graph (R={R:g})",
        outer_radius=r0 + L, slope_margin=float(1 - np.max(worst)),
    )


# ---------------------------------------------------------------------------
# the algebraic layer of the gluing argument


def _lower(dg, g, Z):
    # (dg . Z)_i = dg_ij g^jk Z_k
    return np.einsum("...ij,...jk,...k->...i", dg, inverse_metric(g), Z)


def _perturbed(data, dK, dg):
    return InitialDataSet(
        data.g.perturb(_as_field(dg)),
        _Combination([(1.0, data.K), (1.0, _as_field(dK))]),
        data.lambda_cosm,
    )


def modified_constraint(data, dK, dg, W=None, p=None, h=None):
    """Pointwise ``C^W(K + dK, g + dg) - C^W(K, g)`` with the recentring term.

    Returns a :class:`ConstraintValues` holding ``(delta rho, delta J)``
    where ``delta J = J(K+dK, g+dg) - J(K, g) - (dg . (J + W))/2``.
    ``dK`` and ``dg`` are tensor fields, ``W`` a covector field or ``None``.
    """
    x = np.asarray(p)
    h = fd_step(data.chart, x) if h is None else h
    # both terms go through the same perturbed-metric path, so a zero
    # perturbation cancels exactly
    zero = zero_tensor(data.dim)
    base = constraint_operator(_perturbed(data, zero, zero), x, h)
    new = constraint_operator(_perturbed(data, dK, dg), x, h)
    Wx = 0.0 if W is None else W(x)
    shift = 0.5 * _lower(_as_field(dg)(x), base.g, base.J + Wx)
    return ConstraintValues(new.rho - base.rho, new.J - base.J - shift, base.g)


def _scaled(f, t):
    f = _as_field(f)
    return _Combination([(t, f)])


def modified_linearization(data, dK, dg, W=None, p=None, h=None, step=1e-30):
    """Derivative at ``t = 0`` of ``t -> modified_constraint(t dK, t dg)``.

    Computed by the complex-step method, which is exact up to rounding for
    the discretised operator and so serves as the reference for finite
    differences in ``t``.
    """
    out = modified_constraint(data, _scaled(dK, 1j * step), _scaled(dg, 1j * step), W, p, h)
    return ConstraintValues(out.rho.imag / step, out.J.imag / step, out.g.real)


def _blend(data1, data2, chi):
    chi = _as_field(chi)

    def combo(f1, f2):
        def val(x):
            c = chi(x)[..., None, None]
            return c * f1(x) + (1 - c) * f2(x)

        return Field(val)

    g = MetricField(data1.dim, data1.chart, combo(data1.g, data2.g), name="blend")
    return InitialDataSet(g, combo(data1.K, data2.K), data1.lambda_cosm)


def interpolation_mismatch(data1, data2, chi, p, slack=0.0, h=None):
    """``chi C(K1,g1) + (1-chi) C(K2,g2) - C(K,g) + (0, slack)`` at ``p``.

    ``(g, K)`` is the ``chi``-combination of the two data sets, ``chi`` a
    scalar field and ``slack`` the value of ``(delta rho)_0`` at ``p``.
    Returns :class:`ConstraintValues` ``(delta rho, delta J)``.
    """
    x = np.asarray(p)
    h = fd_step(data1.chart, x) if h is None else h
    c = _as_field(chi)(x)
    c1 = constraint_operator(data1, x, h)
    c2 = constraint_operator(data2, x, h)
    cb = constraint_operator(_blend(data1, data2, chi), x, h)
    rho = c * c1.rho + (1 - c) * c2.rho - cb.rho + slack
    J = c[..., None] * c1.J + (1 - c[..., None]) * c2.J - cb.J
    return ConstraintValues(rho, J, cb.g)


def cutoff(axis=0, center=0.0, width=1.0):
    """Smooth cutoff ``chi(x) = s((x^axis - center)/width + 1/2)`` with values in [0, 1]."""

    def chi(x):
        return smooth_step((np.asarray(x)[..., axis] - center) / width + 0.5)

    return Field(chi)


def slack_function(chi, z, sigma, c):
    """``(delta rho)_0 = c chi (1 - chi) z^sigma``."""
    if not c > 0 or np.any(np.asarray(z) <= 0):
        raise ValueError("need c > 0 and z > 0")
    chi = np.asarray(chi, float)
    return c * chi * (1 - chi) * np.asarray(z, float) ** sigma


def slack_constant(c_prime, lam, sigma_prime):
    """``c = c' lambda^sigma'``."""
    return c_prime * lam**sigma_prime


def slack_inequality(data1, data2, chi, c, sigma, points, h=None):
    """Check ``(delta rho)_0 >= chi(1-chi)(|g1-g2|_{g1}|J1|_{g1} + |g1-g2|_{g2}|J2|_{g2})``.

    ``points`` are half-space coordinates (``z`` last).  Returns
    ``(holds, lhs, rhs)`` with elementwise arrays.
    """
    x = np.asarray(points, float)
    h = fd_step(data1.chart, x) if h is None else h
    chi_x = _as_field(chi)(x)
    c1 = constraint_operator(data1, x, h)
    c2 = constraint_operator(data2, x, h)
    diff = c1.g - c2.g
    rhs = chi_x * (1 - chi_x) * (
        tensor_norm(diff, c1.g) * c1.J_norm + tensor_norm(diff, c2.g) * c2.J_norm
    )
    lhs = slack_function(chi_x, x[..., -1], sigma, c)
    return bool(np.all(lhs >= rhs)), lhs, rhs


def weighted_test_pair(n, lam, sigma, seed=0, amplitude=1.0):
    """Two data sets on the half-space with ``g_i - b, K_i = O(lambda^sigma z^sigma)``.

    ``g_i = (1 + lambda^sigma z^sigma phi_i(w)) b`` and
    ``K_i = lambda^sigma z^sigma psi_i(w) b`` with seeded trigonometric
    ``phi_i, psi_i`` of size ``amplitude``.  Both carry ``Lambda = -n(n-1)/2``.
    """
    from .models import hyperbolic_metric

    rng = np.random.default_rng(seed)
    b = hyperbolic_metric(Chart.HALF_SPACE, n)
    out = []
    for _ in range(2):
        kphi, kpsi = rng.uniform(-1, 1, (2, n - 1))
        pphi, ppsi = rng.uniform(0, 2 * np.pi, 2)

        def weight(x, k, ph):
            return amplitude * (lam * x[..., -1]) ** sigma * np.cos(x[..., :-1] @ k + ph)

        def e(x, k=kphi, ph=pphi):
            return weight(x, k, ph)[..., None, None] * b(x)

        def K(x, k=kpsi, ph=ppsi):
            return weight(x, k, ph)[..., None, None] * b(x)

        out.append(InitialDataSet(b.perturb(e), Field(K), ah_lambda(n), name="weighted"))
    return tuple(out)


def write_constraint_csv(points, values, fh, tol=0.0):
    """Rows of point coordinates, ``rho``, ``|J|_g`` and the DEC flag."""
    pts = np.atleast_2d(points)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow([f"x{i}" for i in range(pts.shape[1])] + ["rho", "J_norm", "dec"])
    flags = dec_check(values, tol=tol)
    for x, r, j, ok in zip(pts, np.ravel(values.rho), np.ravel(values.J_norm), np.ravel(flags)):
        w.writerow([repr(float(a)) for a in x] + [repr(float(r)), repr(float(j)), int(bool(ok))])
