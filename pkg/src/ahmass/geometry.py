r"""Chart-based tensor calculus.

Fields are vectorised callables: a coordinate array of shape ``(..., n)``
maps to values of shape ``(..., *vshape)``.  Derivative arrays put the
differentiation indices right after the batch axes, so for a metric

* ``dg[..., k, i, j]`` is :math:`\partial_k g_{ij}`
* ``ddg[..., k, l, i, j]`` is :math:`\partial_k \partial_l g_{ij}`

Analytic derivatives are used when a field provides them; otherwise
fourth-order central differences with step ``1e-3`` times the chart's local
scale (``z`` in the half-space).  All stored tensors are fully covariant.
"""

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .charts import Chart, ChartPoint, transition
from .errors import DegenerateMetricError, DomainError, DomainMarginError

__all__ = [
    "Field",
    "MetricField",
    "fd_step",
    "fd_gradient",
    "fd_hessian",
    "inverse_metric",
    "christoffel",
    "christoffel_from_derivatives",
    "ricci",
    "ricci_from_derivatives",
    "scalar_curvature",
    "ricci_relative",
    "covariant_hessian",
    "killing_operator",
    "tensor_norm",
    "covector_norm",
]

REL_STEP = 1e-3
MARGIN_FACTOR = 10.0


@dataclass(frozen=True)
class Field:
    """A smooth function on a chart region, with optional analytic derivatives.

    ``d`` returns first derivatives (derivative axis first after the batch
    axes) and ``dd`` second derivatives.  Missing derivatives are computed by
    finite differences.
    """

    f: Callable
    d: Optional[Callable] = None
    dd: Optional[Callable] = None

    def __call__(self, x):
        return self.f(x)

    def grad(self, x, h):
        if self.d is not None:
            return self.d(x)
        return fd_gradient(self.f, x, h)

    def hess(self, x, h):
        if self.dd is not None:
            return self.dd(x)
        if self.d is not None:
            return fd_gradient(self.d, x, h)
        return fd_hessian(self.f, x, h)


ScalarField = CovectorField = VectorField = SymTensorField = Field


@dataclass(frozen=True)
class MetricField:
    """A Riemannian metric on one chart.

    ``ricci`` may register a closed-form Ricci tensor.  A metric built by
    :meth:`perturb` keeps its ``background`` and the ``perturbation`` field
    separately, so derivatives of the background stay analytic and only the
    (small) perturbation is differenced.
    """

    dim: int
    chart: Chart
    field: Field
    ricci: Optional[Callable] = None
    background: Optional["MetricField"] = None
    perturbation: Optional[Field] = None
    name: str = "metric"

    def __call__(self, x):
        return self.field(x)

    @property
    def deriv_order(self):
        if self.field.dd is not None:
            return 2
        return 1 if self.field.d is not None else 0

    def gradient(self, x, h):
        if self.field.d is None and self.background is not None:
            return self.background.gradient(x, h) + self.perturbation.grad(x, h)
        return self.field.grad(x, h)

    def hessian(self, x, h):
        if self.field.dd is None and self.background is not None:
            return self.background.hessian(x, h) + self.perturbation.hess(x, h)
        return self.field.hess(x, h)

    def derivatives(self, x, h=None):
        """Return ``(g, dg, ddg)`` at ``x``."""
        x = np.asarray(x)
        if h is None:
            h = fd_step(self.chart, x)
        return self.field(x), self.gradient(x, h), self.hessian(x, h)

    def perturb(self, e, de=None, dde=None, name=None):
        """Return ``self + e`` where ``e`` is a symmetric-tensor field."""
        pert = e if isinstance(e, Field) else Field(e, de, dde)
        bg = self

        def g(x):
            return bg.field(x) + pert(x)

        return MetricField(
            self.dim, self.chart, Field(g), background=self, perturbation=pert,
            name=name or f"{self.name}+perturbation",
        )

    def without_closed_forms(self):
        """Copy that ignores the registered Ricci tensor (for cross-checks)."""
        return replace(self, ricci=None)


# ---------------------------------------------------------------------------
# finite differences


def fd_step(chart, x, rel=REL_STEP):
    """Default finite-difference step at ``x`` (same batch shape as ``x``)."""
    return rel * chart.scale(np.asarray(x))


def check_margin(chart, x, h):
    """Refuse points whose stencils (radius ``2h``) could leave the chart."""
    margin = chart.margin(x)
    if np.any(~(margin > 0)):
        raise DomainError(f"point outside the {chart.value} chart domain")
    if np.any(margin < MARGIN_FACTOR * np.asarray(h)):
        raise DomainMarginError(
            f"point within {MARGIN_FACTOR:g} steps of the {chart.value} chart boundary"
        )


def _shift(x, h, a, k):
    y = np.array(x, dtype=np.result_type(x, float), copy=True)
    y[..., a] = y[..., a] + k * h
    return y


def _expand(h, val):
    h = np.asarray(h)
    return h.reshape(h.shape + (1,) * (val.ndim - h.ndim))


def fd_gradient(f, x, h):
    """Fourth-order central first derivatives, derivative axis after the batch."""
    x = np.asarray(x)
    h = np.broadcast_to(np.asarray(h, dtype=float), x.shape[:-1])
    out = []
    for a in range(x.shape[-1]):
        val = (
            -f(_shift(x, h, a, 2)) + 8 * f(_shift(x, h, a, 1))
            - 8 * f(_shift(x, h, a, -1)) + f(_shift(x, h, a, -2))
        )
        out.append(val / (12 * _expand(h, val)))
    return np.stack(out, axis=x.ndim - 1)


def fd_hessian(f, x, h):
    """Fourth-order central second derivatives (16-point mixed stencil)."""
    x = np.asarray(x)
    n = x.shape[-1]
    h = np.broadcast_to(np.asarray(h, dtype=float), x.shape[:-1])
    f0 = f(x)
    hh = _expand(h, f0) ** 2
    rows = [[None] * n for _ in range(n)]
    coef = {2: -1.0, 1: 8.0, -1: -8.0, -2: 1.0}
    for a in range(n):
        rows[a][a] = (
            -f(_shift(x, h, a, 2)) + 16 * f(_shift(x, h, a, 1)) - 30 * f0
            + 16 * f(_shift(x, h, a, -1)) - f(_shift(x, h, a, -2))
        ) / (12 * hh)
        for b in range(a + 1, n):
            acc = 0.0
            for i, ci in coef.items():
                xa = _shift(x, h, a, i)
                for j, cj in coef.items():
                    acc = acc + ci * cj * f(_shift(xa, h, b, j))
            rows[a][b] = rows[b][a] = acc / (144 * hh)
    axis = x.ndim - 1
    return np.stack([np.stack(r, axis=axis) for r in rows], axis=axis)


# ---------------------------------------------------------------------------
# curvature


def _coords(metric, p):
    if isinstance(p, ChartPoint):
        if p.chart is metric.chart:
            return p.coords
        return transition(p.coords, p.chart, metric.chart)
    return np.asarray(p)


def inverse_metric(g):
    """Inverse of a batch of metric matrices.

    Raises :class:`DegenerateMetricError` when a matrix is singular, which is
    detected with Hadamard's ratio ``|det g| / prod |g_ii|``.
    """
    diag = np.abs(np.diagonal(g, axis1=-2, axis2=-1))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.abs(np.linalg.det(g)) / np.prod(diag, axis=-1)
    if np.any(~np.isfinite(ratio)) or np.any(ratio < 1e-14):
        raise DegenerateMetricError("singular metric matrix")
    return np.linalg.inv(g)


def _sym_dg(dg):
    return 0.5 * (dg + np.swapaxes(dg, -1, -2))


def _lowered_christoffel(dg):
    # S[i, j, l] = d_i g_jl + d_j g_il - d_l g_ij
    return dg + np.swapaxes(dg, -3, -2) - np.moveaxis(dg, -3, -1)


def christoffel_from_derivatives(g, dg, ginv=None):
    if ginv is None:
        ginv = inverse_metric(g)
    return 0.5 * np.einsum("...kl,...ijl->...kij", ginv, _lowered_christoffel(_sym_dg(dg)))


def christoffel(metric, p, h=None):
    """Christoffel symbols ``G[..., k, i, j]`` of ``metric`` at ``p``."""
    x = _coords(metric, p)
    h = fd_step(metric.chart, x) if h is None else h
    check_margin(metric.chart, x, h)
    return christoffel_from_derivatives(metric(x), metric.gradient(x, h))


def ricci_from_derivatives(g, dg, ddg):
    """Ricci tensor from the metric and its first two derivatives."""
    ginv = inverse_metric(g)
    dg = _sym_dg(dg)
    ddg = 0.5 * (ddg + np.swapaxes(ddg, -1, -2))
    ddg = 0.5 * (ddg + np.swapaxes(ddg, -3, -4))
    S = _lowered_christoffel(dg)
    G = 0.5 * np.einsum("...kl,...ijl->...kij", ginv, S)
    dginv = -np.einsum("...ka,...mab,...bl->...mkl", ginv, dg, ginv)
    dS = ddg + np.swapaxes(ddg, -3, -2) - np.moveaxis(ddg, -3, -1)
    dG = 0.5 * (
        np.einsum("...mkl,...ijl->...mkij", dginv, S)
        + np.einsum("...kl,...mijl->...mkij", ginv, dS)
    )
    R = (
        np.einsum("...kkij->...ij", dG)
        - np.einsum("...jkik->...ij", dG)
        + np.einsum("...kkl,...lij->...ij", G, G)
        - np.einsum("...kjl,...lik->...ij", G, G)
    )
    return 0.5 * (R + np.swapaxes(R, -1, -2))


def _ricci_at(metric, x, h):
    if metric.ricci is not None:
        return metric.ricci(x)
    return ricci_from_derivatives(*metric.derivatives(x, h))


def ricci(metric, p, h=None):
    """Ricci tensor ``R_ij`` of ``metric`` at ``p`` (closed form if registered)."""
    x = _coords(metric, p)
    h = fd_step(metric.chart, x) if h is None else h
    check_margin(metric.chart, x, h)
    return _ricci_at(metric, x, h)


def scalar_curvature(metric, p, h=None):
    """Return ``(R_ij, R)`` with ``R = g^ij R_ij``."""
    x = _coords(metric, p)
    Ric = ricci(metric, x, h)
    return Ric, np.einsum("...ij,...ij->...", inverse_metric(metric(x)), Ric)


def _background_covariant(Gb, dGb, e, de, dde):
    """First and second covariant derivatives of ``e`` w.r.t. the background."""
    # D1[i, j, l] = nabla_i e_jl
    D1 = de - np.einsum("...aij,...al->...ijl", Gb, e) - np.einsum("...ail,...ja->...ijl", Gb, e)
    # d_m of D1
    dD1 = (
        dde
        - np.einsum("...maij,...al->...mijl", dGb, e)
        - np.einsum("...aij,...mal->...mijl", Gb, de)
        - np.einsum("...mail,...ja->...mijl", dGb, e)
        - np.einsum("...ail,...mja->...mijl", Gb, de)
    )
    D2 = (
        dD1
        - np.einsum("...ami,...ajl->...mijl", Gb, D1)
        - np.einsum("...amj,...ial->...mijl", Gb, D1)
        - np.einsum("...aml,...ija->...mijl", Gb, D1)
    )
    return D1, D2


def ricci_relative(metric, p, h=None):
    r"""``Ric(g) - Ric(b)`` for a perturbed metric ``g = b + e``.

    Uses the difference tensor :math:`C = \Gamma(g) - \Gamma(b)`, built from
    background-covariant derivatives of ``e``, so nothing of the size of the
    background curvature is ever subtracted.  This is what keeps the
    trace-free Ricci tensor accurate far out in the asymptotic region.
    """
    if metric.background is None:
        raise ValueError("ricci_relative needs a metric built with MetricField.perturb")
    x = _coords(metric, p)
    h = fd_step(metric.chart, x) if h is None else h
    check_margin(metric.chart, x, h)
    b, db, ddb = metric.background.derivatives(x, h)
    e = metric.perturbation
    ev, de, dde = e(x), e.grad(x, h), e.hess(x, h)
    ev = 0.5 * (ev + np.swapaxes(ev, -1, -2))
    de, dde = _sym_dg(de), 0.5 * (dde + np.swapaxes(dde, -1, -2))
    dde = 0.5 * (dde + np.swapaxes(dde, -3, -4))

    binv = inverse_metric(b)
    db = _sym_dg(db)
    Gb = 0.5 * np.einsum("...kl,...ijl->...kij", binv, _lowered_christoffel(db))
    dbinv = -np.einsum("...ka,...mab,...bl->...mkl", binv, db, binv)
    Sb = _lowered_christoffel(db)
    dSb = ddb + np.swapaxes(ddb, -3, -2) - np.moveaxis(ddb, -3, -1)
    dGb = 0.5 * (
        np.einsum("...mkl,...ijl->...mkij", dbinv, Sb)
        + np.einsum("...kl,...mijl->...mkij", binv, dSb)
    )

    D1, D2 = _background_covariant(Gb, dGb, ev, de, dde)
    ginv = inverse_metric(b + ev)
    S = D1 + np.swapaxes(D1, -3, -2) - np.moveaxis(D1, -3, -1)
    C = 0.5 * np.einsum("...kl,...ijl->...kij", ginv, S)
    # nabla_m g^{kl} = -g^{ka} nabla_m e_ab g^{bl}
    Dginv = -np.einsum("...ka,...mab,...bl->...mkl", ginv, D1, ginv)
    DS = D2 + np.swapaxes(D2, -3, -2) - np.moveaxis(D2, -3, -1)
    DC = 0.5 * (
        np.einsum("...mkl,...ijl->...mkij", Dginv, S)
        + np.einsum("...kl,...mijl->...mkij", ginv, DS)
    )
    R = (
        np.einsum("...kkij->...ij", DC)
        - np.einsum("...jkki->...ij", DC)
        + np.einsum("...kkl,...lij->...ij", C, C)
        - np.einsum("...kjl,...lki->...ij", C, C)
    )
    return 0.5 * (R + np.swapaxes(R, -1, -2))


def covariant_hessian(metric, N, p, h=None):
    """``(nabla nabla N)_ij = d_i d_j N - G^k_ij d_k N``."""
    x = _coords(metric, p)
    h = fd_step(metric.chart, x) if h is None else h
    check_margin(metric.chart, x, h)
    G = christoffel(metric, x, h)
    return N.hess(x, h) - np.einsum("...kij,...k->...ij", G, N.grad(x, h))


def killing_operator(metric, Y, p, h=None):
    """``nabla_a Y_b + nabla_b Y_a`` for a covector field ``Y``."""
    x = _coords(metric, p)
    h = fd_step(metric.chart, x) if h is None else h
    check_margin(metric.chart, x, h)
    G = christoffel(metric, x, h)
    J = Y.grad(x, h)  # J[a, b] = d_a Y_b
    GY = np.einsum("...kab,...k->...ab", G, Y(x))
    return J + np.swapaxes(J, -1, -2) - 2 * GY


def tensor_norm(T, g):
    """Pointwise norm of a covariant 2-tensor, ``sqrt(g^ik g^jl T_ij T_kl)``."""
    ginv = inverse_metric(g)
    return np.sqrt(np.abs(np.einsum("...ik,...jl,...ij,...kl->...", ginv, ginv, T, T)))


def covector_norm(J, g):
    ginv = inverse_metric(g)
    return np.sqrt(np.abs(np.einsum("...ij,...i,...j->...", ginv, J, J)))
