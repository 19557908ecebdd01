"""Explicit models of hyperbolic space and the fields living on them.

The static KIDs and Killing one-forms are written in the half-space chart,
where they have short closed forms, and are carried to other charts by
composition with :func:`ahmass.charts.transition`.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .charts import Chart, transition
from .errors import ConfigError, DomainError, NotKillingError
from .geometry import Field, MetricField, fd_step

__all__ = [
    "hyperbolic_metric",
    "euclidean_metric",
    "static_kid",
    "static_kids",
    "killing_form",
    "killing_basis",
    "dilation_field",
    "DecaySpec",
    "schwarzschild_ads",
    "conformal_perturbation",
    "smooth_step",
]


def _eye(x, n):
    return np.broadcast_to(np.eye(n), x.shape[:-1] + (n, n))


def euclidean_metric(n, chart=Chart.EUCLIDEAN):
    """The flat metric ``delta`` in Cartesian coordinates of ``chart``."""

    def g(x):
        return _eye(np.asarray(x), n).copy()

    def dg(x):
        return np.zeros(np.shape(x)[:-1] + (n, n, n))

    def ddg(x):
        return np.zeros(np.shape(x)[:-1] + (n, n, n, n))

    def ric(x):
        return np.zeros(np.shape(x)[:-1] + (n, n))

    return MetricField(n, chart, Field(g, dg, ddg), ricci=ric, name="euclidean")


def _half_space(n):
    def g(x):
        z = x[..., -1]
        return _eye(x, n) / (z * z)[..., None, None]

    def dg(x):
        z = x[..., -1]
        out = np.zeros(x.shape[:-1] + (n, n, n))
        out[..., -1, :, :] = -2 * _eye(x, n) / (z**3)[..., None, None]
        return out

    def ddg(x):
        z = x[..., -1]
        out = np.zeros(x.shape[:-1] + (n, n, n, n))
        out[..., -1, -1, :, :] = 6 * _eye(x, n) / (z**4)[..., None, None]
        return out

    return g, dg, ddg


def _ball(n):
    def g(x):
        s = np.sum(x * x, axis=-1)
        return 4 * _eye(x, n) / ((1 - s) ** 2)[..., None, None]

    def dg(x):
        s = np.sum(x * x, axis=-1)
        dphi = 16 * x / ((1 - s) ** 3)[..., None]
        return dphi[..., :, None, None] * np.eye(n)

    def ddg(x):
        s = np.sum(x * x, axis=-1)
        u = 1 - s
        ddphi = 16 * _eye(x, n) / (u**3)[..., None, None] + 96 * np.einsum(
            "...k,...l->...kl", x, x
        ) / (u**4)[..., None, None]
        return ddphi[..., :, :, None, None] * np.eye(n)

    return g, dg, ddg


def _polar(n):
    # diagonal entries are products of one-variable factors:
    #   g_00 = 1/(1+r^2),  g_jj = r^2 prod_{k<j} sin^2(theta_k)
    def factors(x):
        r = x[..., 0]
        th = x[..., 1:]
        f = np.ones(x.shape[:-1] + (n, n))
        d = np.zeros_like(f)
        dd = np.zeros_like(f)
        q = 1 + r * r
        f[..., 0, 0], d[..., 0, 0], dd[..., 0, 0] = 1 / q, -2 * r / q**2, (6 * r * r - 2) / q**3
        for j in range(1, n):
            f[..., j, 0], d[..., j, 0], dd[..., j, 0] = r * r, 2 * r, 2.0
            for k in range(1, j):
                t = th[..., k - 1]
                f[..., j, k] = np.sin(t) ** 2
                d[..., j, k] = np.sin(2 * t)
                dd[..., j, k] = 2 * np.cos(2 * t)
        return f, d, dd

    def diag_to_matrix(v):
        out = np.zeros(v.shape + (n,))
        idx = np.arange(n)
        out[..., idx, idx] = v
        return out

    def g(x):
        f, _, _ = factors(x)
        return diag_to_matrix(np.prod(f, axis=-1))

    def dg(x):
        f, d, _ = factors(x)
        out = []
        for k in range(n):
            fk = f.copy()
            fk[..., k] = d[..., k]
            out.append(diag_to_matrix(np.prod(fk, axis=-1)))
        return np.stack(out, axis=-3)

    def ddg(x):
        f, d, dd = factors(x)
        rows = []
        for k in range(n):
            row = []
            for l in range(n):
                fk = f.copy()
                if k == l:
                    fk[..., k] = dd[..., k]
                else:
                    fk[..., k] = d[..., k]
                    fk[..., l] = d[..., l]
                row.append(diag_to_matrix(np.prod(fk, axis=-1)))
            rows.append(np.stack(row, axis=-3))
        return np.stack(rows, axis=-4)

    return g, dg, ddg


_BUILDERS = {Chart.HALF_SPACE: _half_space, Chart.BALL: _ball, Chart.POLAR: _polar}


def hyperbolic_metric(chart, n):
    """The hyperbolic metric ``b`` in ``chart`` with analytic derivatives.

    The registered closed-form Ricci tensor is ``-(n-1) b``.
    """
    if n < 3:
        raise DomainError("hyperbolic models need n >= 3")
    if chart not in _BUILDERS:
        raise DomainError(f"no hyperbolic metric in the {chart.value} chart")
    g, dg, ddg = _BUILDERS[chart](n)

    def ric(x):
        return -(n - 1) * g(np.asarray(x))

    return MetricField(n, chart, Field(g, dg, ddg), ricci=ric, name=f"hyperbolic-{chart.value}")


# ---------------------------------------------------------------------------
# static KIDs


def _kid_half_space(mu, n):
    """Closed form of the KID with index ``mu`` in half-space coordinates."""
    if mu in (0, n):
        sign = 1.0 if mu == 0 else -1.0

        def f(y):
            w, z = y[..., :-1], y[..., -1]
            return (np.sum(w * w, axis=-1) + z * z + sign) / (2 * z)

        def d(y):
            w, z = y[..., :-1], y[..., -1]
            w2 = np.sum(w * w, axis=-1)
            out = np.empty_like(y)
            out[..., :-1] = w / z[..., None]
            out[..., -1] = 0.5 - (w2 + sign) / (2 * z * z)
            return out

        def dd(y):
            w, z = y[..., :-1], y[..., -1]
            w2 = np.sum(w * w, axis=-1)
            out = np.zeros(y.shape + (n,))
            idx = np.arange(n - 1)
            out[..., idx, idx] = (1 / z)[..., None]
            out[..., :-1, -1] = out[..., -1, :-1] = -w / (z * z)[..., None]
            out[..., -1, -1] = (w2 + sign) / z**3
            return out

        return f, d, dd

    i = mu - 1

    def f(y):
        return y[..., i] / y[..., -1]

    def d(y):
        z = y[..., -1]
        out = np.zeros_like(y)
        out[..., i] = 1 / z
        out[..., -1] = -y[..., i] / (z * z)
        return out

    def dd(y):
        z = y[..., -1]
        out = np.zeros(y.shape + (n,))
        out[..., i, -1] = out[..., -1, i] = -1 / (z * z)
        out[..., -1, -1] = 2 * y[..., i] / z**3
        return out

    return f, d, dd


def static_kid(mu, n, chart=Chart.HALF_SPACE):
    """Static KID ``V_(mu)`` as a scalar field on ``chart``.

    ``mu = 0`` is the lapse-like ``V_(0) = (|w|^2 + z^2 + 1) / 2z``,
    ``1 <= mu <= n-1`` gives ``w^mu / z`` and ``mu = n`` gives
    ``(|w|^2 + z^2 - 1) / 2z``.  In the ball chart ``V_(mu)`` coincides with
    the hyperboloid coordinate ``X^mu``.  Derivatives are analytic in the
    half-space chart and finite-differenced elsewhere.
    """
    if not 0 <= mu <= n:
        raise ValueError(f"KID index must lie in 0..{n}, got {mu}")
    f, d, dd = _kid_half_space(mu, n)
    if chart is Chart.HALF_SPACE:
        return Field(f, d, dd)
    return Field(lambda x: f(transition(x, chart, Chart.HALF_SPACE)))


def static_kids(n, chart=Chart.HALF_SPACE):
    return [static_kid(mu, n, chart) for mu in range(n + 1)]


# ---------------------------------------------------------------------------
# Killing one-forms


def _check_euclidean_killing(translation, rotation, m, tol=1e-12):
    from .geometry import killing_operator

    flat = euclidean_metric(m)
    X = Field(lambda w: translation + w @ rotation.T,
              lambda w: np.broadcast_to(rotation.T, w.shape[:-1] + (m, m)))
    pts = np.random.default_rng(0).uniform(-1, 1, size=(4, m))
    res = killing_operator(flat, X, pts)
    if np.max(np.abs(res)) > tol * max(1.0, np.max(np.abs(rotation))):
        raise NotKillingError("X is not a Killing one-form of Euclidean space")


def killing_form(kind, n, *, translation=None, rotation=None, c=0.0, A=None):
    """Killing one-form of ``b`` in the half-space chart.

    ``kind="euclidean"`` lifts a Euclidean Killing one-form
    ``X_i(w) = translation_i + rotation_ij w^j`` to ``Y_X = X_i dw^i / z^2``;
    ``rotation`` must be antisymmetric.  ``kind="dilation-inversion"`` gives
    ``Y_{c,A}`` (dilation strength ``c``, inversion vector ``A``).
    """
    m = n - 1
    if kind == "euclidean":
        a = np.zeros(m) if translation is None else np.asarray(translation, float)
        O = np.zeros((m, m)) if rotation is None else np.asarray(rotation, float)
        _check_euclidean_killing(a, O, m)

        def f(y):
            w, z = y[..., :-1], y[..., -1]
            out = np.zeros_like(y)
            out[..., :-1] = (a + w @ O.T) / (z * z)[..., None]
            return out

        def d(y):
            w, z = y[..., :-1], y[..., -1]
            out = np.zeros(y.shape + (n,))
            out[..., :-1, :-1] = O.T / (z * z)[..., None, None]
            out[..., -1, :-1] = -2 * (a + w @ O.T) / (z**3)[..., None]
            return out

        return Field(f, d)

    if kind == "dilation-inversion":
        A = np.zeros(m) if A is None else np.asarray(A, float)

        def f(y):
            w, z = y[..., :-1], y[..., -1]
            Aw = w @ A
            w2 = np.sum(w * w, axis=-1)
            out = np.empty_like(y)
            out[..., -1] = (c + Aw) / z
            out[..., :-1] = -A / 2 + (
                (Aw + c)[..., None] * w - 0.5 * w2[..., None] * A
            ) / (z * z)[..., None]
            return out

        def d(y):
            w, z = y[..., :-1], y[..., -1]
            Aw = w @ A
            w2 = np.sum(w * w, axis=-1)
            z2 = (z * z)[..., None]
            out = np.zeros(y.shape + (n,))
            # d_k Y_z and d_z Y_z
            out[..., :-1, -1] = A / z[..., None]
            out[..., -1, -1] = -(c + Aw) / (z * z)
            # d_k Y_i = [A_k w_i + (A.w + c) delta_ki - w_k A_i] / z^2
            eye = np.eye(m)
            out[..., :-1, :-1] = (
                np.einsum("k,...i->...ki", A, w)
                + (Aw + c)[..., None, None] * eye
                - np.einsum("...k,i->...ki", w, A)
            ) / z2[..., None]
            out[..., -1, :-1] = -2 * ((Aw + c)[..., None] * w - 0.5 * w2[..., None] * A) / (z**3)[..., None]
            return out

        return Field(f, d)

    raise ValueError(f"unknown Killing form kind {kind!r}")


def killing_basis(n):
    """All n(n+1)/2 generators: translations, rotations, dilation, inversions."""
    m = n - 1
    out = []
    for i in range(m):
        out.append((f"translation-{i + 1}", killing_form("euclidean", n, translation=np.eye(m)[i])))
    for i, j in combinations(range(m), 2):
        O = np.zeros((m, m))
        O[i, j], O[j, i] = 1.0, -1.0
        out.append((f"rotation-{i + 1}{j + 1}", killing_form("euclidean", n, rotation=O)))
    out.append(("dilation", killing_form("dilation-inversion", n, c=1.0)))
    for i in range(m):
        out.append((f"inversion-{i + 1}", killing_form("dilation-inversion", n, A=np.eye(m)[i])))
    return out


def dilation_field(x):
    """Dilation vector field ``Z = (1 - |x|^2) x / (1 + |x|^2)`` on the ball."""
    x = np.asarray(x, float)
    s = np.sum(x * x, axis=-1)
    if np.any(s >= 1):
        raise DomainError("dilation field is defined for |x| < 1")
    return ((1 - s) / (1 + s))[..., None] * x


@dataclass(frozen=True)
class DecaySpec:
    """Metric fall-off ``sigma`` and radial decay ``s`` of a gluing family."""

    n: int
    sigma: float
    s: float

    def __post_init__(self):
        if not self.n / 2 <= self.s < (self.n + 1) / 2:
            raise ConfigError(f"need s in [n/2, (n+1)/2), got s = {self.s}")
        if not self.sigma > (self.n - 1) / 2 + self.s:
            raise ConfigError(f"need sigma > (n-1)/2 + s = {(self.n - 1) / 2 + self.s}")

    @property
    def mass_rate(self):
        """Exponent of the mass correction, ``o(eps^(sigma - s))``."""
        return self.sigma - self.s


# ---------------------------------------------------------------------------
# model metrics as perturbations of b on the ball


def schwarzschild_ads(n, mass):
    r"""Schwarzschild-AdS ``dr^2 / (1 + r^2 - 2m r^{2-n}) + r^2 h`` on the ball.

    The radial coordinate is that of ``b``, so the metric differs from ``b``
    only in the ``x x^T`` direction.  Valid outside the horizon; the mass
    integrals only sample it near the conformal boundary.
    """
    b = hyperbolic_metric(Chart.BALL, n)

    def e(x):
        s = np.sum(x * x, axis=-1)
        r = 2 * np.sqrt(s) / (1 - s)
        dr = 2 * (1 + s) / (1 - s) ** 2
        Fb = 1 + r * r
        deficit = 2 * mass * r ** (2 - n)
        F = Fb - deficit
        coef = dr**2 * deficit / (F * Fb) / s
        return coef[..., None, None] * np.einsum("...i,...j->...ij", x, x)

    return b.perturb(e, name=f"schwarzschild-ads(m={mass:g})")


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1, built from exp(-1/t)."""
    t = np.asarray(t, dtype=float)

    def bump(u):
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)

    a, c = bump(t), bump(1.0 - t)
    return a / (a + c)


def conformal_perturbation(n, amplitude=1.0, sigma=None, direction=None, lower_half=False, width=0.25):
    """``b + amplitude (1-|x|^2)^sigma (1 + d.x) chi b`` on the ball.

    ``sigma`` defaults to ``n`` (the fall-off giving a finite, generally
    non-zero mass).  With ``lower_half`` the factor ``chi`` switches the
    perturbation off smoothly on ``x^n >= 0``; it reaches full strength at
    ``x^n = -width``.
    """
    sigma = n if sigma is None else sigma
    d = np.zeros(n) if direction is None else np.asarray(direction, float)
    b = hyperbolic_metric(Chart.BALL, n)

    def e(x):
        s = np.sum(x * x, axis=-1)
        u = amplitude * (1 - s) ** sigma * (1 + x @ d)
        if lower_half:
            u = u * smooth_step(-x[..., -1] / width)
        return u[..., None, None] * b(x)

    return b.perturb(e, name=f"conformal-perturbation(t={amplitude:g})")
