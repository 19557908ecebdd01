"""Coordinate charts on hyperbolic space and the maps between them.

Three models of H^n are supported, plus a plain Euclidean chart used for
flat test metrics and Minkowski graphs:

* ``HALF_SPACE``: ``(w^1, ..., w^{n-1}, z)`` with ``z > 0``, ``b = (dz^2 + dw^2) / z^2``
* ``BALL``: ``x`` with ``|x| < 1``, ``b = 4 delta / (1 - |x|^2)^2``
* ``POLAR``: ``(r, theta_1, ..., theta_{n-1})``, ``b = dr^2 / (1 + r^2) + r^2 h``

All transitions go through the hyperboloid in R^{1,n}. The half-space point
``(0, 1)`` is the centre of the ball, and the half-space boundary ``z = 0``
is the unit sphere minus its north pole ``x = e_n``.

Coordinates are numpy arrays whose last axis has length n; any leading axes
are treated as a batch.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError

__all__ = [
    "Chart",
    "ChartPoint",
    "angles_to_unit",
    "unit_to_angles",
    "transition",
    "chart_transition",
    "to_hyperboloid",
]


class Chart(Enum):
    HALF_SPACE = "half-space"
    BALL = "ball"
    POLAR = "polar"
    EUCLIDEAN = "euclidean"

    def margin(self, x):
        """Coordinate distance from ``x`` to the edge of the chart domain."""
        x = np.asarray(x)
        if self is Chart.HALF_SPACE:
            return x[..., -1].real
        if self is Chart.BALL:
            return 1.0 - np.linalg.norm(x.real, axis=-1)
        if self is Chart.POLAR:
            # r > 0 and the non-periodic angles stay inside (0, pi)
            ang = x[..., 1:-1].real
            m = x[..., 0].real
            if ang.shape[-1]:
                m = np.minimum(m, np.min(np.minimum(ang, np.pi - ang), axis=-1))
            return m
        return np.full(x.shape[:-1], np.inf)

    def scale(self, x):
        """Local length scale used to size finite-difference steps."""
        x = np.asarray(x)
        if self is Chart.HALF_SPACE:
            return x[..., -1].real
        if self is Chart.BALL:
            return np.minimum(1.0, 1.0 - np.linalg.norm(x.real, axis=-1))
        if self is Chart.POLAR:
            return np.minimum(1.0, self.margin(x))
        return np.ones(x.shape[:-1])

    def contains(self, x):
        return self.margin(x) > 0


@dataclass(frozen=True)
class ChartPoint:
    """A point of hyperbolic space tagged with its chart.

    ``coords`` may carry leading batch axes.  A polar point with ``r == 0``
    is the centre marker returned for the ball origin; its angles are set to
    zero and carry no meaning (see :attr:`is_polar_origin`).
    """

    chart: Chart
    coords: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        object.__setattr__(self, "coords", coords)
        n = coords.shape[-1]
        if self.chart is not Chart.EUCLIDEAN and n < 3:
            raise DomainError(f"hyperbolic charts need n >= 3, got n = {n}")
        if self.is_polar_origin:
            return
        if not np.all(self.chart.contains(coords)):
            raise DomainError(f"point outside the {self.chart.value} chart domain")

    @property
    def dim(self):
        return self.coords.shape[-1]

    @property
    def is_polar_origin(self):
        return self.chart is Chart.POLAR and bool(np.all(self.coords[..., 0] == 0.0))

    def to(self, chart):
        return chart_transition(self, chart)


def angles_to_unit(theta):
    """Hyperspherical angles ``(theta_1, ..., theta_{n-1})`` to a unit vector.

    ``x^n = cos theta_1``, ``x^{n-1} = sin theta_1 cos theta_2``, ... and the
    last angle is the azimuth in the ``(x^2, x^1)`` plane.
    """
    theta = np.asarray(theta)
    m = theta.shape[-1]
    out = np.empty(theta.shape[:-1] + (m + 1,), dtype=theta.dtype)
    s = np.ones(theta.shape[:-1], dtype=theta.dtype)
    for k in range(m - 1):
        out[..., m - k] = s * np.cos(theta[..., k])
        s = s * np.sin(theta[..., k])
    out[..., 1] = s * np.cos(theta[..., m - 1])
    out[..., 0] = s * np.sin(theta[..., m - 1])
    return out


def unit_to_angles(u):
    """Inverse of :func:`angles_to_unit`; the azimuth lies in ``[0, 2 pi)``."""
    u = np.asarray(u, dtype=float)
    n = u.shape[-1]
    theta = np.empty(u.shape[:-1] + (n - 1,))
    for k in range(n - 2):
        rest = np.linalg.norm(u[..., : n - 1 - k], axis=-1)
        theta[..., k] = np.arctan2(rest, u[..., n - 1 - k])
    theta[..., n - 2] = np.mod(np.arctan2(u[..., 0], u[..., 1]), 2 * np.pi)
    return theta


def _half_to_ball(y):
    w, z = y[..., :-1], y[..., -1]
    w2 = np.sum(w * w, axis=-1)
    den = w2 + (z + 1.0) ** 2
    out = np.empty_like(y)
    out[..., :-1] = 2.0 * w / den[..., None]
    out[..., -1] = (w2 + z * z - 1.0) / den
    return out


def _ball_to_half(x):
    s = np.sum(x * x, axis=-1)
    d = np.sum(x[..., :-1] ** 2, axis=-1) + (x[..., -1] - 1.0) ** 2
    out = np.empty_like(x)
    out[..., :-1] = 2.0 * x[..., :-1] / d[..., None]
    out[..., -1] = (1.0 - s) / d
    return out


def _polar_to_ball(y):
    r = y[..., 0]
    rho = r / (1.0 + np.sqrt(1.0 + r * r))
    return rho[..., None] * angles_to_unit(y[..., 1:])


def _ball_to_polar(x):
    rho = np.linalg.norm(x, axis=-1)
    out = np.zeros_like(x)
    out[..., 0] = 2.0 * rho / (1.0 - rho * rho)
    nz = rho > 0
    if np.any(nz):
        out[nz, 1:] = unit_to_angles(x[nz] / rho[nz, None])
    return out


def to_hyperboloid(x, chart):
    """Map chart coordinates to the hyperboloid ``-X0^2 + |X|^2 = -1, X0 > 0``."""
    x = np.asarray(x, dtype=float)
    if chart is Chart.HALF_SPACE:
        w, z = x[..., :-1], x[..., -1]
        a = np.sum(w * w, axis=-1) + z * z
        return np.concatenate(
            [((a + 1.0) / (2 * z))[..., None], w / z[..., None], ((a - 1.0) / (2 * z))[..., None]],
            axis=-1,
        )
    if chart is Chart.POLAR:
        x = _polar_to_ball(x)
    elif chart is not Chart.BALL:
        raise DomainError(f"no hyperboloid map for the {chart.value} chart")
    s = np.sum(x * x, axis=-1)
    return np.concatenate([((1 + s) / (1 - s))[..., None], 2 * x / (1 - s)[..., None]], axis=-1)


_TO_BALL = {Chart.BALL: lambda x: x, Chart.HALF_SPACE: _half_to_ball, Chart.POLAR: _polar_to_ball}
_FROM_BALL = {Chart.BALL: lambda x: x, Chart.HALF_SPACE: _ball_to_half, Chart.POLAR: _ball_to_polar}


def transition(x, src, dst):
    """Vectorised coordinate change between hyperbolic charts.

    Raises :class:`DomainError` if an image falls outside ``dst`` (the
    north pole of the ball has no half-space image).
    """
    x = np.asarray(x, dtype=float)
    if src is dst:
        return x.copy()
    if Chart.EUCLIDEAN in (src, dst):
        raise DomainError("the Euclidean chart has no transition maps")
    if dst is Chart.HALF_SPACE and src is not Chart.HALF_SPACE:
        xb = _TO_BALL[src](x)
        d = np.sum(xb[..., :-1] ** 2, axis=-1) + (xb[..., -1] - 1.0) ** 2
        if np.any(d <= 0.0):
            raise DomainError("the north pole has no half-space image")
        return _ball_to_half(xb)
    y = _FROM_BALL[dst](_TO_BALL[src](x))
    if dst is not Chart.POLAR and not np.all(dst.contains(y)):
        raise DomainError(f"image outside the {dst.value} chart domain")
    return y


def chart_transition(p, to):
    """Change the chart of a :class:`ChartPoint`."""
    if p.is_polar_origin:
        coords = np.zeros_like(p.coords)
        if to is Chart.HALF_SPACE:
            coords[..., -1] = 1.0
        return ChartPoint(to, coords)
    return ChartPoint(to, transition(p.coords, p.chart, to))
