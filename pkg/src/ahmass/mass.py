r"""Energy-momentum of asymptotically hyperbolic metrics.

The components are the limits

.. math::

    m_\mu = -\lim_{r\to\infty} \int_{S^{n-1}(r)} V_\mu Z^j
            \big(R^i{}_j - \tfrac{R}{n}\delta^i_j\big)\, d\sigma_i

with ``V_mu`` the static KIDs, ``Z`` the dilation field and ``d sigma_i``
the outward coordinate conormal, the overall positive constant set to one.
Spheres are the ball-model coordinate spheres ``|x| = 1 - 1/r`` (or their
images in the polar chart), and the limit is taken by Richardson
extrapolation over a radius schedule.
"""

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .charts import Chart, to_hyperboloid, unit_to_angles
from .errors import DegenerateMetricError, DivergenceError, DomainError
from .extrapolation import richardson
from .geometry import fd_step, ricci, ricci_relative

__all__ = [
    "RadiusSchedule",
    "MassResult",
    "CausalCharacter",
    "ricci_trace_free",
    "mass_integrand",
    "sphere_integrals",
    "energy_momentum",
    "hemisphere_energy_momentum",
    "causal_character",
    "minkowski_square",
    "momentum_from_aspect",
    "write_convergence_csv",
]

CHUNK = 4096


@dataclass(frozen=True)
class RadiusSchedule:
    """Sphere radii ``r_k`` and the Richardson error model ``r^-(p0 + j dp)``."""

    radii: tuple = tuple(2.0**k for k in range(3, 9))
    p0: float = 1.0
    dp: float = 1.0

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if len(r) < 2 or np.any(np.diff(r) <= 0) or r[0] <= 1:
            raise ValueError("radius schedule must be increasing, with r > 1 and at least two radii")
        object.__setattr__(self, "radii", tuple(float(v) for v in r))

    @classmethod
    def powers_of_two(cls, kmin=3, kmax=8, p0=1.0, dp=1.0):
        return cls(tuple(2.0**k for k in range(kmin, kmax + 1)), p0, dp)


@dataclass
class MassResult:
    m: np.ndarray
    error: np.ndarray
    radii: np.ndarray
    values: np.ndarray
    extrapolants: np.ndarray
    stderr: np.ndarray = field(default=None)


def ricci_trace_free(metric, x, h=None, g=None):
    """Mixed trace-free Ricci tensor ``R^i_j - (R/n) delta^i_j``.

    It is assembled from ``E = Ric + (n-1) g`` rather than from ``Ric``
    itself.  For a perturbed metric ``E`` is computed relative to the
    background (whose Einstein defect comes from its closed-form Ricci
    tensor when registered), which avoids cancelling terms of size ``r^2``.
    ``g`` may pass in the already evaluated metric at ``x``.
    """
    n = metric.dim
    g = metric(x) if g is None else g
    h = fd_step(metric.chart, x) if h is None else h
    bg = metric.background
    if bg is not None and bg.ricci is not None:
        E = (
            ricci_relative(metric, x, h)
            + (n - 1) * metric.perturbation(x)
            + (bg.ricci(x) + (n - 1) * bg(x))
        )
    else:
        E = ricci(metric, x, h) + (n - 1) * g
    T = np.linalg.solve(g, E)
    tr = np.trace(T, axis1=-2, axis2=-1)
    return T - (tr / n)[..., None, None] * np.eye(n)


def _sphere_points(metric, nodes, radius):
    rho = 1.0 - 1.0 / radius
    xb = rho * nodes
    if metric.chart is Chart.BALL:
        return xb
    if metric.chart is Chart.POLAR:
        r = 2 * rho / (1 - rho * rho)
        out = np.empty_like(nodes)
        out[:, 0] = r
        out[:, 1:] = unit_to_angles(nodes)
        return out
    raise DomainError("mass integrals need a metric in the ball or polar chart")


def mass_integrand(metric, nodes, radius, h=None):
    """Density (per unit solid angle) of the mass integral, all ``mu`` at once.

    ``nodes`` are unit vectors; the sphere is ``|x| = 1 - 1/radius`` in the
    ball.  Returns an array ``(len(nodes), n+1)`` that already contains the
    leading minus sign, ``V_mu``, ``Z``, the conormal and the area element.
    """
    n = metric.dim
    nodes = np.atleast_2d(np.asarray(nodes, float))
    x = _sphere_points(metric, nodes, radius)
    g = metric(x)
    sqrt_det = np.sqrt(np.linalg.det(g))
    if np.any(~(sqrt_det > 0)):
        raise DegenerateMetricError("metric is degenerate on the integration sphere")
    T = ricci_trace_free(metric, x, h, g)
    if metric.chart is Chart.BALL:
        rho = 1.0 - 1.0 / radius
        Z = ((1 - rho**2) / (1 + rho**2)) * x
        flux = np.einsum("...i,...ij,...j->...", nodes, T, Z) * sqrt_det * rho ** (n - 1)
    else:
        # Z = r d_r; divide out sqrt(det h) so the density is per solid angle
        r = x[:, 0]
        sin_t = np.sin(x[:, 1:-1])
        vol_h = np.prod(sin_t ** np.arange(n - 2, 0, -1), axis=-1) if n > 2 else 1.0
        flux = T[:, 0, 0] * r * sqrt_det / vol_h
    # the static KIDs are the hyperboloid coordinates (checked against static_kid in the tests)
    V = to_hyperboloid(x, metric.chart)
    return -V * flux[:, None]


def _threads():
    try:
        return max(1, int(os.environ.get("AHMASS_THREADS", "1")))
    except ValueError:
        return 1


def _integrand_chunks(metric, quad, radius):
    chunks = [slice(i, i + CHUNK) for i in range(0, len(quad), CHUNK)]

    def work(sl):
        return mass_integrand(metric, quad.nodes[sl], radius)

    workers = _threads()
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(sl) for sl in chunks]
    return np.concatenate(parts, axis=0)


def sphere_integrals(metric, quad, schedule):
    """Integrals on every sphere of the schedule: ``(values, stderr)``."""
    vals, errs = [], []
    for r in schedule.radii:
        dens = _integrand_chunks(metric, quad, r)
        vals.append(quad.integrate(dens))
        errs.append(quad.standard_error(dens))
    return np.array(vals), np.array(errs)


def _extrapolate(values, stderr, schedule, tol):
    m, err, diag = richardson(values, schedule.radii, schedule.p0, schedule.dp)
    scale = max(1.0, float(np.max(np.abs(m))))
    if len(diag) > 2:
        prev = np.abs(diag[-2] - diag[-3])
        bad = (err > tol * scale) & (err > prev)
        if np.any(bad):
            raise DivergenceError(
                f"sphere integrals do not converge: error estimate {np.max(err):.3g} is growing",
                table=values,
            )
    radii = np.asarray(schedule.radii)
    return MassResult(m, err, radii, values, diag, stderr)


def energy_momentum(metric, quad, schedule=None, tol=1e-6):
    """Energy-momentum vector ``(m_0, ..., m_n)`` with an error estimate.

    Raises :class:`DivergenceError` when the Richardson error estimate is
    above ``tol`` (relative to ``max(1, |m|)``) and still growing.
    """
    schedule = schedule or RadiusSchedule()
    values, stderr = sphere_integrals(metric, quad, schedule)
    return _extrapolate(values, stderr, schedule, tol)


def hemisphere_energy_momentum(metric, quad, half, schedule=None, tol=1e-6):
    """The same limit over the ``"upper"`` (``x^n > 0``) or ``"lower"`` half."""
    return energy_momentum(metric, quad.restrict(half), schedule, tol)


class CausalCharacter(Enum):
    ZERO = "zero"
    TIMELIKE_FUTURE = "timelike-future"
    TIMELIKE_PAST = "timelike-past"
    NULL_FUTURE = "null-future"
    NULL_PAST = "null-past"
    SPACELIKE = "spacelike"


def minkowski_square(m):
    """``q(m) = m_0^2 - |m_vec|^2`` (positive for timelike vectors)."""
    m = np.asarray(m, float)
    return m[..., 0] ** 2 - np.sum(m[..., 1:] ** 2, axis=-1)


def causal_character(m, tol=1e-12):
    """Classify ``m`` by the sign of ``q(m)`` and of ``m_0``.

    ``m`` is zero when every entry is at most ``tol``; it is null when
    ``|q| <= tol (m_0^2 + |m_vec|^2)``, which keeps the classification
    invariant under positive rescaling.
    """
    m = np.asarray(m, float)
    if np.max(np.abs(m)) <= tol:
        return CausalCharacter.ZERO
    q = minkowski_square(m)
    if abs(q) <= tol * float(np.sum(m * m)):
        return CausalCharacter.NULL_FUTURE if m[0] > 0 else CausalCharacter.NULL_PAST
    if q < 0:
        return CausalCharacter.SPACELIKE
    return CausalCharacter.TIMELIKE_FUTURE if m[0] > 0 else CausalCharacter.TIMELIKE_PAST


def momentum_from_aspect(aspect, quad):
    """First moments of a mass aspect function sampled on ``quad.nodes``.

    ``m_0 = int mu``, ``m_i = int mu x^i`` over the unit sphere.
    """
    if callable(aspect):
        aspect = [aspect(x) for x in quad.nodes]
    mu = np.asarray(aspect, float)
    moments = np.concatenate([mu[:, None], mu[:, None] * quad.nodes], axis=1)
    return quad.integrate(moments)


def write_convergence_csv(result, fh):
    """One row per radius: radius, integrals m_0..m_n, diagonal extrapolants."""
    k = result.values.shape[1]
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["radius"] + [f"m{i}" for i in range(k)] + [f"extrapolant{i}" for i in range(k)])
    for r, v, e in zip(result.radii, result.values, result.extrapolants):
        w.writerow([repr(float(r))] + [repr(float(a)) for a in v] + [repr(float(a)) for a in e])
