"""Residual suites shared by the test-suite and the ``verify`` command.

Each suite returns a :class:`SuiteResult` with the worst residual found and
the threshold it was held to.
"""

from dataclasses import dataclass, field

import numpy as np

from .charts import Chart
from .constraints import constraint_operator, graph_initial_data, random_trig_graph
from .geometry import Field, MetricField, covariant_hessian, killing_operator, tensor_norm
from .lorentz import (
    BoostParams,
    act_on_sphere,
    boost,
    conjugate_boost,
    conjugate_closed_form,
    lorentz_defect,
    rapidity_velocity,
    rotation_pi,
)
from .models import hyperbolic_metric, killing_basis, static_kid

__all__ = [
    "SuiteResult",
    "sample_half_space",
    "kid_suite",
    "killing_suite",
    "lorentz_suite",
    "gauss_codazzi_suite",
]


@dataclass
class SuiteResult:
    name: str
    worst: float
    tol: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(self.worst < self.tol)

    def as_dict(self):
        return {
            "name": self.name,
            "worst": self.worst,
            "tol": self.tol,
            "passed": self.passed,
            "details": self.details,
        }


def sample_half_space(n, count, seed):
    """``z`` uniform in [0.1, 10] and ``w`` uniform in the ball ``|w| <= 10``."""
    rng = np.random.default_rng(seed)
    w = rng.standard_normal((count, n - 1))
    w *= (10 * rng.uniform(0, 1, (count, 1)) ** (1 / (n - 1))) / np.linalg.norm(w, axis=1, keepdims=True)
    z = rng.uniform(0.1, 10, (count, 1))
    return np.concatenate([w, z], axis=1)


def _fd_metric(b):
    return MetricField(b.dim, b.chart, Field(b.field.f), name=f"{b.name} (finite differences)")


def kid_suite(n, points, fd=False, corrupt=0.0, tol=None):
    """``sup |nabla nabla V - V b|_b`` over all KIDs.

    ``fd=True`` differences the metric to get the Christoffel symbols.
    ``corrupt`` adds ``corrupt * z`` to every KID, a deliberate violation
    used to check that failures are reported.
    """
    b = hyperbolic_metric(Chart.HALF_SPACE, n)
    metric = _fd_metric(b) if fd else b
    tol = (1e-6 if fd else 1e-10) if tol is None else tol
    gx = b(points)
    worst = {}
    for mu in range(n + 1):
        V = static_kid(mu, n)
        if corrupt:
            V = _corrupted(V, corrupt, n)
        res = covariant_hessian(metric, V, points) - V(points)[..., None, None] * gx
        worst[f"V{mu}"] = float(np.max(tensor_norm(res, gx)))
    name = "kid-residuals" + (" (fd christoffels)" if fd else "")
    return SuiteResult(name, max(worst.values()), tol, worst)


def _corrupted(V, eps, n):
    e_z = np.eye(n)[-1]
    return Field(
        lambda y: V(y) + eps * y[..., -1],
        lambda y: V.d(y) + eps * e_z,
        V.dd,
    )


def killing_suite(n, points, tol=1e-10):
    """``sup |nabla Y + (nabla Y)^T|_b`` over the whole Killing basis."""
    b = hyperbolic_metric(Chart.HALF_SPACE, n)
    gx = b(points)
    worst = {
        name: float(np.max(tensor_norm(killing_operator(b, Y, points), gx)))
        for name, Y in killing_basis(n)
    }
    return SuiteResult("killing-residuals", max(worst.values()), tol, worst)


def lorentz_suite(n, velocities=(0.0, 0.6, np.cos(0.1), np.cos(0.001)), caps=(0.3, 0.1, 0.03)):
    """Group identities, the conjugation closed form, velocity addition and the cap law.

    Residuals are divided by the natural scale of each check (``gamma^2``
    for matrix identities) so a single threshold of ``1e-10`` applies.
    """
    e1, en = np.eye(n)[0], np.eye(n)[-1]
    R = rotation_pi(n)
    checks = {}
    for v in velocities:
        p = BoostParams.from_cap(e1, float(np.arccos(v))) if v > 0 else BoostParams.from_velocity(e1, 0.0)
        L = boost(p)
        g2 = p.gamma**2
        checks[f"lorentz v={v:.12g}"] = lorentz_defect(L) / g2
        checks[f"conjugation v={v:.12g}"] = float(
            np.max(np.abs(conjugate_boost(L, R) - conjugate_closed_form(n, p.v, p.gamma)))
        ) / g2
    for v1, v2 in [(0.3, 0.5), (0.6, 0.6), (0.9, 0.99)]:
        comp = boost(e1, v1) @ boost(e1, v2)
        checks[f"addition {v1},{v2}"] = abs(rapidity_velocity(comp) - (v1 + v2) / (1 + v1 * v2))
    phi = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    for eps in caps:
        L = boost(BoostParams.from_cap(en, eps))
        x = np.zeros((len(phi), n))
        x[:, 0], x[:, 1] = np.sin(eps) * np.cos(phi), np.sin(eps) * np.sin(phi)
        x[:, -1] = np.cos(eps)
        y = act_on_sphere(L, x)
        checks[f"cap eps={eps:g}"] = float(np.max(np.abs(y[:, -1])))
        checks[f"cap norm eps={eps:g}"] = float(np.max(np.abs(np.linalg.norm(y, axis=1) - 1)))
    return SuiteResult("lorentz", max(checks.values()), 1e-10, checks)


def gauss_codazzi_suite(n, count=50, seed=0, samples=40, box=2.0, tol=1e-5):
    """``|rho| + |J|_g`` for random spacelike graphs (vacuum by Gauss-Codazzi)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        data = graph_initial_data(random_trig_graph(n, rng))
        x = rng.uniform(-box, box, (samples, n))
        cv = constraint_operator(data, x)
        worst = max(worst, float(np.max(np.abs(cv.rho) + cv.J_norm)))
    return SuiteResult("gauss-codazzi", worst, tol, {"graphs": count, "points": samples})
