"""Lorentz matrices on R^{1,n} and their conformal action on S^{n-1}.

Index 0 is time and ``eta = diag(-1, 1, ..., 1)``.  A point ``x`` of the
sphere is identified with the null ray through ``(1, x)``; a Lorentz matrix
acts on the sphere by acting on that ray and rescaling the time component
back to one.
"""

from dataclasses import dataclass

import numpy as np

from .errors import PoleAtInfinityError, SuperluminalError

__all__ = [
    "BoostParams",
    "minkowski_eta",
    "boost",
    "rotation_pi",
    "conjugate_boost",
    "conjugate_closed_form",
    "lorentz_inverse",
    "lorentz_defect",
    "is_lorentz",
    "act_on_sphere",
    "cap_velocity",
    "act_on_momentum",
    "rapidity_velocity",
]


@dataclass(frozen=True)
class BoostParams:
    """Boost along a unit ``direction`` with speed ``0 <= v < 1``.

    ``gamma`` is stored separately because near the speed of light it cannot
    be recovered accurately from ``v``; :meth:`from_cap` computes it as
    ``1/sin(eps)`` directly.
    """

    direction: tuple
    v: float
    gamma: float

    def __post_init__(self):
        d = np.asarray(self.direction, float)
        if abs(np.linalg.norm(d) - 1) > 1e-12:
            raise ValueError("boost direction must be a unit vector")
        if not 0 <= self.v < 1:
            raise SuperluminalError(f"boost speed must lie in [0, 1), got {self.v}")
        object.__setattr__(self, "direction", tuple(float(a) for a in d))

    @property
    def n(self):
        return len(self.direction)

    @classmethod
    def from_velocity(cls, direction, v):
        if not v < 1:
            raise SuperluminalError(f"boost speed must be below 1, got {v}")
        return cls(direction, v, 1.0 / np.sqrt((1 - v) * (1 + v)))

    @classmethod
    def from_cap(cls, direction, eps):
        """The boost that opens the cap of angular radius ``eps`` to a hemisphere."""
        v, gamma = cap_velocity(eps)
        return cls(direction, v, gamma)


def cap_velocity(eps):
    """``(v, gamma) = (cos eps, 1/sin eps)`` for ``0 < eps <= pi/2``."""
    if not 0 < eps <= np.pi / 2:
        raise ValueError("cap angle must lie in (0, pi/2]")
    return float(np.cos(eps)), float(1.0 / np.sin(eps))


def minkowski_eta(n):
    eta = np.eye(n + 1)
    eta[0, 0] = -1.0
    return eta


def _unit(n, i):
    e = np.zeros(n)
    e[i] = 1.0
    return e


def boost(params, v=None):
    """Boost matrix.

    ``boost(BoostParams)`` or ``boost(direction, v)``.  For direction ``e_1``
    the (0, 1) block is ``[[gamma, -gamma v], [-gamma v, gamma]]``.
    """
    if v is not None:
        params = BoostParams.from_velocity(params, v)
    d = np.asarray(params.direction)
    g, v = params.gamma, params.v
    n = len(d)
    L = np.empty((n + 1, n + 1))
    L[0, 0] = g
    L[0, 1:] = L[1:, 0] = -g * v * d
    L[1:, 1:] = np.eye(n) + (g - 1) * np.outer(d, d)
    return L


def rotation_pi(n, axis=None, partner=None):
    """Rotation by ``pi`` in the spatial plane spanned by ``axis`` and ``partner``.

    Defaults give ``diag(1, -1, -1, 1, ..., 1)``, that is the plane of
    ``e_1, e_2``.  The fixed set on the sphere is a great ``S^{n-3}`` on the
    equator relative to ``axis``.
    """
    a = _unit(n, 0) if axis is None else np.asarray(axis, float)
    b = _unit(n, 1) if partner is None else np.asarray(partner, float)
    if abs(a @ b) > 1e-12 or abs(a @ a - 1) > 1e-12 or abs(b @ b - 1) > 1e-12:
        raise ValueError("rotation plane needs two orthonormal vectors")
    R = np.eye(n + 1)
    R[1:, 1:] -= 2 * (np.outer(a, a) + np.outer(b, b))
    return R


def lorentz_inverse(L):
    """``eta L^T eta``; exact for Lorentz matrices and free of cancellation."""
    eta = minkowski_eta(L.shape[0] - 1)
    return eta @ L.T @ eta


def conjugate_boost(L, R):
    """``L^{-1} R L``."""
    return lorentz_inverse(L) @ R @ L


def conjugate_closed_form(n, v, gamma=None):
    """Closed form of ``boost(e_1, v)^{-1} rotation_pi(n) boost(e_1, v)``."""
    g = 1.0 / np.sqrt((1 - v) * (1 + v)) if gamma is None else gamma
    M = np.eye(n + 1)
    M[0, 0] = g * g * (1 + v * v)
    M[0, 1] = -2 * g * g * v
    M[1, 0] = 2 * g * g * v
    M[1, 1] = -g * g * (1 + v * v)
    M[2, 2] = -1.0
    return M


def lorentz_defect(L):
    """``max |L^T eta L - eta|``."""
    eta = minkowski_eta(L.shape[0] - 1)
    return float(np.max(np.abs(L.T @ eta @ L - eta)))


def is_lorentz(L, rtol=1e-12):
    """Proper orthochronous check with tolerance ``rtol * max(1, |L|^2)``."""
    scale = max(1.0, float(np.max(np.abs(L))) ** 2)
    return (
        lorentz_defect(L) <= rtol * scale
        and L[0, 0] > 0
        and np.linalg.det(L) > 0
    )


def act_on_sphere(L, x):
    """Conformal action on unit vectors ``x`` (batched over leading axes)."""
    x = np.asarray(x, float)
    ray = np.concatenate([np.ones(x.shape[:-1] + (1,)), x], axis=-1)
    y = ray @ L.T
    t = y[..., :1]
    if np.any(t < 1e-14):
        raise PoleAtInfinityError("image of the null ray has vanishing time component")
    return y[..., 1:] / t


def act_on_momentum(L, m):
    """``L m`` for energy-momentum vectors (batched over leading axes)."""
    return np.asarray(m, float) @ np.asarray(L).T


def rapidity_velocity(L):
    """Speed of a pure boost from its time column."""
    return float(np.linalg.norm(L[1:, 0]) / L[0, 0])
