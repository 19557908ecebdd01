r"""Energy-momentum bookkeeping for gluing two data sets along boosted caps.

Two asymptotically hyperbolic data sets with momenta ``m^{1,eps}`` and
``m^{2,eps}`` are glued after the conformal boosts ``Lambda^1_eps`` (opening
a cap of angular radius ``eps`` to a hemisphere) and
``Lambda^2_eps = R Lambda^1_eps``, where ``R`` is a rotation by ``pi``.
The glued momentum is the sum of the transformed momenta.  Writing
``M = (Lambda^1)^{-1} R Lambda^1`` and ``delta^i = m^{i,eps} - m^i``,

.. math::

    m^\varepsilon = \underbrace{\Lambda^1 m^1 + R\Lambda^1 m^2}_{\text{leading}}
        + \Lambda^1 \underbrace{(\delta^1 + M \delta^2)}_{(*)} .

For ``m^1 = m^2`` the leading term is ``2 gamma (m_0 - v |m_vec|, 0)``.
"""

import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError
from .lorentz import BoostParams, boost, conjugate_boost, lorentz_inverse, rotation_pi
from .mass import CausalCharacter, causal_character, minkowski_square

__all__ = [
    "default_epsilon_grid",
    "MomentumFamily",
    "GluingScenario",
    "glued_momentum",
    "cancellation_decomposition",
    "remainder_bound",
    "conjugation_constant",
    "effective_constant",
    "ThresholdResult",
    "epsilon_threshold",
    "write_trace_csv",
]


def default_epsilon_grid(kmax=20):
    """``eps_k = (pi/4) 2^-k`` for ``k = 0..kmax`` (decreasing)."""
    return tuple(np.pi / 4 * 2.0 ** -np.arange(kmax + 1))


@dataclass(frozen=True)
class MomentumFamily:
    """``m^eps = base + C eps^rate u`` with a fixed unit vector ``u``."""

    base: tuple
    C: float = 0.0
    rate: float = 2.0
    u: Optional[tuple] = None

    def __post_init__(self):
        base = np.asarray(self.base, float)
        if base.ndim != 1 or len(base) < 4:
            raise ConfigError("base momentum needs n + 1 >= 4 components")
        u = np.zeros_like(base) if self.u is None else np.asarray(self.u, float)
        if self.C < 0:
            raise ConfigError("correction constant C must be non-negative")
        if self.C > 0 and abs(np.linalg.norm(u) - 1) > 1e-12:
            raise ConfigError("correction direction must be a unit vector")
        object.__setattr__(self, "base", tuple(base))
        object.__setattr__(self, "u", tuple(u))

    @classmethod
    def seeded(cls, base, C, rate, seed):
        """Correction direction drawn once from a seeded generator."""
        rng = np.random.default_rng(seed)
        u = rng.standard_normal(len(base))
        return cls(tuple(base), C, rate, tuple(u / np.linalg.norm(u)))

    @classmethod
    def strict_o(cls, base, C, p, seed, eta=0.1):
        """A correction that is ``o(eps^p)``, realised as ``eps^(p + eta)``."""
        if not eta > 0:
            raise ConfigError("strict-o margin eta must be positive")
        return cls.seeded(base, C, p + eta, seed)

    @property
    def n(self):
        return len(self.base) - 1

    def correction(self, eps):
        return self.C * eps**self.rate * np.asarray(self.u)

    def momentum(self, eps):
        return np.asarray(self.base) + self.correction(eps)


@dataclass(frozen=True)
class GluingScenario:
    family1: MomentumFamily
    family2: MomentumFamily
    eps_grid: tuple = field(default_factory=default_epsilon_grid)

    def __post_init__(self):
        if self.family1.n != self.family2.n:
            raise ConfigError("both families must live in the same dimension")
        m = np.asarray(self.family1.base)
        if not m[0] < 0:
            raise ConfigError("first base momentum must have m_0 < 0")
        if minkowski_square(m) > 1e-12 * float(m @ m):
            raise ConfigError("first base momentum must be spacelike or null")
        eps = np.asarray(self.eps_grid, float)
        if len(eps) == 0 or np.any(np.diff(eps) >= 0) or eps[0] > np.pi / 2 or eps[-1] <= 0:
            raise ConfigError("epsilon grid must be decreasing inside (0, pi/2]")
        object.__setattr__(self, "eps_grid", tuple(float(e) for e in eps))

    @property
    def n(self):
        return self.family1.n

    @property
    def rate(self):
        return min(self.family1.rate, self.family2.rate)

    @property
    def C(self):
        return max(self.family1.C, self.family2.C)

    def frame(self):
        """Boost direction (along the spatial part of ``m^1``) and rotation plane."""
        mvec = np.asarray(self.family1.base[1:])
        d = mvec / np.linalg.norm(mvec)
        # partner: the basis vector least aligned with d, made orthogonal
        e = np.eye(self.n)[int(np.argmin(np.abs(d)))]
        partner = e - (e @ d) * d
        return d, partner / np.linalg.norm(partner)

    def matrices(self, eps):
        """``(Lambda^1, R, gamma, v)`` at ``eps``."""
        d, partner = self.frame()
        params = BoostParams.from_cap(d, eps)
        return boost(params), rotation_pi(self.n, d, partner), params.gamma, params.v


def glued_momentum(scenario, eps):
    """``Lambda^1 m^{1,eps} + R Lambda^1 m^{2,eps}``."""
    L, R, _, _ = scenario.matrices(eps)
    return L @ scenario.family1.momentum(eps) + R @ L @ scenario.family2.momentum(eps)


def cancellation_decomposition(scenario, eps):
    """``(leading, remainder)`` with ``glued = leading + Lambda^1 remainder``."""
    L, R, _, _ = scenario.matrices(eps)
    m1, m2 = np.asarray(scenario.family1.base), np.asarray(scenario.family2.base)
    leading = L @ m1 + R @ L @ m2
    M = conjugate_boost(L, R)
    remainder = scenario.family1.correction(eps) + M @ scenario.family2.correction(eps)
    return leading, remainder


def remainder_bound(eps, n, C, eta=0.0):
    """``C^2 eps^(n/2 - 2 + eta)``.

    With ``eta = 0`` this is the plain rate; ``eta`` is the signed margin
    ``rate - n/2`` of the corrections, which a strict-o family makes positive.
    """
    if not 0 < eps < np.pi / 2 or n < 3:
        raise ValueError("need 0 < eps < pi/2 and n >= 3")
    return C**2 * eps ** (n / 2 - 2 + eta)


def conjugation_constant(scenario):
    """``C' = max over the grid of (1 + |M|) / (1 + eps^-2)`` (spectral norm)."""
    best = 0.0
    for eps in scenario.eps_grid:
        L, R, _, _ = scenario.matrices(eps)
        M = lorentz_inverse(L) @ R @ L
        best = max(best, (1 + np.linalg.norm(M, 2)) / (1 + eps**-2))
    return best


def effective_constant(scenario):
    """``C_eff`` with ``|(*)| <= C_eff^2 eps^(rate - 2)`` on the grid.

    ``|(*)| <= (1 + |M|) C eps^rate <= C' (1 + eps^-2) C eps^rate``, and
    ``1 + eps^2 <= 1 + pi^2/16`` on ``(0, pi/4]``.
    """
    top = max(scenario.eps_grid)
    return np.sqrt(conjugation_constant(scenario) * scenario.C * (1 + top**2))


@dataclass
class ThresholdResult:
    threshold: Optional[float]
    rows: list
    remainder_decays: bool

    @property
    def found(self):
        return self.threshold is not None


def _row(scenario, eps, c_eff):
    L, R, gamma, v = scenario.matrices(eps)
    m = glued_momentum(scenario, eps)
    leading, rem = cancellation_decomposition(scenario, eps)
    q = minkowski_square(m)
    eta = scenario.rate - scenario.n / 2
    return {
        "eps": eps,
        "v": v,
        "gamma": gamma,
        "m": m,
        "q": q,
        "margin": q / gamma**2,
        "character": causal_character(m),
        "remainder": float(np.linalg.norm(rem)),
        "bound": remainder_bound(eps, scenario.n, c_eff, eta) if eps < np.pi / 2 else np.inf,
    }


def epsilon_threshold(scenario):
    """Largest grid ``eps_0`` such that every grid ``eps <= eps_0`` gives a
    timelike past-pointing glued momentum, or ``None``.

    Each row also records ``q / gamma^2``, the remainder norm and its bound.
    ``remainder_decays`` states whether ``eps^rate gamma^2 -> 0``, which is
    what the remainder bound needs (``rate > 2``).
    """
    c_eff = effective_constant(scenario)
    rows = [_row(scenario, e, c_eff) for e in scenario.eps_grid]
    threshold = None
    for row in reversed(rows):
        if row["character"] is not CausalCharacter.TIMELIKE_PAST:
            break
        threshold = row["eps"]
    return ThresholdResult(threshold, rows, scenario.rate > 2)


def write_trace_csv(result, fh):
    """eps, v, gamma, glued momentum, q, |(*)|, bound, character."""
    k = len(result.rows[0]["m"])
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(
        ["eps", "v", "gamma"] + [f"m{i}" for i in range(k)]
        + ["q", "remainder", "bound", "character"]
    )
    for r in result.rows:
        w.writerow(
            [repr(float(r["eps"])), repr(float(r["v"])), repr(float(r["gamma"]))]
            + [repr(float(a)) for a in r["m"]]
            + [repr(float(r["q"])), repr(r["remainder"]), repr(float(r["bound"])), r["character"].value]
        )
