"""Quadrature rules on the unit sphere S^{n-1} in R^n.

Every rule is the union of an upper (``x^n > 0``) and a lower (``x^n < 0``)
hemisphere rule, so hemisphere integrals are restrictions of the full rule
and add up to it exactly.
"""

from dataclasses import dataclass
from math import gamma, pi

import numpy as np
from scipy.special import roots_jacobi

from .charts import angles_to_unit

__all__ = ["SphereQuadrature", "sphere_area", "product_gauss", "monte_carlo", "default_quadrature"]


def sphere_area(n):
    """Area of the unit sphere S^{n-1} in R^n."""
    return 2 * pi ** (n / 2) / gamma(n / 2)


@dataclass(frozen=True)
class SphereQuadrature:
    nodes: np.ndarray
    weights: np.ndarray
    half: np.ndarray
    kind: str = "product-gauss"

    @property
    def dim(self):
        return self.nodes.shape[-1]

    def __len__(self):
        return len(self.weights)

    def restrict(self, half):
        """Sub-rule on one hemisphere: ``"upper"`` or ``"lower"``."""
        sign = {"upper": 1, "lower": -1}[half]
        keep = self.half == sign
        return SphereQuadrature(self.nodes[keep], self.weights[keep], self.half[keep], self.kind)

    def integrate(self, values):
        """Weighted sum over the nodes (node axis first).

        ``np.sum`` reduces pairwise in a fixed order, so results are
        reproducible bit for bit.
        """
        values = np.asarray(values)
        w = self.weights.reshape((-1,) + (1,) * (values.ndim - 1))
        return np.sum(w * values, axis=0)

    def standard_error(self, values):
        """Monte Carlo standard error of :meth:`integrate` (0 for Gauss rules)."""
        values = np.asarray(values)
        if self.kind != "monte-carlo":
            return np.zeros(values.shape[1:])
        # antithetic pairs are averaged before estimating the variance
        pairs = 0.5 * (values[0::2] + values[1::2])
        total = np.sum(self.weights)
        return total * np.std(pairs, axis=0, ddof=1) / np.sqrt(len(pairs))


def product_gauss(n, k=12):
    """Product Gauss rule in hyperspherical angles.

    Each polar angle is sampled at Gauss-Jacobi nodes in ``u = cos(theta)``,
    which absorbs the ``sin^a`` volume factor; the azimuth gets ``2k``
    equispaced nodes.  The first polar angle uses ``2k`` nodes so that no
    node sits on the equator.  Monomials of degree below ``2k`` in the
    ambient coordinates are integrated exactly.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    axes, weights = [], []
    for j in range(1, n - 1):
        a = 0.5 * (n - 2 - j)
        u, wu = roots_jacobi(2 * k if j == 1 else k, a, a)
        axes.append(np.arccos(u))
        weights.append(wu)
    m = 2 * k
    axes.append(2 * pi * (np.arange(m) + 0.5) / m)
    weights.append(np.full(m, 2 * pi / m))
    grids = np.meshgrid(*axes, indexing="ij")
    theta = np.stack([g.ravel() for g in grids], axis=-1)
    w = np.ones(len(theta))
    for gw in np.meshgrid(*weights, indexing="ij"):
        w = w * gw.ravel()
    nodes = angles_to_unit(theta)
    return SphereQuadrature(nodes, w, np.where(nodes[:, -1] > 0, 1, -1), "product-gauss")


def monte_carlo(n, samples=1_000_000, seed=0):
    """Equal-weight antithetic Monte Carlo rule (pairs ``x, -x``)."""
    rng = np.random.default_rng(seed)
    half = (samples + 1) // 2
    x = rng.standard_normal((half, n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    nodes = np.empty((2 * half, n))
    nodes[0::2], nodes[1::2] = x, -x
    w = np.full(2 * half, sphere_area(n) / (2 * half))
    return SphereQuadrature(nodes, w, np.where(nodes[:, -1] > 0, 1, -1), "monte-carlo")


def default_quadrature(n, k=12, samples=1_000_000, seed=0):
    """Product Gauss for S^2 and S^3, Monte Carlo in higher dimensions."""
    if n <= 4:
        return product_gauss(n, k)
    return monte_carlo(n, samples, seed)
