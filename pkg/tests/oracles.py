"""Independent reference computations used by the tests.

Nothing here imports the package under test; the oracles are symbolic
(sympy) or high-precision (mpmath) re-derivations.
"""

import mpmath
import sympy as sp


def _ricci(g, coords):
    n = len(coords)
    ginv = g.inv()
    Gam = [[[sum(ginv[k, l] * (sp.diff(g[l, i], coords[j]) + sp.diff(g[l, j], coords[i])
                               - sp.diff(g[i, j], coords[l])) for l in range(n)) / 2
             for j in range(n)] for i in range(n)] for k in range(n)]
    Ric = sp.zeros(n, n)
    for i in range(n):
        for j in range(n):
            Ric[i, j] = sp.simplify(sum(
                sp.diff(Gam[k][i][j], coords[k]) - sp.diff(Gam[k][i][k], coords[j])
                + sum(Gam[k][k][l] * Gam[l][i][j] - Gam[k][j][l] * Gam[l][i][k] for l in range(n))
                for k in range(n)
            ))
    return Ric


def schwarzschild_ads_mass_oracle(n, m):
    """Large-r limit of the energy integrand of Schwarzschild-AdS, times the sphere area.

    The metric ``dr^2/F + r^2 h``, ``F = 1 + r^2 - 2 m r^(2-n)``, is written
    in ``(r, theta_1, ..., theta_{n-1})``.  The integrand per unit solid
    angle is ``-V_0 r T^r_r sqrt(g_rr) r^(n-1)`` with ``V_0 = sqrt(1 + r^2)``
    and ``T`` the mixed trace-free Ricci tensor.  Its series in ``1/r`` is
    expanded to ``O(r^-2)`` and the constant term kept.
    """
    r, mm = sp.symbols("r m", positive=True)
    th = sp.symbols(f"t1:{n}", positive=True)
    coords = (r,) + th
    F = 1 + r**2 - 2 * mm * r ** (2 - n)
    diag = [1 / F]
    w = r**2
    for k in range(n - 1):
        diag.append(w)
        w = w * sp.sin(th[k]) ** 2
    g = sp.diag(*diag)
    Ric = _ricci(g, coords)
    mixed = [sp.simplify(Ric[i, i] / g[i, i]) for i in range(n)]
    R = sum(mixed)
    Trr = sp.simplify(mixed[0] - R / n)
    dens = -sp.sqrt(1 + r**2) * r * Trr * r ** (n - 1) / sp.sqrt(F)
    u = sp.symbols("u", positive=True)
    series = sp.series(sp.simplify(dens.subs(r, 1 / u)), u, 0, 2).removeO()
    limit = sp.limit(series, u, 0)
    area = 2 * sp.pi ** sp.Rational(n, 2) / sp.gamma(sp.Rational(n, 2))
    return float((limit * area).subs(mm, m))


def boost_conjugation_oracle(v, digits=40):
    """``boost^-1 R boost`` in the (0, 1) block with mpmath at high precision."""
    mpmath.mp.dps = digits
    v = mpmath.mpf(v)
    g = 1 / mpmath.sqrt(1 - v * v)
    L = mpmath.matrix([[g, -g * v], [-g * v, g]])
    Linv = mpmath.matrix([[g, g * v], [g * v, g]])
    B = mpmath.matrix([[1, 0], [0, -1]])
    return Linv * B * L


def sphere_moment_oracle(n, powers):
    """``int_{S^{n-1}} prod x_i^{p_i}`` in closed form (zero unless all even)."""
    if any(p % 2 for p in powers):
        return 0.0
    b = [sp.Rational(p + 1, 2) for p in powers] + [sp.Rational(1, 2)] * (n - len(powers))
    return float(2 * sp.prod([sp.gamma(x) for x in b]) / sp.gamma(sum(b)))
