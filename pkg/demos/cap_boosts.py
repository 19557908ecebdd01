"""Boosts that blow a small polar cap up to a hemisphere.

With v = cos(eps) the boost along e_n sends the circle at polar angle eps
to the equator.  As eps shrinks, gamma = 1/sin(eps) grows, and conjugating
the boost by the half-turn R produces entries of size gamma^2.  Both
effects are tabulated here.

The image error grows like u/eps^2 (u the unit roundoff) because the input
point stores cos(eps) rounded and the map divides by 1 - v cos(eps) ~ eps^2.

    python3 demos/cap_boosts.py --out demo_out
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from ahmass.lorentz import BoostParams, act_on_sphere, boost, conjugate_boost, lorentz_defect, rotation_pi


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="demo_out")
    ap.add_argument("--dim", type=int, default=3)
    args = ap.parse_args()
    n = args.dim
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    en = np.eye(n)[-1]
    phi = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    rows = []
    for eps in np.pi / 4 * 2.0 ** -np.arange(0, 21, 2):
        p = BoostParams.from_cap(en, eps)
        L = boost(p)
        x = np.zeros((len(phi), n))
        x[:, 0], x[:, 1], x[:, -1] = np.sin(eps) * np.cos(phi), np.sin(eps) * np.sin(phi), np.cos(eps)
        y = act_on_sphere(L, x)
        M = conjugate_boost(boost(BoostParams.from_cap(np.eye(n)[0], eps)), rotation_pi(n))
        rows.append([eps, p.v, p.gamma, float(np.max(np.abs(y[:, -1]))),
                     lorentz_defect(L) / p.gamma**2, float(np.max(np.abs(M))) / p.gamma**2])
        print(f"eps={eps:.3e} gamma={p.gamma:.3e} max|image x^n|={rows[-1][3]:.1e} "
              f"max|M|/gamma^2={rows[-1][5]:.3f}")

    with open(out / "cap_boosts.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["eps", "v", "gamma", "max_abs_image_xn", "lorentz_defect_over_gamma2", "max_M_over_gamma2"])
        w.writerows(rows)
    print(f"wrote {out / 'cap_boosts.csv'}")


if __name__ == "__main__":
    main()
