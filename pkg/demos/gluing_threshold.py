"""Energy-momentum bookkeeping of the gluing: where does the glued vector turn timelike?

Two copies of a spacelike past-pointing momentum (-1, 2, 0, ...) are boosted
with v = cos(eps) and glued through a half-turn.  The spatial parts cancel
and the energy becomes -2 gamma (1 + 2v).  Corrections of size eps^rate
perturb this.  The scan reports the ratio of the remainder to its bound
and the causal character at each eps.

The interesting row is n = 4 with rate exactly 2.  The remainder (*) then
stays of order one while its bound is constant.  The glued vector is still
timelike past-pointing on the whole grid, because the boost contracts the
image of the conjugated matrix.  The decay condition is sufficient, not
necessary.

    python3 demos/gluing_threshold.py --out demo_out
"""

import argparse
from pathlib import Path

import numpy as np

from ahmass.gluing import GluingScenario, MomentumFamily, epsilon_threshold, write_trace_csv


def scenario(n, rate, seed=0, C=1.0):
    base = tuple([-1.0, 2.0] + [0.0] * (n - 1))
    return GluingScenario(MomentumFamily.seeded(base, C, rate, seed), MomentumFamily.seeded(base, C, rate, seed + 1))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="demo_out")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    cases = [(n, n / 2 - 0.1) for n in (5, 6, 8)] + [(4, 2.1), (4, 2.0), (3, 1.5)]
    for n, rate in cases:
        res = epsilon_threshold(scenario(n, rate))
        ratio = max(r["remainder"] / r["bound"] for r in res.rows)
        tail = res.rows[-1]
        print(f"n={n} rate={rate:.1f}: threshold={res.threshold if res.found else 'none found'} "
              f"remainder decays={res.remainder_decays} max |(*)|/bound={ratio:.2f} "
              f"smallest eps: |(*)|={tail['remainder']:.2e} q/gamma^2={tail['margin']:.3f}")
        with open(out / f"glue_n{n}_rate{rate:.1f}.csv", "w", newline="") as fh:
            write_trace_csv(res, fh)

    big = epsilon_threshold(scenario(3, 0.0, seed=1, C=1e3))
    print(f"n=3 with an O(1) correction of size 1e3: threshold="
          f"{big.threshold if big.found else 'none found'}, smallest eps is {big.rows[-1]['character'].value}")
    print(f"traces written to {out}/glue_*.csv")


if __name__ == "__main__":
    np.set_printoptions(precision=4)
    main()
