"""Constraint residuals of Minkowski graphs and the AH to AE shift.

Every spacelike graph in Minkowski space carries vacuum data, so rho and J
vanish up to discretization error.  The lower hyperboloid gives
(b, -b), which is the shift of vacuum hyperbolic data (b, 0).  The
interpolating graph agrees with the hyperboloid on an annulus and is flat
far out.

    python3 demos/constraints_tour.py --out demo_out
"""

import argparse
from pathlib import Path

import numpy as np

from ahmass.charts import Chart
from ahmass.constraints import (
    InitialDataSet,
    ah_lambda,
    ah_to_ae_shift,
    constraint_operator,
    graph_initial_data,
    hyperboloid_graph,
    interpolating_graph,
    random_trig_graph,
    write_constraint_csv,
    zero_tensor,
)
from ahmass.models import hyperbolic_metric
from ahmass.verify import sample_half_space


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="demo_out")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    n = 3

    worst = 0.0
    for _ in range(10):
        data = graph_initial_data(random_trig_graph(n, rng))
        cv = constraint_operator(data, rng.uniform(-2, 2, (40, n)))
        worst = max(worst, float(np.max(np.abs(cv.rho) + cv.J_norm)))
    print(f"10 random graphs: worst |rho| + |J| = {worst:.2e}")

    x = rng.uniform(-2, 2, (40, n))
    cv = constraint_operator(graph_initial_data(hyperboloid_graph(n)), x)
    print(f"hyperboloid graph: worst |rho| + |J| = {np.max(np.abs(cv.rho) + cv.J_norm):.2e}")

    vac = InitialDataSet(hyperbolic_metric(Chart.HALF_SPACE, n), zero_tensor(n), ah_lambda(n))
    pts = sample_half_space(n, 40, args.seed)
    a, b = constraint_operator(vac, pts), constraint_operator(ah_to_ae_shift(vac), pts)
    print(f"shift of (b, 0): change in rho {np.max(np.abs(a.rho - b.rho)):.1e}, in J {np.max(np.abs(a.J - b.J)):.1e}")

    hyp = interpolating_graph(2.0, n)
    r = np.linspace(0, hyp.outer_radius + 2, 81)
    xr = np.stack([r, 0 * r, 0 * r], -1)
    cv = constraint_operator(graph_initial_data(hyp), xr)
    print(f"interpolating graph R=2: slope margin {hyp.slope_margin:.3f}, "
          f"flat beyond |x|={hyp.outer_radius:g}, worst residual {np.max(np.abs(cv.rho) + cv.J_norm):.2e}")
    with open(out / "interpolating_graph.csv", "w", newline="") as fh:
        write_constraint_csv(xr, cv, fh, tol=1e-6)
    print(f"wrote {out / 'interpolating_graph.csv'}")


if __name__ == "__main__":
    main()
