"""Energy-momentum of asymptotically hyperbolic initial data, numerically.

Submodules:

* :mod:`ahmass.charts`, :mod:`ahmass.geometry`: charts on hyperbolic space and tensor calculus
* :mod:`ahmass.models`: the hyperbolic metric, static KIDs, Killing forms, model metrics
* :mod:`ahmass.mass`: sphere integrals, extrapolation, causal character
* :mod:`ahmass.lorentz`: boosts and the conformal action on the sphere
* :mod:`ahmass.constraints`: constraint operator, graphs, the gluing inequalities
* :mod:`ahmass.gluing`: momentum bookkeeping of the gluing construction
* :mod:`ahmass.cli`: the ``ahmass`` command
"""

from .charts import Chart, ChartPoint, chart_transition, transition
from .constraints import InitialDataSet, constraint_operator, graph_data
from .geometry import MetricField, christoffel, ricci
from .gluing import GluingScenario, MomentumFamily, epsilon_threshold, glued_momentum
from .lorentz import BoostParams, act_on_sphere, boost, rotation_pi
from .mass import CausalCharacter, RadiusSchedule, causal_character, energy_momentum
from .models import hyperbolic_metric, schwarzschild_ads, static_kid
from .quadrature import default_quadrature, product_gauss

__version__ = "0.1.0"

__all__ = [
    "Chart",
    "ChartPoint",
    "chart_transition",
    "transition",
    "MetricField",
    "christoffel",
    "ricci",
    "hyperbolic_metric",
    "schwarzschild_ads",
    "static_kid",
    "energy_momentum",
    "RadiusSchedule",
    "CausalCharacter",
    "causal_character",
    "default_quadrature",
    "product_gauss",
    "BoostParams",
    "boost",
    "rotation_pi",
    "act_on_sphere",
    "InitialDataSet",
    "constraint_operator",
    "graph_data",
    "MomentumFamily",
    "GluingScenario",
    "glued_momentum",
    "epsilon_threshold",
]
