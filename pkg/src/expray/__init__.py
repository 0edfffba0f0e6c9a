"""Escaping-set dynamics of the exponential family exp(z) + kappa.

The package builds the symbolic model of escaping orbits (external addresses
with potentials), realizes model points as dynamic-ray points of a chosen
parameter through a certified contraction scheme, inverts that realization
for far-right orbits, conjugates two exponential maps on their common
far-right set, and solves for the parameters whose singular value rides a
prescribed ray.
"""

from . import errors
from .address import (
    ExternalAddress,
    Ordering,
    Periodic,
    PolyGrowth,
    Tower,
    lex_compare,
    parse,
    per,
    poly,
    tower,
    with_prefix,
)
from .combinatorics import Itinerary, itinerary, landing_compatible, same_landing_point
from .conjugacy import (
    OrbitRecord,
    conjugacy_report,
    contexts_for,
    external_address_of,
    phi,
    potential_of,
)
from .endpoint import SeriesReport, SeriesVerdict, differentiability_series
from .model import (
    AddressClass,
    ModelPoint,
    Q_threshold,
    SurvivalKind,
    SurvivalVerdict,
    T,
    Z,
    classify,
    escape_speed_address,
    in_Y,
    minimal_potential,
    model_step,
    parabola_condition,
    survives,
    t_s,
    t_star,
)
from .paramspace import (
    ParameterRaySolution,
    kappa_lower_bound,
    parameter_ray_point,
    parameter_ray_sample,
)
from .ray import (
    RayContext,
    RayPointResult,
    RaySample,
    functional_equation_residual,
    g_extended,
    g_point,
    ray_sample,
)

__version__ = "0.1.0"

__all__ = [
    "AddressClass",
    "ExternalAddress",
    "Itinerary",
    "ModelPoint",
    "OrbitRecord",
    "Ordering",
    "ParameterRaySolution",
    "Periodic",
    "PolyGrowth",
    "Q_threshold",
    "RayContext",
    "RayPointResult",
    "RaySample",
    "SeriesReport",
    "SeriesVerdict",
    "SurvivalKind",
    "SurvivalVerdict",
    "T",
    "Tower",
    "Z",
    "classify",
    "conjugacy_report",
    "contexts_for",
    "differentiability_series",
    "errors",
    "escape_speed_address",
    "external_address_of",
    "functional_equation_residual",
    "g_extended",
    "g_point",
    "in_Y",
    "itinerary",
    "kappa_lower_bound",
    "landing_compatible",
    "lex_compare",
    "minimal_potential",
    "model_step",
    "parabola_condition",
    "parameter_ray_point",
    "parameter_ray_sample",
    "parse",
    "per",
    "phi",
    "poly",
    "potential_of",
    "ray_sample",
    "same_landing_point",
    "survives",
    "t_s",
    "t_star",
    "tower",
    "with_prefix",
]
