"""Numerical thermodynamic formalism for hyperbolic exponential maps."""

from .geometry import build_model, endpoint, induced_metric, inverse_branch
from .potentials import PotentialSpec, default_spec
from .shift import Itinerary, parse_itinerary, shift, prepend

__all__ = [
    "build_model", "endpoint", "induced_metric", "inverse_branch",
    "PotentialSpec", "default_spec",
    "Itinerary", "parse_itinerary", "shift", "prepend",
]
