"""rewalk: random-walk sampling of query-restricted graphs with overlay rewiring."""

from .access import AccessSession, NeighborhoodView, QueryLedger, load_edgelist
from .estimation import SampleSet, geweke_z, importance_estimate, kl_bias
from .generators import LatentSpaceConfig, barbell, latent_space
from .graph import Graph, OverlayLedger, edge_key
from .samplers import SamplerConfig, Walker
from .spectral import conductance_exact, mixing_bound, slem_mixing_time

__version__ = "0.1.0"

__all__ = [
    "AccessSession",
    "Graph",
    "LatentSpaceConfig",
    "NeighborhoodView",
    "OverlayLedger",
    "QueryLedger",
    "SampleSet",
    "SamplerConfig",
    "Walker",
    "barbell",
    "conductance_exact",
    "edge_key",
    "geweke_z",
    "importance_estimate",
    "kl_bias",
    "latent_space",
    "load_edgelist",
    "mixing_bound",
    "slem_mixing_time",
    "__version__",
]
