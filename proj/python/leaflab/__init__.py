"""Python access to the leaflab core."""

from ._leaflab import (
    HullModel,
    LeaflabError,
    RationalMap,
    __version__,
    bottcher,
    branching_profile,
    chebyshev,
    conical_test,
    escape_time,
    extend_homeo,
    fatou,
    find_cycles,
    hyp_dist,
    julia_samples,
    koenigs,
    postcritical_set,
    pullback_diameters,
    quadratic,
    run,
)

__all__ = [
    "HullModel",
    "LeaflabError",
    "RationalMap",
    "__version__",
    "bottcher",
    "branching_profile",
    "chebyshev",
    "conical_test",
    "escape_time",
    "extend_homeo",
    "fatou",
    "find_cycles",
    "hyp_dist",
    "julia_samples",
    "koenigs",
    "postcritical_set",
    "pullback_diameters",
    "quadratic",
    "run",
]
