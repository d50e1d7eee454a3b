"""Free-group words, the Farey tree, and numerical tests of the Bowditch
Q-conditions and primitive stability for SL(2,C) representations of F(a, b).
"""

from .analysis import (
    BiReport,
    BqVerdict,
    GrowthFit,
    PsEstimate,
    Verdict,
    bi_scan,
    bq_decide,
    growth_fit,
    ps_margin,
    separation_certificate,
    separation_scan,
    theta_scan,
    trace_tree,
)
from .farey import FareyEdge, Slope, christoffel, christoffel_from_cf, fibonacci, level, palindrome_rep
from .freegroup import Word
from .geometry import (
    GeometryError,
    H3Point,
    Mat2,
    ReducibleError,
    Representation,
    angle_theta,
    hexagon,
    representation_from_traces,
)

__version__ = "0.1.0"

__all__ = [
    "BiReport",
    "BqVerdict",
    "GrowthFit",
    "PsEstimate",
    "Verdict",
    "bi_scan",
    "bq_decide",
    "growth_fit",
    "ps_margin",
    "separation_certificate",
    "separation_scan",
    "theta_scan",
    "trace_tree",
    "GeometryError",
    "H3Point",
    "Mat2",
    "ReducibleError",
    "Representation",
    "angle_theta",
    "hexagon",
    "representation_from_traces",
    "FareyEdge",
    "Slope",
    "christoffel",
    "christoffel_from_cf",
    "fibonacci",
    "level",
    "palindrome_rep",
    "Word",
]
