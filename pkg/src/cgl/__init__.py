"""Conformal structures on finite weighted graphs.

Moduli spaces of conformal weight classes, conformally covariant matrix
families, and the invariants built from them (signatures, kernels, nodal
data, discriminant scans, immanant polynomials).
"""

__version__ = "0.1.0"

from .core import (
    Graph,
    ModuliDescription,
    apply_conformal_factor,
    bipartite_components,
    canonical_representative,
    incidence_rank_exact,
    moduli_coordinates,
    moduli_description,
    same_conformal_class,
    unsigned_incidence,
)

__all__ = [
    "Graph",
    "ModuliDescription",
    "apply_conformal_factor",
    "bipartite_components",
    "canonical_representative",
    "incidence_rank_exact",
    "moduli_coordinates",
    "moduli_description",
    "same_conformal_class",
    "unsigned_incidence",
    "__version__",
]
