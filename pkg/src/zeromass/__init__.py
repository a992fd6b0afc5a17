"""Zero-mass wave equations: one evolution operator, Maxwell and Weyl solution sectors.

Submodules
----------
exact
    Exact Gaussian-rational scalars and matrices.
representations
    Pauli-algebra triples, commutants, projectors and their exact certificates.
field_maps
    Packings of (E, B, E0, B0) into 2- and 4-component wavefunctions.
pdes
    Symbolic expansion of the matrix equations into real first-order systems.
solver
    Exact-in-time spectral propagation on a periodic grid.
harness
    Cross-formulation runs and their reports.
io
    CSV, binary snapshot and plot-script export.
"""

__version__ = "0.1.0"

from .exact import ExactMatrix, ExactScalar  # noqa: E402
from .representations import REPRESENTATIONS, RepresentationSet, algebra_certificates, build_rep  # noqa: E402
from .field_maps import PACKINGS, FieldPacking, packing  # noqa: E402
from .solver import FieldState, GridSpec, PlaneWaveSpec, SpinorField, evolve, plane_wave  # noqa: E402

__all__ = [
    "__version__",
    "ExactMatrix",
    "ExactScalar",
    "REPRESENTATIONS",
    "RepresentationSet",
    "algebra_certificates",
    "build_rep",
    "PACKINGS",
    "FieldPacking",
    "packing",
    "FieldState",
    "GridSpec",
    "PlaneWaveSpec",
    "SpinorField",
    "evolve",
    "plane_wave",
]
