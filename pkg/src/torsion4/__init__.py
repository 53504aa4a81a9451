"""Torsion invariant of closed oriented 3-manifolds from pseudotriangulations
geometrized in Euclidean R^4.

Pipeline: embed the vertices in general position, differentiate the edge
lengths, adjacency angles and deficit rotations into a five-map chain
complex, take the torsion of the (numerically verified) acyclic complex and
normalize by edge lengths and face areas.  The result is unchanged by the
local moves connecting triangulations of one manifold.
"""

__version__ = "0.1.0"

from .builders import boundary_4_simplex, lens_space, two_tets_sphere
from .complexes import (GeometricComplex, build_complex, check_acyclicity,
                        check_complex)
from .geometry import (Embedding, GeometryError, MetricData, adjacency_theta,
                       dihedral_phi, edge_holonomy, edge_length, face_area,
                       metric_from_embedding, oriented_4volume, place_apex,
                       random_embedding, tet_volume)
from .torsion import (InvariantResult, TauChain, TorsionError, TorsionResult,
                      invariant, select_tau_chain, torsion)
from .triangulation import (FaceGluing, Pseudotriangulation, Tetrahedron,
                            TriangulationError, canonical_signature,
                            derive_cells, edge_star, is_isomorphic,
                            pachner_0_2, pachner_1_4, pachner_2_3,
                            pachner_3_2, pachner_4_1, validate)

__all__ = [
    "__version__",
    "boundary_4_simplex", "lens_space", "two_tets_sphere",
    "GeometricComplex", "build_complex", "check_acyclicity", "check_complex",
    "Embedding", "GeometryError", "MetricData", "adjacency_theta",
    "dihedral_phi", "edge_holonomy", "edge_length", "face_area",
    "metric_from_embedding", "oriented_4volume", "place_apex",
    "random_embedding", "tet_volume",
    "InvariantResult", "TauChain", "TorsionError", "TorsionResult",
    "invariant", "select_tau_chain", "torsion",
    "FaceGluing", "Pseudotriangulation", "Tetrahedron", "TriangulationError",
    "canonical_signature", "derive_cells", "edge_star", "is_isomorphic",
    "pachner_0_2", "pachner_1_4", "pachner_2_3", "pachner_3_2",
    "pachner_4_1", "validate",
]
