"""Coarse geometry of quasi-actions whose quasi-orbits look like trees or lines."""

from .actions import (LINE, Line, MetricTarget, OrbitBall, QuasiActionSpec,
                      apply, classify_hyperbolic_type_tree, classify_trichotomy,
                      conjugate_quasi_action, coset_tree, element_type,
                      min_displacement, minimal_subtree_ball, orbit_diagnosis,
                      quasi_orbit, verify_coarse_equivariance, verify_quasi_action)
from .busemann import (RaySequence, busemann_value, busemann_values,
                       dihedral_reduction, line_reduction_map, quasi_horofunction,
                       scaling_comparison, verify_busemann_symmetry,
                       verify_morse_inequality)
from .errors import (CertificateError, GraphFormatError, LineReductionError,
                     MetricError, OrbitBudgetError, PreconditionError, QtreekitError)
from .metric import (FiniteMetricSpace, Graph, QieConstants, Witness,
                     coarse_components, covering_number, hausdorff_distance,
                     is_coarse_dense, min_connectivity_scale, verify_qi, verify_qie)
from .quasimorphisms import (DihedralSpec, QuasiMorphism, antisymmetrised, brooks,
                             check_antisymmetry, classify_line_reduction,
                             dihedral_action, fit_bavard, fit_defect, homogenise,
                             homogenised, homomorphism_qm, translation_action)
from .rips import RipsGraph, build_rips_graph, verify_rips_qi
from .trees import (EndProfile, LazyTree, SimplicialTree, Subtree, TreeBall,
                    approximating_tree, bottleneck_check, convex_closure,
                    end_profile, induced_subtree, subtree_from_qi, tree_geodesic,
                    verify_closure_density)
from .words import Word, commutator, enumerate_ball, random_word

__version__ = "0.1.0"
