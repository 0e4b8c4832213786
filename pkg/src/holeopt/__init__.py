"""Dirichlet eigenvalues of planar domains with a circular hole.

Library layout:

* ``geometry``       -- parametric domains, signed distance, projections
* ``meshing``        -- graded triangulations of the punctured domain
* ``eigensolver``    -- P1 eigenvalue solver and boundary flux recovery
* ``shape_analysis`` -- Hadamard derivative of the hole position, FD oracle,
                        small-hole asymptotic fit
* ``optimizer``      -- projected gradient ascent of the hole position
* ``blowup``         -- model harmonic problems (half-plane-minus-ball,
                        parabola barrier) and their quantitative checks
* ``cli``            -- configuration, orchestration, result bundles
"""

__version__ = "0.1.0"

from .errors import (AmbiguousProjection, ConfigError, FitDiverged,
                     GeometryError, HoleoptError, InfeasibleStart,
                     MeshFailure, NoConvergence, OutsideMesh,
                     SingularBoundaryMass)
from .geometry import (ArcDecomposition, Hole, PuncturedDomain, SmoothDomain,
                       arc_decomposition, contains_ball, project_to_boundary,
                       signed_distance)
from .meshing import (Mesh, check_mesh_invariants, generate_domain_mesh,
                      generate_mesh, mesh_statistics, write_vtk)
from .eigensolver import (EigenSolution, HoleFlux, assemble,
                          convergence_study, evaluate_u, hole_flux,
                          outer_flux_min, solve_lambda1)
from .shape_analysis import (FDResult, FlucherFit, ShapeReport,
                             arc_integrals, fd_derivative,
                             fit_asymptotic_coefficients, flucher_fit,
                             hadamard_derivative)
from .optimizer import (Trajectory, gradient_noise_floor, landscape_scan,
                        optimize_hole)
from .blowup import (HarmonicSolution, ParabolaProblem, TruncatedK,
                     angular_derivative, barrier_comparison, blowdown_check,
                     bottom_bound_scan, hopf_arc_check,
                     side_and_top_integrals, solve_blowup, solve_parabola,
                     truncated_k_mesh)
