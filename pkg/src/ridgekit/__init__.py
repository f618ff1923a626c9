"""Density ridge estimation under increasing concave power transformations.

The library estimates d-dimensional ridges of (transformed) densities with
the subspace-constrained mean-shift family, provides analytic models whose
ridges are known in closed form, and ships numerical property suites that
re-check the structural facts (eigenspace bias under rank-one updates, ridge
nesting along the power exponent, Hausdorff orderings) at desk scale.
"""

from .cloud import PointCloud
from .datagen import (NoiseSpec, add_noise, sample_bimodal, sample_circle,
                      sample_sphere, sample_swiss_roll_2d)
from .density import (BimodalModel, DensityModel, KdeModel, UnimodalModel,
                      eval_grad, eval_hess, eval_p, kde_weights, weighted_center)
from .exceptions import (DegenerateProjection, DomainError, InvalidInput,
                         IsolatedPoint, RidgeKitError, ZeroGradient)
from .metrics import (CircleManifold, ExplicitManifold, ReferenceManifold,
                      SphereManifold, denoise_mse, directed_hausdorff,
                      hausdorff, hausdorff_to_projection, manifold_distances,
                      margin, pca_subspace, project_reference)
from .ridge import (GammaMatrix, GridRidgeSet, NormalField, RidgeQuery,
                    analytic_ridge_bimodal, analytic_ridge_unimodal,
                    cosine_score, gamma, gamma_local, grid_ridge_set,
                    is_ridge_point, kde_ridge_condition, normal_field,
                    ridge_membership)
from .scms import (MethodKind, ScmsConfig, ScmsResult, ScmsState,
                   attraction_force, build_state, intermediate_matrix, step)
from .scms import run as scms_run
from .spectral import (EigenPair, Projector, check_rank_one_bias,
                       check_tail_spectrum_preserved, sym_eig, top_projector)
from .transform import (PowerTransform, composed_grad, composed_hess,
                        modified_hessian, modified_hessian_scaled,
                        reparam_check)
from .verify import SuiteResult, run_suites

__version__ = "0.1.0"

__all__ = [
    "PointCloud",
    "NoiseSpec", "add_noise", "sample_bimodal", "sample_circle",
    "sample_sphere", "sample_swiss_roll_2d",
    "BimodalModel", "DensityModel", "KdeModel", "UnimodalModel",
    "eval_grad", "eval_hess", "eval_p", "kde_weights", "weighted_center",
    "DegenerateProjection", "DomainError", "InvalidInput", "IsolatedPoint",
    "RidgeKitError", "ZeroGradient",
    "CircleManifold", "ExplicitManifold", "ReferenceManifold", "SphereManifold",
    "denoise_mse", "directed_hausdorff", "hausdorff", "hausdorff_to_projection",
    "manifold_distances", "margin", "pca_subspace", "project_reference",
    "GammaMatrix", "GridRidgeSet", "NormalField", "RidgeQuery",
    "analytic_ridge_bimodal", "analytic_ridge_unimodal", "cosine_score",
    "gamma", "gamma_local", "grid_ridge_set", "is_ridge_point",
    "kde_ridge_condition", "normal_field", "ridge_membership",
    "MethodKind", "ScmsConfig", "ScmsResult", "ScmsState",
    "attraction_force", "build_state", "intermediate_matrix", "scms_run", "step",
    "EigenPair", "Projector", "check_rank_one_bias",
    "check_tail_spectrum_preserved", "sym_eig", "top_projector",
    "PowerTransform", "composed_grad", "composed_hess", "modified_hessian",
    "modified_hessian_scaled", "reparam_check",
    "SuiteResult", "run_suites",
]
