"""Uniformly bounded representations from positive definite kernels on groups."""
from .cocycle import CocycleModel, cocycle_build, cocycle_identity_check, norm_growth_profile
from .embeddings import EmbeddingSpec, compression_probe, default_embedding, make_embedding
from .errors import (CompositionError, ModeError, NumericError, NumericIntegrityError,
                     ParameterError, ParseError, SchemaError, SizeError, UbrepError, WindowError)
from .groups import (Ball, FreeGroup, GroupModel, Lattice, SymmetricGroup, Torus, ball_enumerate,
                     full_ball, parse_group, sphere_sizes)
from .kernels import (Kernel, ball_overlap_kernel, gaussian_kernel, gram_random_kernel, psd_check,
                      tree_ray_kernel)
from .path import PathPoint, SchurReport, modulator, path_sweep, schur_row_sums
from .renorm import (RenormedSpace, TranslationAction, adjoint_residual, build_T, renormed_inner,
                     norm_bounds, rep_norm, rep_norm_infimum, spectral_data, translation_action)
from .theorem import (Certificate, CoefficientMatrix, almost_invariance_check, coefficients,
                      verify_converse, verify_forward)

__version__ = "0.1.0"
