"""Does a cluster-wise dimension reduction preserve the graph of a Gaussian model?"""
from .errors import *  # noqa: F401,F403
from .graphs import (EdgeSet, GgmModel, Partition, cluster_graph, conditional_graph,
                     marginal_graph, model_from_covariance, model_from_precision, to_dot)
from .homotopy import (FactorModel, HomotopyVerdict, LatentRotationSpec, MarginalLinear,
                       MultivariateLinear, SpectralChordSpec, Status, StructuredPrecision,
                       analyze_reduction, analyze_transform, build_latent_rotation,
                       check_factor_homotopy, check_structured_precision, check_latent_rotation,
                       homotopy_verdict, spectral_chord_weak_homotopy, verify_spectral_chord)
from .linalg import (EigenDecomp, SymMatrix, ZeroPattern, cholesky, invert_pd, sym_eigen,
                     woodbury_precision, zero_pattern)
from .reduction import (LinearReduction, ReducedModel, build_mean, build_pca, fit_one_factor,
                        reduce_model, sample_reduce)
from .fixtures import asymmetric_bridge_fixture, worked_example

__version__ = "0.1.0"

__all__ = [n for n in dir() if not n.startswith("_")]
