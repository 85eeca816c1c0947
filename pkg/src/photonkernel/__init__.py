"""Photonic quantum-kernel classification at desk scale.

Simulates two-photon interferometer kernels (quantum, coherent,
unbunching), generates maximally kernel-separating classification tasks
via the geometric difference, and benchmarks SVM accuracy against
classical kernels, with exact and finite-shot Gram estimation.
"""

from ._accel import BACKEND
from .fock import (
    FockState,
    OutputDistribution,
    enumerate_configurations,
    full_distribution,
    permanent,
    submatrix,
    transition_probability,
)
from .kernels import (
    GramMatrix,
    cross_gram,
    gaussian_kernel,
    gram_matrix,
    linear_kernel,
    ntk_kernel,
    photonic_kernel_entry,
    polynomial_kernel,
    unbunching_kernel_entry,
)
from .mesh import MeshConfig, build_unitary, encode_phases, product_unitary, unitary_from_point
from .shots import (
    CoincidenceRecord,
    distribution_fidelity,
    estimate_kernel_entry,
    sample_counts,
    shot_budget_from_time,
)
from .svm import SvmModel, accuracy, predict, train, train_test_split
from .taskgen import (
    Dataset,
    GeometricDifferenceResult,
    generate_task,
    geometric_difference,
    model_complexity,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CoincidenceRecord",
    "Dataset",
    "FockState",
    "GeometricDifferenceResult",
    "GramMatrix",
    "MeshConfig",
    "OutputDistribution",
    "SvmModel",
    "accuracy",
    "build_unitary",
    "cross_gram",
    "distribution_fidelity",
    "encode_phases",
    "enumerate_configurations",
    "estimate_kernel_entry",
    "full_distribution",
    "gaussian_kernel",
    "generate_task",
    "geometric_difference",
    "gram_matrix",
    "linear_kernel",
    "model_complexity",
    "ntk_kernel",
    "permanent",
    "photonic_kernel_entry",
    "polynomial_kernel",
    "predict",
    "product_unitary",
    "sample_counts",
    "shot_budget_from_time",
    "submatrix",
    "train",
    "train_test_split",
    "transition_probability",
    "unbunching_kernel_entry",
    "unitary_from_point",
]
