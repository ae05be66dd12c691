"""Numerical tolerances shared by every module."""
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-12       # absolute, entrywise
    trace: float = 1e-10
    psd: float = 1e-10             # smallest admissible eigenvalue is -psd
    orthonormal: float = 1e-10
    reconstruction: float = 1e-9   # spectral norm
    projector: float = 1e-9
    kernel: float = 1e-12          # lambda_i + lambda_j <= kernel * ||A|| counts as singular
    kernel_rhs: float = 1e-10      # |B_ij| <= kernel_rhs * ||B|| is negligible on the kernel
    merge: float = 1e-8            # eigenvalue clustering for POM extraction
    pom_completeness: float = 1e-9
    zero_probability: float = 1e-14
    normalization: float = 1e-8


DEFAULT_TOLERANCES = Tolerances()
