"""Concurrence measures and numerical checks of multipartite monogamy for few-qubit states."""

from .linalg import (
    NotPSDError,
    ValidationError,
    herm_eig,
    herm_eigvals,
    kron,
    partial_trace,
    psd_sqrt,
    purity,
    reduce_pure,
)
from .measures import (
    MeasureError,
    ckw_gap_nqubit,
    gen_concurrence_sq_pure,
    linear_entropy,
    mmc_residual,
    multipartite_gap,
    pure_bipartite_c2,
    three_tangle_pure,
    wootters_concurrence,
)
from .roof import (
    Ensemble,
    RoofConfig,
    RoofEstimate,
    UnsupportedError,
    brute_force_roof,
    convex_roof,
    eigendecomposition_ensemble,
    mix_ensemble,
)
from .sampler import SampleStream, haar_pure, haar_pure_batch, random_mixed, random_mixed_batch

__version__ = "0.1.0"
