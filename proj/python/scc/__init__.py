"""Sparse dictionary learning by stochastic coordinate coding.

Samples are the columns of a p x n float64 array; dictionaries are p x m and
codes are returned as dense m x n arrays.
"""

from ._scc import (
    SccError,
    default_lambda,
    encode,
    extract_patches,
    generate_planted,
    lasso_cd,
    lasso_prox,
    objective,
    preprocess,
    read_codes,
    read_matrix,
    soft_threshold,
    train,
    write_codes,
    write_matrix,
)

__all__ = [
    "SccError",
    "default_lambda",
    "encode",
    "extract_patches",
    "generate_planted",
    "lasso_cd",
    "lasso_prox",
    "objective",
    "preprocess",
    "read_codes",
    "read_matrix",
    "soft_threshold",
    "train",
    "write_codes",
    "write_matrix",
]
