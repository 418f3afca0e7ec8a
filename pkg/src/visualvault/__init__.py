"""Wallet-seed vault unlocked by a visual password.

A 512-bit binary template derived from an image embedding releases the
stored seed if and only if a fresh template lies within Hamming
distance r of the enrolled one.  The template never leaves the device
in the clear: the published record hides it behind a modular
subset-product encoding plus a hashed point lock.
"""

from .params import (
    SystemParams,
    ParameterError,
    default_params,
    derive_q_bits,
    lambda_exact,
    load_params,
    r1_bound,
    r2_bound,
    save_params,
    validate,
)
from .numtheory import (
    PrimeSample,
    generate_safe_prime,
    rational_reconstruct,
    sample_primes,
    smooth_factor,
    subset_product,
)
from .templates import Template
from .vault import (
    Encoding,
    MalformedRecordError,
    MultiVault,
    PointLock,
    VaultRecord,
    decode,
    encode,
    enroll,
    enroll_multi,
    load_record,
    make_lock,
    open_lock,
    retrieve_multi,
    retrieve_seed,
    save_record,
)
from .pipeline import (
    Embedding,
    ProjectionMatrix,
    binarize,
    generate_matrix,
    hamming,
    load_matrix,
    save_matrix,
)
from .evalharness import (
    DetPoint,
    ScoreSet,
    cross_fa_count,
    det_curve,
    eer,
    far_frr,
    pair_scores,
)

__version__ = "0.1.0"

__all__ = [
    "SystemParams",
    "ParameterError",
    "default_params",
    "derive_q_bits",
    "lambda_exact",
    "load_params",
    "r1_bound",
    "r2_bound",
    "save_params",
    "validate",
    "PrimeSample",
    "generate_safe_prime",
    "rational_reconstruct",
    "sample_primes",
    "smooth_factor",
    "subset_product",
    "Template",
    "Encoding",
    "MalformedRecordError",
    "MultiVault",
    "PointLock",
    "VaultRecord",
    "decode",
    "encode",
    "enroll",
    "enroll_multi",
    "load_record",
    "make_lock",
    "open_lock",
    "retrieve_multi",
    "retrieve_seed",
    "save_record",
    "Embedding",
    "ProjectionMatrix",
    "binarize",
    "generate_matrix",
    "hamming",
    "load_matrix",
    "save_matrix",
    "DetPoint",
    "ScoreSet",
    "cross_fa_count",
    "det_curve",
    "eer",
    "far_frr",
    "pair_scores",
]
