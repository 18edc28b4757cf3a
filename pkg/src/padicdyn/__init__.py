"""Finite-precision 1-Lipschitz dynamics on Z_p^k and its conjugation to Z_p."""

from .conjugation import (
    ConjugationBundle,
    OrbitPartition,
    PermutationP,
    apply_T,
    conjugate_backward,
    conjugate_forward,
    deinterleave,
    interleave,
    orbit_blocks,
    solve_P,
    verify_scalar_T_convention,
)
from .maps import (
    Affine,
    Identity,
    InterleavedOdometer,
    Odometer,
    Table,
    TreeSampled,
    TruncatedMap,
    compose,
    cycle_structure,
    induce,
    invert,
    is_bijective_at,
    is_ergodic_up_to,
    is_measure_preserving_up_to,
    is_one_lipschitz,
    is_transitive_at,
    load,
    save,
)
from .padic import (
    TruncatedPadic,
    TruncatedVector,
    Valuation,
    add_with_carry,
    decode,
    encode,
    reduce,
    sample_uniform,
    vec_distance,
)
from .prng import KeystreamConfig, TreeSampledMap, keystream, sample_transitive, uniformity_report

__version__ = "0.1.0"
