"""kone: decide, construct, and certify common invariant cones of matrix families."""

from .algorithms import (
    Certificate,
    ConeFound,
    CyclicTree,
    DirectRun,
    Inconclusive,
    InvarianceProof,
    IrreducibilityReport,
    MatrixFamily,
    MinimalConeFound,
    NegativePairing,
    NoInvariantCone,
    Outcome,
    PairWitness,
    PerronBreakdown,
    PolyhedralRun,
    SimplexCover,
    VerificationFailed,
    direct_algorithm,
    irreducibility_check,
    maximal_cone,
    minimal_cone,
    polyhedral_cone,
    primal_dual,
    verify_certificate,
)
from .cone import (
    ConicPolytope,
    DimensionMismatch,
    GeneratorCone,
    HalfspaceCone,
    ScalingContext,
    UndefinedConeNorm,
    ZeroVector,
    add_ray,
    apply_scaling,
    cone_norm,
    is_full_space,
    membership,
    polytope_membership,
    ray_angle,
)
from .linalg import (
    DEFAULT_TOL,
    NonPositivePairing,
    PerronData,
    Tolerances,
    build_alignment,
    leading_eigenpair,
    mean_matrix,
    orthonormal_completion,
)
from .words import (
    CyclicRoot,
    NonSimpleRoot,
    NoPerronInProduct,
    Word,
    ZeroCycle,
    cyclic_root,
    enumerate_words,
    product_of_word,
)

__version__ = "0.1.0"
