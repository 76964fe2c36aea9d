"""invforge: exact polynomial invariants of multipartite quantum states.

Canonical graded bases of invariants under local unitary factors,
determinant-1 local factors, and the mixed group with a unitary on a
purifying party, built by intersecting per-party product spans with
exact Gaussian-rational linear algebra. On top of the bases sit
fingerprints, degree-bounded equivalence verdicts for states and
channels, and independent floating-point cross-checks.
"""

from .errors import (
    DimensionMismatchError,
    InvforgeError,
    ModeError,
    PurificationError,
    ResourceLimitError,
    ShapeMismatchError,
)
from .scalar import QQi
from .linalg import SparseVector, Subspace, intersect, product_span, rref
from .poly import (
    BiMonomial,
    DegreeDescriptor,
    SparsePoly,
    SystemShape,
    conjugate_poly,
    from_coeff_vector,
    mul_poly,
    poly_from_dict,
    poly_to_dict,
    to_coeff_vector,
    vector_multiplier,
)
from .lu import (
    DegreeBound,
    DerksenParameters,
    LuipBasis,
    lu_degree_bound,
    luip_space,
    norm_invariant,
    party_products,
    party_product_space,
    purity_polynomial,
    reduced_generators,
)
from .sl import (
    Flattening,
    SlipBasis,
    SluipBasis,
    minor_generators,
    sl_degree_bound,
    slip_space,
    sluip_space,
)
from .states import (
    DensityMatrix,
    KrausChannel,
    LocalUnitary,
    StateVector,
    apply_local_factors,
    apply_local_unitary,
    channel_from_dict,
    channel_to_dict,
    choi_state,
    density_from_dict,
    density_to_dict,
    evaluate,
    partial_trace,
    purify,
    random_local_unitary,
    random_special_linear_factors,
    random_state,
    standard_state,
    state_from_dict,
    state_to_dict,
    tensor_power,
)
from .equivalence import (
    Fingerprint,
    InvarianceReport,
    Verdict,
    basis_from_dict,
    channel_compare,
    compare_lu,
    fingerprint,
    float_rank_oracle,
    intersection_dim_oracle,
    numeric_invariance_check,
    sl_projective_compare,
)

__version__ = "0.1.0"
