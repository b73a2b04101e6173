"""Curvature of left-invariant metrics on so(3) and so(4).

Computes sectional curvature of left-invariant metrics (closed form plus an
independent Koszul-formula oracle), evaluates curvature-variation
derivatives along inverse-linear metric paths, generates the known
nonnegatively curved metric families on so(4), and certifies or refutes
nonnegativity by seeded multistart minimization over 2-planes and
commuting pairs.
"""

from .algebra import (
    LieAlgebra,
    Subalgebra,
    bracket,
    diagonal_subalgebra,
    factor_subalgebra,
    project,
    regular_complement,
    so3,
    so4,
)
from .errors import (
    DegeneratePlane,
    DimensionMismatch,
    FamilyConstraintViolated,
    HorizonExceeded,
    LieCurvError,
    NormalFormUnavailable,
    NotCommuting,
    NotPositiveDefinite,
    SingularVector,
)
from .families import (
    ProductParams,
    S3ActionParams,
    TorusParams,
    barred_params,
    inverse_linear_eigs_s3,
    invariant_abelian_residual,
    product_invariant_planes,
    product_phi,
    s3_action_invariant_planes,
    s3_action_path_residual,
    s3_action_phi,
    s3_action_phi_at_time,
    s3_action_psi,
    s3_quotient_eigenvalues,
    torus_invariant_planes,
    torus_phi,
    torus_psi,
)
from .metric import (
    LeftInvariantMetric,
    b_term,
    koszul_oracle,
    normalized_curvature,
    puttmann_curvature,
)
from .normalform import (
    NormalFormBasis,
    NormalFormParams,
    normal_form_kappa3,
    normal_form_psi,
    psi_normal_form,
)
from .variation import (
    DerivativeReport,
    InverseLinearPath,
    derivative_report,
    finite_diff,
    k_of_t,
    k_second_deriv,
    kappa_of_t,
    kappa_third_deriv,
    phi_at,
    refined_derivative,
)
from .verify import (
    Budget,
    CommutingPair,
    CurvatureReport,
    EigenStructure,
    LemmaKReport,
    VERDICT_NEGATIVE,
    VERDICT_NONNEGATIVE,
    eigenstructure,
    infinitesimal_check,
    lemma_k_check,
    min_curvature,
    path_scan,
    sample_commuting_pairs,
)

__version__ = "0.1.0"
