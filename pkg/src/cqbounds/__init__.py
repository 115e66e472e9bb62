"""Channel-coding reliability quantities and zero-error capacity bounds for
classical and classical-quantum channels: Gallager exponents, the
sphere-packing exponent, Renyi information radii, the Lovasz theta function
and strong-product code constructions, all with certified numerics.
"""

from .channels import (
    CQChannel,
    ClassicalChannel,
    ConfusabilityGraph,
    ProbabilityDistribution,
    classical_to_pure,
    confusability_graph,
    make_graph,
    product_channel,
    uniform_distribution,
    validate_classical,
    validate_cq,
    validate_distribution,
)
from .divergences import d_min, kl, renyi_classical, renyi_quantum
from .errors import (
    ConvergenceError,
    InvariantViolationError,
    SizeCapError,
    ValidationError,
)
from .exponents import (
    ExponentPoint,
    RadiusResult,
    SpherePackingCurve,
    c_fb,
    capacity_classical,
    capacity_minmax,
    e0_classical,
    e0_max,
    e0_quantum,
    esp,
    esp_curve,
    handle_from_input_dist,
    r_inf_classical,
    r_inf_quantum,
    r_rho_primal,
    radius_solve,
)
from .matcore import (
    eig_hermitian,
    kron,
    mat_pow,
    schatten_norm,
    support_projector,
)
from .optim import (
    LogTraceFamily,
    SolverConfig,
    SolverReport,
    maximize_concave_simplex,
    minimize_convex_density,
    psd_project,
    sup_over_rho,
)
from .zeroerror import (
    CapacityBoundReport,
    LovaszValue,
    ProjectorRepresentation,
    ThetaCertificate,
    ValueSPResult,
    VectorRepresentation,
    capacity_lower_bound,
    certify_theorem3,
    cycle_graph,
    graph_power,
    lovasz_value,
    max_independent_set,
    projectors_from_vectors,
    strong_product,
    subpartition_check,
    theta,
    umbrella_c5,
    validate_projector_representation,
    validate_vector_representation,
    value_sp,
    verify_theta_certificate,
)

__version__ = "0.1.0"
