"""Dynamic capacity regions of small quantum channels.

Library surface: state/channel primitives (qmat, channel), entropic
functionals (entropy), ensemble bound evaluation (cqstate), the weighted
trade-off optimizer and closed forms (dcap), region geometry (region), and
brute-force grid oracles (oracle). The `dyncap` console script exposes all
of it; see cli.
"""

from .channel import (
    KrausChannel,
    apply,
    complementary,
    dephasing,
    erasure,
    identity_channel,
    isometric_extension,
    parse_channel_spec,
    tensor_channel,
)
from .cqstate import (
    CqEnsemble,
    EntropicTriple,
    cef_point,
    diagonal_pair_ensemble,
    ensemble_from_json,
    entropic_triple,
    product_ensemble,
    verify_identities,
)
from .dcap import (
    OptimizerBudget,
    TradeoffWeights,
    additivity_gap,
    coherent_information_capacity,
    dcap_closed_form_dephasing,
    dcap_closed_form_erasure,
    dcap_optimize,
    ea_capacity,
    holevo_one_shot,
    objective,
)
from .entropy import (
    binary_entropy,
    coherent_information,
    conditional_mutual_information,
    mutual_information,
    vn_entropy,
)
from .errors import InvariantViolation, ValidationError
from .oracle import (
    OracleGrid,
    TwoCopyGrid,
    oracle_additivity,
    oracle_dcap,
    oracle_dephasing_diagonal_sufficiency,
    oracle_holevo_erasure,
)
from .qmat import (
    DensityOperator,
    hermitian_eigenvalues,
    max_entangled,
    partial_trace,
    purify,
    tensor,
)
from .region import (
    BoundarySample,
    BoundarySurface,
    RateTriple,
    UnitResourceCone,
    WeightVector,
    dephasing_bounds,
    dephasing_surface,
    erasure_bounds,
    erasure_surface,
    gamma,
    in_region,
    sample_boundary,
    supporting_hyperplane,
)

__version__ = "0.1.0"
