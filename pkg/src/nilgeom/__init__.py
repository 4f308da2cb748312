"""
Nilpotent Lie brackets with symplectic, complex and hypercomplex structures:
Ricci curvature, minimal compatible metrics, critical types and gradient flows.
"""

from .algebra import (
    BracketTensor,
    delta,
    derivation_basis,
    gl_act,
    jacobi_residual,
    lower_central_series,
    nilpotency_index,
    symmetric_derivations,
    v_inner,
)
from .curvature import (
    CenterSplitting,
    F_value,
    detect_center_splitting,
    invariant_ricci,
    j_map,
    modified_htype_check,
    moment_map,
    ricci,
    scalar_curvature,
)
from .errors import (
    DocumentError,
    FlowDivergence,
    InternalConsistencyError,
    NilgeomError,
    NotLieBracket,
    NotNilpotent,
    NotTwoStep,
    RationalizationFailed,
)
from .flow import FlowTrace, flow_run, grad_F, normalized_metric_flow, orbit_infimum_probe
from .minimality import (
    CriticalType,
    IsometryInvariants,
    SolitonCertificate,
    Verdict,
    best_soliton_fit,
    critical_type,
    distinguish,
    isometry_invariants,
    normalize_bracket,
    soliton_test,
)
from .structures import (
    GeomStructure,
    StructureKind,
    integrability_residual,
    project_invariant,
    standard_structure,
)

__version__ = "0.1.0"
