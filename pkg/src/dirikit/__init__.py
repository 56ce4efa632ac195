"""Finite-dimensional Dirichlet-space toolkit.

Builds weighted-graph Dirichlet forms and their Markovian semigroups,
searches for order isomorphisms intertwining two such semigroups, and
numerically certifies the rigidity identities exact intertwiners satisfy:
unitarity up to a constant, the measure pushforward identity, constant
scaling in the recurrent case, the jump-measure transformation law, the
resistance-metric isometry, and the bijection between intrinsic-metric
families.
"""

from .beurling import (
    JumpKilling,
    decompose,
    induced_killing,
    reconstruct,
    truncated_form,
    truncated_form_via_jump,
    verify_jump_transform,
)
from .core import (
    Generator,
    GraphForm,
    MeasureSpace,
    build_form,
    evaluate,
    form_norm,
    generate,
    generator,
    sierpinski_corners,
)
from .errors import DirikitError
from .metrics import (
    PseudoMetric,
    canonical_intrinsic_metric,
    effective_resistance,
    is_intrinsic,
    pushforward_metric,
    resistance_matrix,
    verify_intrinsic_bijection,
    verify_resistance_isometry,
)
from .orderiso import (
    OrderIso,
    adjoint,
    apply,
    certify,
    doob_pair,
    intertwining_residual,
    operator_constant,
)
from .report import Check, VerificationReport
from .search import (
    EquivalenceVerdict,
    SearchOptions,
    equivalence_verdict,
    find_intertwiners,
)
from .spectral import (
    SpectralData,
    check_truncation,
    commutant_is_trivial,
    find_nonconstant_excessive,
    is_excessive,
    is_irreducible,
    is_recurrent,
    semigroup,
    spectral_data,
)
from .tolerances import DEFAULT_TOL, Tolerance

__version__ = "0.1.0"

__all__ = [
    "Check",
    "DEFAULT_TOL",
    "DirikitError",
    "EquivalenceVerdict",
    "Generator",
    "GraphForm",
    "JumpKilling",
    "MeasureSpace",
    "OrderIso",
    "PseudoMetric",
    "SearchOptions",
    "SpectralData",
    "Tolerance",
    "VerificationReport",
    "adjoint",
    "apply",
    "build_form",
    "canonical_intrinsic_metric",
    "certify",
    "check_truncation",
    "commutant_is_trivial",
    "decompose",
    "doob_pair",
    "effective_resistance",
    "equivalence_verdict",
    "evaluate",
    "find_intertwiners",
    "find_nonconstant_excessive",
    "form_norm",
    "generate",
    "generator",
    "induced_killing",
    "intertwining_residual",
    "is_excessive",
    "is_intrinsic",
    "is_irreducible",
    "is_recurrent",
    "operator_constant",
    "pushforward_metric",
    "reconstruct",
    "resistance_matrix",
    "semigroup",
    "sierpinski_corners",
    "spectral_data",
    "truncated_form",
    "truncated_form_via_jump",
    "verify_intrinsic_bijection",
    "verify_jump_transform",
    "verify_resistance_isometry",
]
