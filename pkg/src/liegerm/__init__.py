"""Tangent algebras of polynomial variety germs and their Lie-theoretic certificates."""

from .derivations import (
    Variety,
    ambient_algebra,
    integral_ideal,
    integral_variety,
    irredundancy_check,
    is_smooth,
    is_tangent,
    recovery_check,
    sing_chain,
    sing_stability_check,
    singular_locus,
    tangent_algebra,
    tangent_family,
)
from .errors import DomainError, ExtractionError, InversionError, LiegermError, ParseError, RingMismatchError
from .expr_io import parse_field, parse_poly, parse_session, render
from .groebner import (
    Ideal,
    VfModule,
    buchberger,
    krull_dimension,
    membership,
    module_equal,
    module_intersect,
    normal_form,
    quotient_by_unit_vector,
    syzygy_module,
)
from .lie import (
    AutoMap,
    Certificate,
    ad_probe,
    auto_ops,
    balanced_certificate,
    bracket,
    bracket_closure_check,
    conjugate_field,
    conjugation_check,
    lambda_apply,
    lambda_factor_extract,
    visibility_diagnostic,
)
from .poly import Poly, RingCtx, VField, apply_field, partial, ring_ops, squarefree_part

__version__ = "0.1.0"
