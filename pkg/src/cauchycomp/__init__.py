"""Constructive completion of metric spaces over exact rationals.

Points of a completion are regular Cauchy sequences; isometries into any
complete space extend to the completion, and the extension is checked
against the commuting triangle.  A small finite-category kit searches for
the same universal object in finite categories.
"""
from .category import (
    FiniteCategory,
    RigidityError,
    check_rigidity,
    find_ption,
    is_mono,
    verify_category_axioms,
)
from .completion import (
    Completion,
    CPoint,
    RegularityError,
    SpaceMismatchError,
    approximate_by_base,
    canonical_embedding,
    check_commutes,
    check_regularity,
    completion_iso_roundtrip,
    dist_approx,
    embed,
    extend_isometry,
    extension,
    limit,
)
from .metric import (
    AxiomReport,
    DescriptorError,
    IsometryMap,
    Rational,
    SpacePresentation,
    check_isometry,
    parse_rational,
    rational_arith,
    render_rational,
    verify_metric_axioms,
)
from .spaces import builtin_generators, make_cpoint, make_space, padic_valuation

__version__ = "0.1.0"

__all__ = [
    "AxiomReport",
    "CPoint",
    "Completion",
    "DescriptorError",
    "FiniteCategory",
    "IsometryMap",
    "Rational",
    "RegularityError",
    "RigidityError",
    "SpaceMismatchError",
    "SpacePresentation",
    "approximate_by_base",
    "builtin_generators",
    "canonical_embedding",
    "check_commutes",
    "check_isometry",
    "check_regularity",
    "check_rigidity",
    "completion_iso_roundtrip",
    "dist_approx",
    "embed",
    "extend_isometry",
    "extension",
    "find_ption",
    "is_mono",
    "limit",
    "make_cpoint",
    "make_space",
    "padic_valuation",
    "parse_rational",
    "rational_arith",
    "render_rational",
    "verify_category_axioms",
    "verify_metric_axioms",
]
