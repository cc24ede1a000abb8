"""Classification and closed-form solution of Abel equations of AIR type."""

from .classify import (
    CanonicalClass,
    ClassTag,
    Pattern,
    RootStructure,
    classify,
    cubic_roots,
    normalize_numerator,
    reduce_to_class,
    reduce_x,
)
from .core import Mobius, RationalAIR, StepKind, TransformChain, TransformStep, apply_mobius_x, apply_mobius_y, chain_invert
from .errors import AirError
from .parser import parse_ode, render
from .solve import (
    BasisPair,
    ImplicitSolution,
    build_implicit_from_basis,
    integrate_ode,
    pull_back,
    residual_verify,
    select_start,
    solve_canonical,
    verify,
)

__all__ = [
    "AirError",
    "BasisPair",
    "CanonicalClass",
    "ClassTag",
    "ImplicitSolution",
    "Mobius",
    "Pattern",
    "RationalAIR",
    "RootStructure",
    "StepKind",
    "TransformChain",
    "TransformStep",
    "apply_mobius_x",
    "apply_mobius_y",
    "build_implicit_from_basis",
    "chain_invert",
    "classify",
    "cubic_roots",
    "integrate_ode",
    "normalize_numerator",
    "parse_ode",
    "pull_back",
    "reduce_to_class",
    "reduce_x",
    "render",
    "residual_verify",
    "select_start",
    "solve_canonical",
    "verify",
]
