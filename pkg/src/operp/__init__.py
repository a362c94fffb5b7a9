"""Exact models of quantum permutation groups built from two projections."""

__version__ = "0.1.0"

from .algebra import (
    CHI00, CHI01, CHI10, CHI11, ONE, P, Q, ZERO,
    AlgebraElement, Character, ContractError, ExpansionBudgetError, FactoredTensor, TensorElement,
    char_eval, char_eval_legs, tensor,
)
from .models import (
    MagicMatrix, OperpChain, build_M1, build_M1_general, build_M1_rr, build_R, build_R_abcd, build_Rhat,
    is_magic, operp, sigma_product, tower,
)
from .polynomials import StarPolynomial, parse_polynomial, poly_eval, poly_eval_operp

__all__ = [
    "CHI00", "CHI01", "CHI10", "CHI11", "ONE", "P", "Q", "ZERO",
    "AlgebraElement", "Character", "ContractError", "ExpansionBudgetError", "FactoredTensor", "TensorElement",
    "char_eval", "char_eval_legs", "tensor",
    "MagicMatrix", "OperpChain", "build_M1", "build_M1_general", "build_M1_rr", "build_R", "build_R_abcd",
    "build_Rhat", "is_magic", "operp", "sigma_product", "tower",
    "StarPolynomial", "parse_polynomial", "poly_eval", "poly_eval_operp",
]
