"""Hermitian self-dual codes over GF(q^2) built from unitary matrices."""

from .field import FieldCtx, FieldElement, alpha_for_minus_one, field_from_order, field_new, norm_root

__version__ = "0.1.0"

__all__ = [
    "FieldCtx",
    "FieldElement",
    "alpha_for_minus_one",
    "field_from_order",
    "field_new",
    "norm_root",
]
