"""Matrix-product codes ``[C_1, ..., C_l] A`` and their Hermitian duals."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .code import BudgetExceeded, LinearCode, min_distance
from .errors import InnerDistanceUnavailable, LengthMismatch, NoRightInverse, RankDeficientA
from .field import FieldCtx
from .linalg import (
    Matrix,
    conj_matrix,
    hermitian_gram,
    identity,
    is_unitary,
    rank,
    right_inverse,
    right_kernel_hermitian,
    vstack,
)


@dataclass(frozen=True)
class MatrixProductSpec:
    inner: tuple[LinearCode, ...]
    A: Matrix

    def __post_init__(self):
        if len(self.inner) != self.A.rows:
            raise LengthMismatch(f"{len(self.inner)} inner codes for {self.A.rows} rows of A")
        lengths = {c.n for c in self.inner}
        if len(lengths) > 1:
            raise LengthMismatch(f"inner codes have different lengths {sorted(lengths)}")
        if rank(self.A) != self.A.rows:
            raise RankDeficientA("A is not of full row rank")

    @property
    def ctx(self) -> FieldCtx:
        return self.A.ctx

    @property
    def l(self) -> int:
        return self.A.rows

    @property
    def m(self) -> int:
        return self.A.cols

    @property
    def n(self) -> int:
        return self.inner[0].n

    def to_json(self) -> dict:
        return {"A": self.A.to_json(), "inner": [c.to_json() for c in self.inner]}

    @classmethod
    def from_json(cls, obj: dict, ctx: FieldCtx | None = None) -> MatrixProductSpec:
        A = Matrix.from_json(obj["A"], ctx)
        return cls(tuple(LinearCode.from_json(c, A.ctx) for c in obj["inner"]), A)


def _kron_rows(ctx: FieldCtx, coeffs: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Block row ``(c_1 G | c_2 G | ... )``."""
    return np.concatenate([ctx.mul(int(c), G) for c in coeffs], axis=1)


def mp_generator(inner: Sequence[Matrix], A: Matrix) -> Matrix:
    ctx = A.ctx
    blocks = [
        _kron_rows(ctx, A.a[i], G.a) for i, G in enumerate(inner) if G.rows
    ]
    if not blocks:
        return Matrix.zeros(ctx, 0, inner[0].cols * A.cols)
    return Matrix(ctx, np.concatenate(blocks, axis=0))


def mp_code(spec: MatrixProductSpec) -> LinearCode:
    return LinearCode(mp_generator([c.generator for c in spec.inner], spec.A))


def right_conjugate_inverse(A: Matrix) -> Matrix:
    """``B`` with ``A @ conj(B) = I``."""
    try:
        X = right_inverse(A)
    except ValueError as exc:
        raise NoRightInverse(str(exc)) from exc
    return conj_matrix(X)


def mp_hermitian_dual(spec: MatrixProductSpec) -> LinearCode:
    """Dual as ``[C_1^perp, ..., C_l^perp, F^n, ..., F^n] (B^T over H)``."""
    ctx, n = spec.ctx, spec.n
    B = right_conjugate_inverse(spec.A)
    H = right_kernel_hermitian(spec.A)
    mixer = vstack(B.T, H) if H.rows else B.T
    inner = [c.hermitian_dual().generator for c in spec.inner]
    inner += [identity(ctx, n)] * H.rows
    return LinearCode(mp_generator(inner, mixer))


def _conjugate_diagonal(A: Matrix) -> bool:
    gram = hermitian_gram(A).a
    Z = A.ctx.zero_code
    off = gram.copy()
    np.fill_diagonal(off, Z)
    return bool(np.all(off == Z) and np.all(np.diag(gram) != Z))


def mp_is_self_dual(spec: MatrixProductSpec) -> tuple[bool, str]:
    """Self-duality with the reason it was decided.

    A square unitary or conjugate-diagonal ``A`` with self-dual inner codes
    settles it; anything else is decided on the assembled generator.
    """
    inner_sd = all(c.is_self_dual_h() for c in spec.inner)
    if spec.l == spec.m and inner_sd:
        if is_unitary(spec.A):
            return True, "unitary"
        if _conjugate_diagonal(spec.A):
            return True, "conjugate-diagonal"
    return mp_code(spec).is_self_dual_h(), "direct"


def mp_self_orthogonal_submatrix(
    inner: Sequence[LinearCode], A: Matrix, l: int
) -> LinearCode:
    """``[C_1, ..., C_l] A^(l)`` with ``A^(l)`` the first l rows of a unitary A."""
    if not is_unitary(A):
        raise ValueError("A must be unitary")
    if len(inner) != l:
        raise LengthMismatch(f"{len(inner)} inner codes for l = {l}")
    sub = Matrix(A.ctx, A.a[:l])
    C = mp_code(MatrixProductSpec(tuple(inner), sub))
    if all(c.is_self_orthogonal_h() for c in inner):
        assert C.is_self_orthogonal_h()
    return C


def _row_code_distance(A: Matrix, rows: range, budget: int) -> int:
    return min_distance(LinearCode(Matrix(A.ctx, A.a[list(rows)])), budget=budget)


def mp_distance_lower_bound(
    spec: MatrixProductSpec,
    inner_distances: Sequence[int] | None = None,
    budget: int = 2**30,
) -> int:
    """Best of the two nested-row-code bounds ``min_i d(C_i) d(U_i)`` and ``min_i d(C_i) d(L_i)``."""
    if inner_distances is None:
        try:
            inner_distances = [c.min_distance(budget=budget) for c in spec.inner]
        except BudgetExceeded as exc:
            raise InnerDistanceUnavailable(str(exc)) from exc
    l = spec.l
    upper = min(
        inner_distances[i] * _row_code_distance(spec.A, range(0, i + 1), budget) for i in range(l)
    )
    lower = min(
        inner_distances[i] * _row_code_distance(spec.A, range(i, l), budget) for i in range(l)
    )
    return max(upper, lower)
