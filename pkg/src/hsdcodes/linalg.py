"""Dense matrices over GF(q^2).

Matrices act on row vectors: the linear map of a matrix ``M`` is
``x -> x @ M``, and ``A @ B`` applies ``A`` first.  Codewords are rows.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import ContextMismatch, DimensionMismatch, NotSquare
from .field import FieldCtx, FieldElement, field_from_order


def _mm(ctx: FieldCtx, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    Z, M = ctx.zero_code, ctx.order - 1
    if A.ndim == 2 and B.ndim == 2 and kernels.USE_NUMBA:
        return kernels.right_multiply(A[None], B, ctx.zech, Z, M)[0]
    acc = np.full(A.shape[:-1] + B.shape[-1:], Z, dtype=np.int64)
    for t in range(A.shape[-1]):
        prod = kernels._mul_np(A[..., :, t, None], B[..., t, None, :], Z, M)
        acc = kernels._add_np(acc, prod, ctx.zech, Z, M)
    return acc


class Matrix:
    """Immutable rectangular matrix of field codes."""

    __slots__ = ("ctx", "a")

    def __init__(self, ctx: FieldCtx, data):
        a = np.array(data, dtype=np.int64, copy=True)
        if a.ndim == 1:
            a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
        if a.ndim != 2:
            raise DimensionMismatch("matrix data must be two-dimensional")
        if a.size and (a.min() < 0 or a.max() > ctx.zero_code):
            raise ValueError("entry code out of range")
        a.setflags(write=False)
        self.ctx = ctx
        self.a = a

    # constructors -----------------------------------------------------
    @classmethod
    def parse(cls, ctx: FieldCtx, rows: Sequence[Sequence[str | int]]) -> Matrix:
        if len(rows) == 0:
            return cls(ctx, np.zeros((0, 0), dtype=np.int64))
        return cls(ctx, ctx.parse_array(rows))

    @classmethod
    def zeros(cls, ctx: FieldCtx, rows: int, cols: int) -> Matrix:
        return cls(ctx, np.full((rows, cols), ctx.zero_code, dtype=np.int64))

    @classmethod
    def from_elements(cls, ctx: FieldCtx, rows: Iterable[Iterable[FieldElement]]) -> Matrix:
        return cls(ctx, [[ctx(x).code for x in row] for row in rows])

    # shape --------------------------------------------------------------
    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    def __getitem__(self, idx):
        out = self.a[idx]
        if np.ndim(out) == 0:
            return FieldElement(self.ctx, int(out))
        if np.ndim(out) == 1:
            if isinstance(idx, tuple) and not isinstance(idx[0], (int, np.integer)):
                return Matrix(self.ctx, out.reshape(-1, 1))
            return Matrix(self.ctx, out.reshape(1, -1))
        return Matrix(self.ctx, out)

    def row(self, i: int) -> np.ndarray:
        return self.a[i]

    # algebra ------------------------------------------------------------
    def _same(self, other: Matrix) -> None:
        if self.ctx is not other.ctx and self.ctx.key != other.ctx.key:
            raise ContextMismatch("matrices over different fields")

    def __matmul__(self, other: Matrix) -> Matrix:
        return matmul(self, other)

    def __add__(self, other: Matrix) -> Matrix:
        self._same(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} + {other.shape}")
        return Matrix(self.ctx, self.ctx.add(self.a, other.a))

    def __sub__(self, other: Matrix) -> Matrix:
        return self + (-other)

    def __neg__(self) -> Matrix:
        return Matrix(self.ctx, self.ctx.neg(self.a))

    def __mul__(self, s) -> Matrix:
        return scalar_mul(s, self)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> Matrix:
        return matrix_power(self, e)

    @property
    def T(self) -> Matrix:
        return transpose(self)

    def conj(self) -> Matrix:
        return conj_matrix(self)

    @property
    def H(self) -> Matrix:
        """Conjugate transpose."""
        return Matrix(self.ctx, self.ctx.conj(self.a.T))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.ctx.key == other.ctx.key and np.array_equal(self.a, other.a)

    def __hash__(self) -> int:
        return hash((self.ctx.key, self.a.shape, self.a.tobytes()))

    def rank(self) -> int:
        return echelon_form(self)[1]

    def is_zero(self) -> bool:
        return bool(np.all(self.a == self.ctx.zero_code))

    def __repr__(self) -> str:
        body = "\n".join(" ".join(f"{s:>5}" for s in r) for r in self.ctx.format_array(self.a)) if self.a.size else ""
        return f"Matrix {self.rows}x{self.cols} over GF({self.ctx.order})\n{body}"

    # serialisation ------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "q2": self.ctx.order,
            "rows": self.rows,
            "cols": self.cols,
            "data": self.ctx.format_array(self.a) if self.rows else [],
        }

    @classmethod
    def from_json(cls, obj: dict, ctx: FieldCtx | None = None) -> Matrix:
        ctx = ctx or field_from_order(int(obj["q2"]))
        if ctx.order != int(obj["q2"]):
            raise ContextMismatch("matrix file is over a different field")
        if not obj["data"]:
            return cls.zeros(ctx, int(obj.get("rows", 0)), int(obj.get("cols", 0)))
        m = cls.parse(ctx, obj["data"])
        if m.shape != (int(obj["rows"]), int(obj["cols"])):
            raise DimensionMismatch("declared shape does not match data")
        return m


# ----------------------------------------------------------------------


def matmul(A: Matrix, B: Matrix) -> Matrix:
    A._same(B)
    if A.cols != B.rows:
        raise DimensionMismatch(f"{A.shape} @ {B.shape}")
    return Matrix(A.ctx, _mm(A.ctx, A.a, B.a))


def transpose(A: Matrix) -> Matrix:
    return Matrix(A.ctx, A.a.T)


def conj_matrix(A: Matrix) -> Matrix:
    return Matrix(A.ctx, A.ctx.conj(A.a))


def scalar_mul(s, A: Matrix) -> Matrix:
    c = A.ctx(s).code
    return Matrix(A.ctx, A.ctx.mul(c, A.a))


def hstack(*ms: Matrix) -> Matrix:
    ctx = ms[0].ctx
    for m in ms[1:]:
        ms[0]._same(m)
        if m.rows != ms[0].rows:
            raise DimensionMismatch("hstack needs equal row counts")
    return Matrix(ctx, np.hstack([m.a for m in ms]))


def vstack(*ms: Matrix) -> Matrix:
    ctx = ms[0].ctx
    ms = [m for m in ms if m.rows] or [ms[0]]
    for m in ms[1:]:
        ms[0]._same(m)
        if m.cols != ms[0].cols:
            raise DimensionMismatch("vstack needs equal column counts")
    return Matrix(ctx, np.vstack([m.a for m in ms]))


def identity(ctx: FieldCtx, n: int) -> Matrix:
    a = np.full((n, n), ctx.zero_code, dtype=np.int64)
    np.fill_diagonal(a, 0)
    return Matrix(ctx, a)


def all_ones(ctx: FieldCtx, n: int, cols: int | None = None) -> Matrix:
    return Matrix(ctx, np.zeros((n, n if cols is None else cols), dtype=np.int64))


def diag(ctx: FieldCtx, entries: Sequence) -> Matrix:
    n = len(entries)
    a = np.full((n, n), ctx.zero_code, dtype=np.int64)
    for i, e in enumerate(entries):
        a[i, i] = ctx(e).code
    return Matrix(ctx, a)


def permutation_matrix(ctx: FieldCtx, perm: Sequence[int]) -> Matrix:
    """Matrix sending basis row ``b_i`` to ``b_perm[i]``."""
    n = len(perm)
    a = np.full((n, n), ctx.zero_code, dtype=np.int64)
    a[np.arange(n), np.asarray(perm)] = 0
    return Matrix(ctx, a)


def matrix_power(A: Matrix, e: int) -> Matrix:
    if A.rows != A.cols:
        raise NotSquare("power of a non-square matrix")
    if e < 0:
        return matrix_power(inverse(A), -e)
    result = identity(A.ctx, A.rows)
    base = A
    while e:
        if e & 1:
            result = result @ base
        e >>= 1
        if e:
            base = base @ base
    return result


def echelon_form(M: Matrix) -> tuple[Matrix, int, list[int]]:
    """Reduced row echelon form, rank and pivot columns.

    Pivot is the leftmost column with a nonzero entry at or below the
    current row, taken from the topmost such row and scaled to 1.
    """
    ctx = M.ctx
    Z = ctx.zero_code
    A = M.a.copy()
    rows, cols = A.shape
    r = 0
    pivots: list[int] = []
    for col in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, col] != Z)
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = ctx.mul(A[r], ctx.inv(int(A[r, col])))
        f = A[:, col].copy()
        f[r] = Z
        A = ctx.add(A, ctx.mul(ctx.neg(f)[:, None], A[r][None, :]))
        pivots.append(col)
        r += 1
    return Matrix(ctx, A), r, pivots


def rank(M: Matrix) -> int:
    return echelon_form(M)[1]


def row_basis(M: Matrix) -> Matrix:
    """Nonzero rows of the reduced echelon form."""
    E, r, _ = echelon_form(M)
    return Matrix(M.ctx, E.a[:r]) if r else Matrix.zeros(M.ctx, 0, M.cols)


def kernel(M: Matrix) -> Matrix:
    """Canonical basis (rows) of ``{y : M @ y^T = 0}``."""
    ctx = M.ctx
    E, r, pivots = echelon_form(M)
    free = [c for c in range(M.cols) if c not in pivots]
    basis = np.full((len(free), M.cols), ctx.zero_code, dtype=np.int64)
    for b, f in enumerate(free):
        basis[b, f] = 0
        for i, pc in enumerate(pivots):
            basis[b, pc] = ctx.neg(int(E.a[i, f]))
    return Matrix(ctx, basis) if free else Matrix.zeros(ctx, 0, M.cols)


def right_kernel_hermitian(M: Matrix) -> Matrix:
    """Basis of ``{y : M_i * y = 0 for every row M_i}`` under ``x*y = sum x_i y_i^q``.

    ``M_i * y = 0`` iff ``y . conj(M_i) = 0``, so this is the Euclidean
    kernel of ``conj(M)``.
    """
    return kernel(conj_matrix(M))


def hermitian_gram(A: Matrix, B: Matrix | None = None) -> Matrix:
    """``A @ conj(B)^T``: entry (i, j) is ``A_i * B_j``."""
    B = A if B is None else B
    return A @ B.H


def is_unitary(M: Matrix) -> bool:
    if M.rows != M.cols:
        raise NotSquare(f"{M.shape} is not square")
    return hermitian_gram(M) == identity(M.ctx, M.rows)


def inverse(M: Matrix) -> Matrix:
    if M.rows != M.cols:
        raise NotSquare(f"{M.shape} is not square")
    n = M.rows
    E, r, pivots = echelon_form(hstack(M, identity(M.ctx, n)))
    if r < n or pivots[n - 1] >= n:
        raise ZeroDivisionError("singular matrix")
    return Matrix(M.ctx, E.a[:, n:])


def right_inverse(A: Matrix) -> Matrix:
    """Some ``X`` with ``A @ X = I`` for a full-row-rank ``A``."""
    _, r, pivots = echelon_form(A)
    if r < A.rows:
        raise ValueError("matrix is not of full row rank")
    sub = Matrix(A.ctx, A.a[:, pivots])
    X = np.full((A.cols, A.rows), A.ctx.zero_code, dtype=np.int64)
    X[pivots, :] = inverse(sub).a
    return Matrix(A.ctx, X)


def in_row_space(A: Matrix, v: Matrix) -> bool:
    return rank(vstack(A, v)) == rank(A)


def row_space_equal(A: Matrix, B: Matrix) -> bool:
    if A.cols != B.cols:
        return False
    ra, rb = rank(A), rank(B)
    return ra == rb and rank(vstack(A, B)) == ra


def hermitian_inner(ctx: FieldCtx, x: np.ndarray, y: np.ndarray) -> int:
    """``x * y = sum x_i y_i^q`` on code vectors; returns a code."""
    prods = ctx.mul(np.asarray(x), ctx.conj(np.asarray(y)))
    acc = ctx.zero_code
    for c in np.atleast_1d(prods):
        acc = ctx.add(acc, int(c))
    return acc
