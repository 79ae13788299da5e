"""Linear codes over GF(q^2): Hermitian duality, minimum distance, MDS test."""

from __future__ import annotations

import itertools
import math
from typing import Literal

import numpy as np

from . import kernels
from .errors import BudgetExceeded, SubsetCountTooLarge
from .field import FieldCtx, field_from_order
from .linalg import Matrix, conj_matrix, echelon_form, hermitian_gram, kernel, row_basis, row_space_equal

DEFAULT_BUDGET = 2**30
MAX_SUBSETS = 10**7


class LinearCode:
    """Row space of a generator matrix.

    A rank-deficient generator is replaced by its echelon basis; a full-rank
    one is kept verbatim so constructions keep their displayed shape.
    """

    def __init__(self, generator: Matrix, claimed_d: int | None = None):
        _, r, _ = echelon_form(generator)
        self.generator = generator if r == generator.rows else row_basis(generator)
        self.claimed_d = claimed_d

    @property
    def ctx(self) -> FieldCtx:
        return self.generator.ctx

    @property
    def n(self) -> int:
        return self.generator.cols

    @property
    def k(self) -> int:
        return self.generator.rows

    def __repr__(self) -> str:
        return f"LinearCode[{self.n},{self.k}] over GF({self.ctx.order})"

    def same_code(self, other: LinearCode) -> bool:
        return row_space_equal(self.generator, other.generator)

    # duality ----------------------------------------------------------
    def euclidean_dual(self) -> LinearCode:
        return LinearCode(kernel(self.generator))

    def hermitian_dual(self) -> LinearCode:
        return LinearCode(conj_matrix(kernel(self.generator)))

    def is_self_orthogonal_h(self) -> bool:
        if self.k == 0:
            return True
        return hermitian_gram(self.generator).is_zero()

    def is_self_dual_h(self) -> bool:
        return 2 * self.k == self.n and self.is_self_orthogonal_h()

    # distance ---------------------------------------------------------
    def enumeration_cost(self) -> int:
        """Field operations for a full projective scan."""
        Q = self.ctx.order
        return ((Q**self.k - 1) // (Q - 1)) * self.n

    def min_distance(
        self,
        method: Literal["exhaustive", "auto"] = "auto",
        budget: int = DEFAULT_BUDGET,
        backend: str | None = None,
    ) -> int:
        """Exact minimum Hamming weight (``n + 1`` for the zero code)."""
        return min_distance(self, method=method, budget=budget, backend=backend)

    def is_mds(self, backend: str | None = None) -> bool:
        return is_mds(self, backend=backend)

    # serialisation ----------------------------------------------------
    def to_json(self) -> dict:
        out = self.generator.to_json()
        out.update({"n": self.n, "k": self.k, "claimed_d": self.claimed_d})
        return out

    @classmethod
    def from_json(cls, obj: dict, ctx: FieldCtx | None = None) -> LinearCode:
        return cls(Matrix.from_json(obj, ctx), obj.get("claimed_d"))


def hermitian_dual(C: LinearCode) -> LinearCode:
    return C.hermitian_dual()


def is_self_orthogonal_h(C: LinearCode) -> bool:
    return C.is_self_orthogonal_h()


def is_self_dual_h(C: LinearCode) -> bool:
    return C.is_self_dual_h()


def min_distance(
    C: LinearCode,
    method: str = "auto",
    budget: int = DEFAULT_BUDGET,
    backend: str | None = None,
) -> int:
    if method not in ("auto", "exhaustive"):
        raise ValueError(f"unknown method {method!r}")
    if C.k == 0:
        return C.n + 1
    if C.enumeration_cost() > budget:
        raise BudgetExceeded(
            f"[{C.n},{C.k}] over GF({C.ctx.order}) needs {C.enumeration_cost()} field ops "
            f"(budget {budget})"
        )
    ctx = C.ctx
    G, _, _ = echelon_form(C.generator)
    return kernels.min_weight(G.a, ctx.zech, ctx.zero_code, ctx.order - 1, backend=backend)


def has_word_below(C: LinearCode, weight: int, backend: str | None = None) -> bool:
    """True iff some nonzero codeword has weight ``< weight`` (early-exit scan)."""
    ctx = C.ctx
    if C.k == 0:
        return False
    G, _, _ = echelon_form(C.generator)
    best = kernels.min_weight(
        G.a, ctx.zech, ctx.zero_code, ctx.order - 1, stop_below=weight, backend=backend
    )
    return best < weight


def distance_above(
    C: LinearCode, floor: int, budget: int = DEFAULT_BUDGET, backend: str | None = None
) -> int | None:
    """Exact minimum distance if it exceeds ``floor``, else None.

    One scan that stops at the first word of weight ``<= floor``.
    """
    if C.k == 0:
        return C.n + 1
    if C.enumeration_cost() > budget:
        raise BudgetExceeded(f"[{C.n},{C.k}] needs {C.enumeration_cost()} field ops (budget {budget})")
    ctx = C.ctx
    G, _, _ = echelon_form(C.generator)
    best = kernels.min_weight(
        G.a, ctx.zech, ctx.zero_code, ctx.order - 1, stop_below=floor + 1, backend=backend
    )
    return best if best > floor else None


def is_mds(C: LinearCode, backend: str | None = None, chunk: int = 20000) -> bool:
    """Every k-subset of generator columns is independent (d = n - k + 1)."""
    n, k = C.n, C.k
    if k == 0 or k == n:
        return True
    total = math.comb(n, k)
    if total > MAX_SUBSETS:
        raise SubsetCountTooLarge(f"C({n},{k}) = {total} subsets")
    ctx = C.ctx
    G = C.generator.a
    half = ctx.neg_shift
    subsets = itertools.combinations(range(n), k)
    while True:
        block = np.array(list(itertools.islice(subsets, chunk)), dtype=np.int64)
        if block.size == 0:
            return True
        stack = np.transpose(G[:, block], (1, 0, 2))
        ranks = kernels.batched_rank(stack, ctx.zech, ctx.zero_code, ctx.order - 1, half, backend)
        if np.any(ranks < k):
            return False


def is_almost_mds(C: LinearCode, d: int | None = None) -> bool:
    d = C.min_distance() if d is None else d
    return d == C.n - C.k


def code_from_rows(ctx: FieldCtx, rows) -> LinearCode:
    return LinearCode(Matrix.parse(ctx, rows))


def load_code(obj: dict) -> LinearCode:
    return LinearCode.from_json(obj, field_from_order(int(obj["q2"])))


def sampled_min_weight(
    C: LinearCode, iterations: int = 200, pairs: bool = True, seed: int = 0
) -> int:
    """Upper bound on the minimum distance from random information sets.

    Each round permutes the coordinates, brings the generator to systematic
    form and scores every row and (if ``pairs``) every scaled pair of rows.
    Never smaller than the true distance; equal to it only by luck.
    """
    ctx = C.ctx
    Z = ctx.zero_code
    if C.k == 0:
        return C.n + 1
    rng = np.random.default_rng(seed)
    best = C.n + 1
    scalars = np.arange(ctx.order - 1, dtype=np.int64)
    for _ in range(iterations):
        perm = rng.permutation(C.n)
        E, r, _ = echelon_form(Matrix(ctx, C.generator.a[:, perm]))
        rows = E.a[:r]
        best = min(best, int((rows != Z).sum(axis=1).min()))
        if not pairs or r < 2:
            continue
        scaled = ctx.mul(scalars[:, None, None], rows[None, :, :])  # (Q-1, r, n)
        for i in range(r - 1):
            combo = ctx.add(rows[i][None, None, :], scaled[:, i + 1 :, :])
            best = min(best, int((combo != Z).sum(axis=2).min()))
    return best
