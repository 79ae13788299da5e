"""Unitary generators, the four-word power family, and group orders.

Matrices follow the row-vector convention of :mod:`hsdcodes.linalg`: the
matrix of a linear map ``f`` has ``f(b_i)`` as its i-th row.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Literal

import numpy as np

from . import kernels
from .errors import CapExceeded, NoSolution, SizeTooSmall, TuUnavailable
from .field import FieldCtx, FieldElement
from .linalg import Matrix, identity, is_unitary, matrix_power, permutation_matrix

WordOrder = Literal["printed", "reversed"]
Action = Literal["row", "column"]


@dataclass(frozen=True, order=True)
class ExponentTuple:
    i: int
    j: int
    k: int
    l: int

    def as_list(self) -> list[int]:
        return [self.i, self.j, self.k, self.l]


def _theta(ctx: FieldCtx) -> FieldElement:
    return ctx.one if ctx.p == 2 else ctx((ctx.p - 1) // 2)


def solve_transvection(
    ctx: FieldCtx, deterministic_pick: bool = True
) -> tuple[FieldElement, ...] | list[tuple[FieldElement, ...]]:
    """Solutions ``(a, b, -b, a)`` of the unit-norm / orthogonality system.

    With ``deterministic_pick`` the first solution in code order other than
    the identity ``(1, 0, 0, 1)`` is returned; otherwise the full list
    (identity included) in code order.
    """
    Z = ctx.zero_code
    b = np.arange(ctx.order, dtype=np.int64)
    nb = ctx.norm(b)
    bq = ctx.conj(b)
    found: list[tuple[FieldElement, ...]] = []
    for a in range(ctx.order):
        na = ctx.norm(a)
        ok = ctx.add(na, nb) == 0
        if not ok.any():
            continue
        # a^q * (-b) + b^q * a == 0
        ortho = ctx.add(ctx.neg(ctx.mul(ctx.conj(a), b)), ctx.mul(bq, a)) == Z
        for bc in np.flatnonzero(ok & ortho):
            A, B = ctx.elem(a), ctx.elem(int(bc))
            sol = (A, B, -B, A)
            if deterministic_pick:
                if A == ctx.one and B.is_zero():
                    continue
                return sol
            found.append(sol)
    if deterministic_pick or not found:
        raise NoSolution("transvection system has no admissible solution")
    return found


def check_transvection(a, b, c, d) -> bool:
    q = a.ctx.q
    one = a.ctx.one
    return (
        a ** (q + 1) + b ** (q + 1) == one
        and c ** (q + 1) + d ** (q + 1) == one
        and (a**q) * c + (b**q) * d == a.ctx.zero
    )


def map_matrix(ctx: FieldCtx, n: int, f: Callable[[np.ndarray], np.ndarray]) -> Matrix:
    """Matrix whose i-th row is ``f(b_i)``."""
    basis = identity(ctx, n).a
    return Matrix(ctx, np.vstack([f(basis[i]) for i in range(n)]))


def _dot(ctx: FieldCtx, x: np.ndarray, y: np.ndarray) -> int:
    acc = ctx.zero_code
    for c in ctx.mul(x, y):
        acc = ctx.add(acc, int(c))
    return acc


def transvection_matrix(ctx: FieldCtx, n: int, a, b, c, d) -> Matrix:
    """``x -> x + (x.v) b_1 + (x.w) b_2`` with v = (a-1)b_1 + b b_2, w = c b_1 + (d-1) b_2."""
    Z = ctx.zero_code
    one = ctx.one
    v = np.full(n, Z, dtype=np.int64)
    w = np.full(n, Z, dtype=np.int64)
    v[0], v[1] = (a - one).code, b.code
    w[0], w[1] = c.code, (d - one).code
    e1 = np.full(n, Z, dtype=np.int64)
    e1[0] = 0
    e2 = np.full(n, Z, dtype=np.int64)
    e2[1] = 0

    def f(x):
        y = ctx.add(x, ctx.mul(_dot(ctx, x, v), e1))
        return ctx.add(y, ctx.mul(_dot(ctx, x, w), e2))

    return map_matrix(ctx, n, f)


def reflection_matrix(ctx: FieldCtx, n: int, theta: FieldElement | None = None) -> Matrix:
    """``x -> x + theta (x.u) u`` with u = b_1 + b_2 + b_3 + b_4."""
    if n < 4:
        raise TuUnavailable("the u-map needs n >= 4")
    theta = theta or _theta(ctx)
    u = np.full(n, ctx.zero_code, dtype=np.int64)
    u[:4] = 0

    def f(x):
        return ctx.add(x, ctx.mul(ctx.mul(theta.code, _dot(ctx, x, u)), u))

    return map_matrix(ctx, n, f)


@dataclass(frozen=True)
class UnitaryGenSet:
    ctx: FieldCtx
    n: int
    T0: Matrix
    T1: Matrix
    Tabcd: Matrix
    abcd: tuple[FieldElement, ...]
    theta: FieldElement
    Tu: Matrix | None = None
    action: Action = "row"

    def group_generators(self) -> list[Matrix]:
        gens = [self.T0, self.T1, self.Tabcd]
        if self.Tu is not None:
            gens.append(self.Tu)
        return gens

    def metadata(self) -> dict:
        return {
            "n": self.n,
            "T0": "transposition (1 2)",
            "T1": "cycle (1 2 ... n), b_i -> b_{i+1}",
            "abcd": [str(x) for x in self.abcd],
            "theta": str(self.theta),
            "action": self.action,
        }


def make_generators(
    ctx: FieldCtx,
    n: int,
    abcd: tuple | None = None,
    action: Action = "row",
) -> UnitaryGenSet:
    """Generator matrices; ``action="column"`` stores their transposes."""
    if n < 2:
        raise SizeTooSmall("need n >= 2")
    if abcd is None:
        abcd = solve_transvection(ctx)
    abcd = tuple(ctx(x) for x in abcd)
    if not check_transvection(*abcd):
        raise NoSolution(f"{[str(x) for x in abcd]} does not solve the transvection system")
    T0 = permutation_matrix(ctx, [1, 0] + list(range(2, n)))
    T1 = permutation_matrix(ctx, [(i + 1) % n for i in range(n)])
    Tabcd = transvection_matrix(ctx, n, *abcd)
    Tu = reflection_matrix(ctx, n) if n >= 4 else None
    if action == "column":
        T0, T1, Tabcd = T0.T, T1.T, Tabcd.T
        Tu = Tu.T if Tu is not None else None
    for g in (T0, T1, Tabcd) + ((Tu,) if Tu is not None else ()):
        assert is_unitary(g)
    return UnitaryGenSet(ctx, n, T0, T1, Tabcd, abcd, _theta(ctx), Tu, action)


def words(gens: UnitaryGenSet, m: int, word_order: WordOrder = "printed") -> tuple[Matrix, ...]:
    """The four m-th powers N, P, Q, R of the generator words."""
    if gens.Tu is None:
        raise SizeTooSmall("the power family needs n >= 4")
    Tu, T0, T1, Ta = gens.Tu, gens.T0, gens.T1, gens.Tabcd
    spelled = [
        (Tu, T1, Ta, T0),
        (Ta, T0, Tu, T1),
        (Tu, T0, Ta, T1),
        (Ta, T1, Tu, T0),
    ]
    out = []
    for w in spelled:
        if word_order == "reversed":
            w = w[::-1]
        prod = w[0] @ w[1] @ w[2] @ w[3]
        out.append(matrix_power(prod, m))
    return tuple(out)


class PowerFamily:
    """``L = N^i P^j Q^k R^l`` with cached powers."""

    def __init__(self, gens: UnitaryGenSet, m: int, word_order: WordOrder = "printed"):
        if m < 1:
            raise ValueError("m must be positive")
        self.gens = gens
        self.m = m
        self.word_order = word_order
        self.bases = words(gens, m, word_order)
        self._powers: list[list[Matrix]] = [[identity(gens.ctx, gens.n)] for _ in range(4)]

    def power(self, which: int, e: int) -> Matrix:
        cache = self._powers[which]
        while len(cache) <= e:
            cache.append(cache[-1] @ self.bases[which])
        return cache[e]

    def matrix(self, t: ExponentTuple | tuple[int, int, int, int]) -> Matrix:
        i, j, k, l = t.as_list() if isinstance(t, ExponentTuple) else t
        return self.power(0, i) @ self.power(1, j) @ self.power(2, k) @ self.power(3, l)


def algorithm1(
    gens: UnitaryGenSet, m: int, s: int, word_order: WordOrder = "printed"
) -> Iterator[tuple[ExponentTuple, Matrix]]:
    """Stream ``(i,j,k,l), N^i P^j Q^k R^l`` for all exponents in ``[0, s]``."""
    if s < 0:
        raise ValueError("s must be non-negative")
    fam = PowerFamily(gens, m, word_order)
    for i, j, k, l in itertools.product(range(s + 1), repeat=4):
        yield ExponentTuple(i, j, k, l), fam.matrix((i, j, k, l))


def group_order(n: int, q: int) -> int:
    """Order of the full unitary group U_n(q^2)."""
    if n < 1:
        raise ValueError("n must be positive")
    out = q ** ((n * n - n) // 2)
    for i in range(1, n + 1):
        out *= q**i - (-1) ** i
    return out


def closure_layers(
    gens: list[Matrix], cap: int = 10**8, backend: str | None = None
) -> Iterator[np.ndarray]:
    """Breadth-first layers (stacks of code arrays) of the generated group.

    The first layer is the identity. Raises :class:`CapExceeded` once more
    than ``cap`` elements have been produced.
    """
    ctx = gens[0].ctx
    n = gens[0].rows
    Z, M = ctx.zero_code, ctx.order - 1
    frontier = identity(ctx, n).a[None, :, :]
    keys = kernels.encode_keys(frontier, ctx.order)
    use_set = keys.dtype.kind == "V"
    if use_set:
        seen = {k.tobytes() for k in keys}
    else:
        seen_arr = np.sort(keys)
    count = 1
    yield frontier
    while frontier.shape[0]:
        prods = np.concatenate(
            [kernels.right_multiply(frontier, g.a, ctx.zech, Z, M, backend) for g in gens]
        )
        pkeys = kernels.encode_keys(prods, ctx.order)
        if use_set:
            fresh_idx = []
            for idx, k in enumerate(pkeys):
                b = k.tobytes()
                if b not in seen:
                    seen.add(b)
                    fresh_idx.append(idx)
            frontier = prods[fresh_idx]
        else:
            uniq, first = np.unique(pkeys, return_index=True)
            fresh = ~np.isin(uniq, seen_arr, assume_unique=True)
            # keep discovery order so layers do not depend on key encoding
            idx = np.sort(first[fresh])
            frontier = prods[idx]
            seen_arr = np.union1d(seen_arr, uniq[fresh])
        count += frontier.shape[0]
        if count > cap:
            raise CapExceeded(count, cap)
        if frontier.shape[0]:
            yield frontier


def group_closure_order(
    gens: list[Matrix], cap: int = 10**8, backend: str | None = None
) -> int:
    """Order of the group generated by ``gens``, by breadth-first closure."""
    return sum(layer.shape[0] for layer in closure_layers(gens, cap, backend))


def group_elements(
    gens: list[Matrix], cap: int = 10**8, backend: str | None = None
) -> Iterator[Matrix]:
    """Every element of the generated group, in breadth-first order."""
    ctx = gens[0].ctx
    for layer in closure_layers(gens, cap, backend):
        for a in layer:
            yield Matrix(ctx, a)


def generating_transvection(
    ctx: FieldCtx, n: int, cap: int | None = None, backend: str | None = None
) -> tuple[FieldElement, ...] | None:
    """First transvection solution (code order) whose group with the permutations is all of U_n.

    Returns None when no solution reaches the full order.
    """
    target = group_order(n, ctx.q)
    cap = target if cap is None else cap
    for sol in solve_transvection(ctx, deterministic_pick=False):
        if sol[0] == ctx.one and sol[1].is_zero():
            continue
        gens = make_generators(ctx, n, abcd=sol)
        try:
            if group_closure_order(gens.group_generators(), cap, backend) == target:
                return sol
        except CapExceeded:
            continue
    return None


def transvection_solutions(ctx: FieldCtx) -> list[tuple[FieldElement, ...]]:
    """Every non-identity ``(a, b, c, d)`` solving the system, in code order.

    Unlike :func:`solve_transvection` this does not tie ``c, d`` to ``a, b``.
    Used as the last convention retry when reproducing tabulated tuples.
    """
    codes = np.arange(ctx.order, dtype=np.int64)
    norms = ctx.norm(codes)
    A, B = np.meshgrid(codes, codes, indexing="ij")
    on_sphere = ctx.add(norms[A], norms[B]) == ctx.one.code
    pairs = np.stack([A[on_sphere], B[on_sphere]], axis=1)  # code order of (a, b)
    out = []
    for a, b in pairs:
        # conj(a) c + conj(b) d = 0
        ortho = ctx.add(ctx.mul(ctx.conj(int(a)), pairs[:, 0]), ctx.mul(ctx.conj(int(b)), pairs[:, 1]))
        for c, d in pairs[ortho == ctx.zero_code]:
            sol = tuple(ctx.elem(int(v)) for v in (a, b, c, d))
            if a == ctx.one.code and b == ctx.zero_code and c == ctx.zero_code and d == ctx.one.code:
                continue
            out.append(sol)
    return out
