"""Generator-matrix constructions of Hermitian self-dual codes.

All builders validate their inputs, assemble the generator and certify the
result by rank and Gram-matrix checks instead of trusting the hypotheses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, fields
from typing import Iterator, Literal, Sequence

import numpy as np

from .code import LinearCode
from .errors import (
    BadAlpha,
    CongruenceViolated,
    DegenerateExtension,
    GuardViolated,
    NoIsotropicVector,
    NotUnitary,
    PreconditionFailed,
    RankDeficient,
    SpecViolated,
    SystemViolated,
)
from .field import FieldCtx, FieldElement, alpha_for_minus_one, norm_root
from .linalg import (
    Matrix,
    all_ones,
    echelon_form,
    hermitian_gram,
    hermitian_inner,
    hstack,
    identity,
    in_row_space,
    is_unitary,
    right_kernel_hermitian,
    vstack,
)

Family = Literal["minus", "plus"]


# ---------------------------------------------------------------- helpers
def _require_unitary(L: Matrix) -> None:
    if L.rows != L.cols or not is_unitary(L):
        raise NotUnitary(f"{L.rows}x{L.cols} matrix is not unitary")


def _require_alpha(alpha: FieldElement, what: str = "alpha") -> None:
    if alpha.norm() != -alpha.ctx.one:
        raise BadAlpha(f"{what}^(q+1) = {alpha.norm()} but must equal -1")


def _elem(ctx: FieldCtx, x) -> FieldElement:
    if isinstance(x, FieldElement):
        return x
    if isinstance(x, str):
        return ctx.elem(ctx.parse(x))
    return ctx(x)


def _vec(ctx: FieldCtx, xs) -> np.ndarray:
    return np.array([_elem(ctx, x).code for x in xs], dtype=np.int64)


def _row(ctx: FieldCtx, codes: np.ndarray) -> Matrix:
    return Matrix(ctx, np.asarray(codes, dtype=np.int64)[None, :])


def _certify(G: Matrix, self_dual: bool = True) -> LinearCode:
    if not hermitian_gram(G).is_zero():
        raise AssertionError("construction produced a non-self-orthogonal generator")
    C = LinearCode(G)
    if self_dual and not C.is_self_dual_h():
        raise RankDeficient(f"generator has rank {C.k}, need {G.cols // 2}")
    return C


def row_sum(L: Matrix) -> np.ndarray:
    ctx = L.ctx
    acc = np.full(L.cols, ctx.zero_code, dtype=np.int64)
    for i in range(L.rows):
        acc = ctx.add(acc, L.a[i])
    return acc


# ------------------------------------------------------------- building-up
def build_up(C0: LinearCode, x, a: FieldElement) -> LinearCode:
    """Extend a self-dual code of length 2n to length 2n + 2.

    ``x`` must satisfy ``x * x = -1`` and ``a^(q+1) = -1``. The border
    entries are ``y_i = g_i * x``; the other order, ``x * g_i``, only works
    when every ``y_i`` lies in GF(q).
    """
    ctx = C0.ctx
    _require_alpha(a, "a")
    if not C0.is_self_dual_h():
        raise PreconditionFailed("seed code is not Hermitian self-dual")
    xv = _vec(ctx, x) if not isinstance(x, np.ndarray) else x.astype(np.int64)
    if xv.shape != (C0.n,):
        raise PreconditionFailed(f"x must have length {C0.n}")
    if hermitian_inner(ctx, xv, xv) != (-ctx.one).code:
        raise PreconditionFailed("x * x must equal -1")
    G0 = C0.generator
    y = np.array([hermitian_inner(ctx, G0.a[i], xv) for i in range(G0.rows)], dtype=np.int64)
    top = np.concatenate([[0, ctx.zero_code], xv])
    left = np.stack([ctx.neg(y), ctx.mul(a.code, y)], axis=1)
    G = vstack(_row(ctx, top), hstack(Matrix(ctx, left), G0))
    return _certify(G)


# ------------------------------------------------- direct unitary builders
def construct_eq5(L: Matrix, alpha: FieldElement) -> LinearCode:
    """``(L^T | alpha L)``."""
    _require_unitary(L)
    _require_alpha(alpha)
    return _certify(hstack(L.T, L * alpha))


def construct_eq6(L: Matrix, alpha: FieldElement) -> LinearCode:
    """``(I | alpha L)``; any alpha of norm -1 works, not only those in GF(q)."""
    _require_unitary(L)
    _require_alpha(alpha)
    return _certify(hstack(identity(L.ctx, L.rows), L * alpha))


def _j_pm_i(ctx: FieldCtx, n: int, sign: int) -> Matrix:
    J, I = all_ones(ctx, n), identity(ctx, n)
    return J + I if sign > 0 else J - I


def construct_eq7(L: Matrix, a: FieldElement) -> LinearCode:
    """``(J - I | a L)`` for n = 2 mod p."""
    ctx = L.ctx
    n = L.rows
    if (n - 2) % ctx.p:
        raise CongruenceViolated(f"n = {n} is not 2 mod {ctx.p}")
    _require_unitary(L)
    _require_alpha(a, "a")
    return _certify(hstack(_j_pm_i(ctx, n, -1), L * a))


def construct_eq8(L: Matrix, a: FieldElement) -> LinearCode:
    """``(J + I | a L)`` for n = -2 mod p."""
    ctx = L.ctx
    n = L.rows
    if (n + 2) % ctx.p:
        raise CongruenceViolated(f"n = {n} is not -2 mod {ctx.p}")
    _require_unitary(L)
    _require_alpha(a, "a")
    return _certify(hstack(_j_pm_i(ctx, n, +1), L * a))


# ---------------------------------------------------------------- bordered
@dataclass(frozen=True)
class BorderedParams:
    delta: FieldElement
    theta: FieldElement
    beta: FieldElement
    alpha: FieldElement
    gamma: FieldElement
    a: FieldElement
    lam: FieldElement

    @property
    def ctx(self) -> FieldCtx:
        return self.a.ctx

    def as_tuple(self) -> tuple[FieldElement, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    def to_strings(self) -> list[str]:
        return [str(x) for x in self.as_tuple()]

    @classmethod
    def parse(cls, ctx: FieldCtx, values: Sequence) -> BorderedParams:
        vals = [_elem(ctx, v) for v in values]
        if len(vals) != 7:
            raise ValueError("need seven values (delta, theta, beta, alpha, gamma, a, lambda)")
        return cls(*vals)


def _sign(family: Family) -> int:
    if family not in ("minus", "plus"):
        raise ValueError(f"unknown family {family!r}")
    return -1 if family == "minus" else 1


def bordered_residuals(params: BorderedParams, n: int, family: Family) -> tuple[FieldElement, ...]:
    """Left-hand sides of the three orthogonality equations (all zero when valid)."""
    s = _sign(family)
    ctx = params.ctx
    q = ctx.q
    d, t, b, al, g, a, lam = params.as_tuple()
    e1 = d.norm() + ctx(n + 2 * s) + g.norm()
    e2 = t.norm() + ctx(n) * b.norm() + al.norm() + ctx(n) * lam.norm()
    e3 = t * d**q + ctx(n + s) * b + al * g**q + lam * a**q
    return e1, e2, e3


def check_bordered(params: BorderedParams, n: int, family: Family) -> None:
    _require_alpha(params.a, "a")
    for idx, r in enumerate(bordered_residuals(params, n, family), start=1):
        if not r.is_zero():
            raise SystemViolated(f"equation {idx} of the {family} system is {r}, not 0")


def bordered_matrix(L: Matrix, params: BorderedParams, family: Family) -> Matrix:
    ctx = L.ctx
    n = L.rows
    d, t, b, al, g, a, lam = params.as_tuple()
    top = np.concatenate(
        [[t.code], np.full(n, b.code), [al.code], ctx.mul(lam.code, row_sum(L))]
    )
    body = hstack(
        Matrix(ctx, np.full((n, 1), d.code)),
        _j_pm_i(ctx, n, _sign(family)),
        Matrix(ctx, np.full((n, 1), g.code)),
        L * a,
    )
    return vstack(_row(ctx, top), body)


def construct_bordered(
    L: Matrix, params: BorderedParams, family: Family, require_self_dual: bool = True
) -> LinearCode:
    """Bordered ``(n+1) x (2n+2)`` construction around ``J -/+ I`` and ``aL``."""
    _require_unitary(L)
    check_bordered(params, L.rows, family)
    return _certify(bordered_matrix(L, params, family), self_dual=require_self_dual)


def _gamma_target(ctx: FieldCtx, n: int, family: Family, delta_case: int) -> FieldElement:
    base = {("minus", 0): 2 - n, ("minus", 1): 1 - n, ("plus", 0): -2 - n, ("plus", 1): -3 - n}
    return ctx(base[(family, delta_case)])


def _prime_roots(ctx: FieldCtx, poly) -> list[FieldElement]:
    return [ctx(t) for t in range(ctx.p) if poly(t) % ctx.p == 0]


# (family, delta, case) -> needs gamma invertible
_NEEDS_GAMMA_INV = {("minus", 0, 1), ("minus", 1, 1), ("minus", 1, 2),
                    ("plus", 0, 1), ("plus", 1, 1), ("plus", 1, 2)}

CASES = {("minus", 0): (1, 2, 3), ("minus", 1): (1, 2, 3, 4),
         ("plus", 0): (1, 2, 3), ("plus", 1): (1, 2, 3, 4)}


def solve_bordered_params(
    family: Family,
    delta_case: int,
    case_id: int,
    n: int,
    ctx: FieldCtx,
    theta_choice: FieldElement | None = None,
    gamma: FieldElement | None = None,
    a: FieldElement | None = None,
) -> BorderedParams:
    """Closed-form bordered parameters for one solution case.

    ``gamma`` defaults to the smallest-exponent root of its norm equation;
    ``theta_choice`` is used where the case leaves theta free (default 1)
    or, for the prime-field quadratic cases, must be one of its roots.
    """
    _sign(family)
    if case_id not in CASES.get((family, delta_case), ()):
        raise ValueError(f"no case {case_id} for {family} family with delta = {delta_case}")
    p = ctx.p
    one, zero = ctx.one, ctx.zero
    N = ctx(n)
    a = alpha_for_minus_one(ctx) if a is None else _elem(ctx, a)
    _require_alpha(a, "a")

    target = _gamma_target(ctx, n, family, delta_case)
    if gamma is None:
        gamma = zero if target.is_zero() else norm_root(target)
    else:
        gamma = _elem(ctx, gamma)
        if gamma.norm() != target:
            raise GuardViolated(f"gamma^(q+1) must equal {target}")
    if (family, delta_case, case_id) in _NEEDS_GAMMA_INV and gamma.is_zero():
        raise GuardViolated(f"gamma^(q+1) = {target} vanishes (n = {n} mod {p})")
    gq = gamma ** ctx.q

    def free_theta() -> FieldElement:
        t = one if theta_choice is None else _elem(ctx, theta_choice)
        if t.is_zero():
            raise GuardViolated("theta must be nonzero")
        return t

    def root_theta() -> FieldElement:
        if N.is_zero():
            raise GuardViolated(f"n = {n} is 0 mod {p}, no (q+1)-th root")
        return norm_root(N)

    def quad_theta(poly) -> FieldElement:
        roots = _prime_roots(ctx, poly)
        if theta_choice is not None:
            t = _elem(ctx, theta_choice)
            if t not in roots:
                raise GuardViolated(f"theta = {t} does not solve the prime-field congruence")
            return t
        if not roots:
            raise GuardViolated(f"the prime-field congruence has no root for n = {n}")
        return roots[0]

    def nonzero(x: FieldElement, why: str) -> FieldElement:
        if x.is_zero():
            raise GuardViolated(why)
        return x

    delta = zero if delta_case == 0 else one

    if family == "minus" and delta_case == 0:
        nonzero(ctx(2 - n), f"n = {n} is 2 mod {p}")
        if case_id == 1:
            theta = free_theta()
            beta = a * theta * gamma
            alpha = ctx(1 - n) * beta / gq
            lam = zero
        elif case_id == 2:
            theta = root_theta()
            beta = one / nonzero(ctx(n - 1) + a * theta * gq, "n - 1 + a theta gamma^q vanishes")
            alpha = a * theta * beta
            lam = a
        else:
            theta = free_theta()
            beta = a * theta * gq / ctx(2 - n)
            alpha = a * theta
            lam = beta * a
    elif family == "minus":
        if case_id == 1:
            if p == 2:
                raise GuardViolated("case needs odd characteristic")
            nonzero(ctx(n - 3), f"n = {n} is 3 mod {p}")
            theta = quad_theta(lambda t: (t - 2) ** 2 * n - (2 * t * t - 4 * t + 4))
            beta = ctx(2)
            alpha = (ctx(2 * (1 - n)) - theta) / gq
            lam = zero
        elif case_id == 2:
            nonzero(ctx(n - 2), f"n = {n} is 2 mod {p}")
            nonzero(N, f"n = {n} is 0 mod {p}")
            theta = quad_theta(lambda t: (t - 1) ** 2 * n - (2 * t * t - 2 * t + 1))
            beta = one
            alpha = (ctx(1 - n) - theta) / gq
            lam = zero
        elif case_id == 3:
            theta = root_theta()
            beta = (one - theta) / nonzero(
                ctx(n - 1) + a * theta * gq, "n - 1 + a theta gamma^q vanishes"
            )
            alpha = a * theta * beta
            lam = a
        else:
            nonzero(ctx(n - 2), f"n = {n} is 2 mod {p}")
            theta = free_theta()
            beta = theta * (one + a * gq) / ctx(2 - n)
            alpha = a * theta
            lam = beta * a
    elif delta_case == 0:
        nonzero(ctx(n + 2), f"n = {n} is -2 mod {p}")
        if case_id == 1:
            theta = free_theta()
            beta = a * theta * gamma
            alpha = -ctx(n + 1) * beta / gq
            lam = zero
        elif case_id == 2:
            theta = root_theta()
            beta = one / nonzero(ctx(n + 1) + a * theta * gq, "n + 1 + a theta gamma^q vanishes")
            alpha = a * theta * beta
            lam = a
        else:
            nonzero(N, f"n = {n} is 0 mod {p}")
            theta = free_theta()
            beta = -(a * theta * gq) / N
            alpha = a * theta
            lam = beta * a
    else:
        if case_id == 1:
            if p == 2:
                raise GuardViolated("case needs odd characteristic")
            nonzero(ctx(n - 1), f"n = {n} is 1 mod {p}")
            theta = quad_theta(lambda t: (t - 2) ** 2 * n + 2 * t * t - 4 * t - 4)
            beta = ctx(2)
            alpha = (ctx(-2 * (1 + n)) - theta) / gq
            lam = zero
        elif case_id == 2:
            nonzero(N, f"n = {n} is 0 mod {p}")
            theta = quad_theta(lambda t: (t - 1) ** 2 * n + 2 * t * t - 2 * t - 1)
            beta = one
            alpha = (ctx(-(1 + n)) - theta) / gq
            lam = zero
        elif case_id == 3:
            nonzero(ctx(n - 1), f"n = {n} is 1 mod {p}")
            theta = root_theta()
            beta = (one - theta) / nonzero(
                ctx(n + 1) + a * theta * gq, "n + 1 + a theta gamma^q vanishes"
            )
            alpha = a * theta * beta
            lam = a
        else:
            nonzero(N, f"n = {n} is 0 mod {p}")
            nonzero(ctx(n + 2), f"n = {n} is -2 mod {p}")
            theta = free_theta()
            beta = -(theta * (one + a * gq)) / N
            alpha = a * theta
            lam = beta * a

    params = BorderedParams(delta, theta, beta, alpha, gamma, a, lam)
    check_bordered(params, n, family)  # closed forms must satisfy the system
    return params


# ---------------------------------------------------------- coordinate extension
@dataclass(frozen=True)
class ExtensionSpec:
    lambdas: tuple[FieldElement, ...]
    x: tuple[FieldElement, ...]
    a: FieldElement

    @classmethod
    def parse(cls, ctx: FieldCtx, lambdas, x, a) -> ExtensionSpec:
        return cls(
            tuple(_elem(ctx, v) for v in lambdas), tuple(_elem(ctx, v) for v in x), _elem(ctx, a)
        )


def extended_rows(L: Matrix, lambdas, a: FieldElement) -> Matrix:
    """Rows ``(a L_i | a lambda_i, lambda_i)``."""
    ctx = L.ctx
    lam = _vec(ctx, lambdas)
    if lam.shape != (L.rows,):
        raise SpecViolated(f"need {L.rows} lambdas")
    tail = np.stack([ctx.mul(a.code, lam), lam], axis=1)
    return hstack(L * a, Matrix(ctx, tail))


def check_extension(L: Matrix, spec: ExtensionSpec) -> None:
    ctx = L.ctx
    _require_alpha(spec.a, "a")
    x = _vec(ctx, spec.x)
    if x.shape != (L.rows + 2,):
        raise SpecViolated(f"x must have length {L.rows + 2}")
    if hermitian_inner(ctx, x, x) != ctx.zero_code:
        raise SpecViolated("x * x != 0")
    Lp = extended_rows(L, spec.lambdas, spec.a)
    if not hermitian_gram(Lp, _row(ctx, x)).is_zero():
        raise SpecViolated("some extended row is not orthogonal to x")


def construct_extended(L: Matrix, spec: ExtensionSpec) -> LinearCode:
    """``(I | aL | a lambda_i, lambda_i)`` over ``(0 | x)``: a self-dual [2n+2, n+1] code."""
    ctx = L.ctx
    _require_unitary(L)
    check_extension(L, spec)
    n = L.rows
    top = hstack(identity(ctx, n), extended_rows(L, spec.lambdas, spec.a))
    bottom = np.concatenate([np.full(n, ctx.zero_code), _vec(ctx, spec.x)])
    return _certify(vstack(top, _row(ctx, bottom)))


def extension_direction(L: Matrix, lambdas, a: FieldElement) -> np.ndarray:
    """The vector ``y`` read off the echelon form of the extended rows."""
    ctx = L.ctx
    n = L.rows
    M, r, pivots = echelon_form(extended_rows(L, lambdas, a))
    if r != n or pivots != list(range(n)):
        raise DegenerateExtension("extended rows do not reduce to (I | *)")
    m1 = int(M.a[0, n + 1])
    if m1 == ctx.zero_code:
        raise DegenerateExtension("m_{1,n+2} = 0")
    y = np.full(n + 2, ctx.zero_code, dtype=np.int64)
    y[0] = 0
    y[n + 1] = ctx.neg(ctx.inv(ctx.conj(m1)))
    for i in range(1, n):
        y[i] = ctx.neg(ctx.mul(int(y[n + 1]), ctx.conj(int(M.a[i, n + 1]))))
    return y


def find_extension_vectors(
    L: Matrix, lambdas, a: FieldElement, coeffs: Literal["full", "subfield"] = "full"
) -> list[np.ndarray]:
    """All nonzero isotropic ``x = s x0 + t y`` with x0 = (0,...,0,a,1).

    ``coeffs="subfield"`` restricts s and t to GF(q).
    """
    ctx = L.ctx
    n = L.rows
    _require_unitary(L)
    _require_alpha(a, "a")
    y = extension_direction(L, lambdas, a)
    x0 = np.full(n + 2, ctx.zero_code, dtype=np.int64)
    x0[n], x0[n + 1] = a.code, 0
    return _isotropic_combinations(ctx, x0, y, coeffs, L, lambdas, a)


def _isotropic_combinations(ctx, x0, y, coeffs, L, lambdas, a) -> list[np.ndarray]:
    scal = np.arange(ctx.order, dtype=np.int64)
    if coeffs == "subfield":
        scal = scal[np.asarray(ctx.in_subfield(scal), dtype=bool)]
    Lp = extended_rows(L, lambdas, a)
    out = []
    for s, t in itertools.product(scal, scal):
        x = ctx.add(ctx.mul(int(s), x0), ctx.mul(int(t), y))
        if np.all(x == ctx.zero_code):
            continue
        if hermitian_inner(ctx, x, x) != ctx.zero_code:
            continue
        assert hermitian_gram(Lp, _row(ctx, x)).is_zero()
        out.append(x)
    return out


def construct_eq17_18(
    L: Matrix, a: FieldElement, variant: Literal["explicit", "search"] = "explicit"
) -> LinearCode | list[LinearCode]:
    """All-ones lambdas for n = 1 mod p.

    ``explicit`` uses ``x = (a(L_1 + ... + L_n), 0, 1)``; ``search`` returns a
    code for every isotropic member of the two-parameter family over GF(q).
    """
    ctx = L.ctx
    n = L.rows
    if (n - 1) % ctx.p:
        raise CongruenceViolated(f"n = {n} is not 1 mod {ctx.p}")
    _require_unitary(L)
    _require_alpha(a, "a")
    ones = [ctx.one] * n
    x1 = np.concatenate([ctx.mul(a.code, row_sum(L)), [ctx.zero_code, 0]])
    if variant == "explicit":
        spec = ExtensionSpec(tuple(ones), tuple(ctx.elem(int(c)) for c in x1), a)
        return construct_extended(L, spec)
    if variant != "search":
        raise ValueError(f"unknown variant {variant!r}")
    x0 = np.full(n + 2, ctx.zero_code, dtype=np.int64)
    x0[n], x0[n + 1] = a.code, 0
    codes = []
    for x in _isotropic_combinations(ctx, x1, x0, "subfield", L, ones, a):
        spec = ExtensionSpec(tuple(ones), tuple(ctx.elem(int(c)) for c in x), a)
        codes.append(construct_extended(L, spec))
    return codes


# ---------------------------------------------------------------- embedding
def _coset_vectors(ctx: FieldCtx, basis: np.ndarray) -> Iterator[np.ndarray]:
    """Nonzero combinations of ``basis`` rows in lexicographic coefficient order."""
    k = basis.shape[0]
    for coeffs in itertools.product(range(ctx.order), repeat=k):
        c = np.asarray(coeffs, dtype=np.int64)
        if np.all(c == ctx.zero_code):
            continue
        acc = ctx.mul(c[:, None], basis)
        v = acc[0]
        for r in acc[1:]:
            v = ctx.add(v, r)
        yield v


def embed_lengthen(C: LinearCode) -> LinearCode:
    """Grow a self-orthogonal code one dimension short of self-dual into a self-dual one.

    Odd lengths get a zero coordinate first. The added row is the first
    isotropic vector of the Hermitian dual outside the code, in the
    lexicographic order of its echelon-basis coefficients.
    """
    ctx = C.ctx
    if not C.is_self_orthogonal_h():
        raise PreconditionFailed("code is not Hermitian self-orthogonal")
    G = C.generator
    if G.cols % 2:
        G = hstack(G, Matrix.zeros(ctx, G.rows, 1))
    length = G.cols
    if G.rows != length // 2 - 1:
        raise PreconditionFailed(f"need dimension {length // 2 - 1}, got {G.rows}")
    dual = LinearCode(right_kernel_hermitian(G)).generator
    E, _, _ = echelon_form(dual)
    for v in _coset_vectors(ctx, E.a):
        if hermitian_inner(ctx, v, v) != ctx.zero_code:
            continue
        if in_row_space(G, _row(ctx, v)):
            continue
        return _certify(vstack(G, _row(ctx, v)))
    raise NoIsotropicVector("no isotropic vector outside the code in its Hermitian dual")


# ------------------------------------------------------------ replayable specs
CONSTRUCTIONS = (
    "eq5", "eq6", "eq7", "eq8", "bordered_minus", "bordered_plus",
    "extended", "eq17", "buildup", "embed",
)
PARAM_NAMES = ("delta", "theta", "beta", "alpha", "gamma", "a", "lambda")


@dataclass
class ConstructionSpec:
    """Everything needed to rebuild one code.

    ``L`` may be given explicitly; otherwise it is ``N^i P^j Q^k R^l`` from
    the power family with the recorded conventions.
    """

    construction: str
    q2: int
    n: int
    ijkl: tuple[int, int, int, int] | None = None
    m: int | None = None
    params: dict | None = None
    lambdas: list | None = None
    x: list | None = None
    a: str | None = None
    word_order: str = "printed"
    action: str = "row"
    abcd: list | None = None
    L: dict | None = None
    seed: dict | None = None

    def __post_init__(self):
        if self.construction not in CONSTRUCTIONS:
            raise ValueError(f"unknown construction {self.construction!r}")
        if self.ijkl is not None:
            self.ijkl = tuple(int(v) for v in self.ijkl)

    def to_json(self) -> dict:
        out = {"construction": self.construction, "q2": self.q2, "n": self.n}
        for key in ("ijkl", "m", "params", "lambdas", "x", "a", "abcd", "L", "seed"):
            val = getattr(self, key)
            if val is not None:
                out[key] = list(val) if key == "ijkl" else val
        if self.ijkl is not None:
            out["word_order"] = self.word_order
            out["action"] = self.action
        return out

    @classmethod
    def from_json(cls, obj: dict) -> ConstructionSpec:
        keys = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in obj.items() if k in keys and v is not None})

    def ctx(self) -> FieldCtx:
        from .field import field_from_order

        return field_from_order(int(self.q2))

    def unitary(self) -> Matrix:
        from .unitary import PowerFamily, make_generators

        ctx = self.ctx()
        if self.L is not None:
            return Matrix.from_json(self.L, ctx)
        if self.ijkl is None:
            return identity(ctx, self.n)
        abcd = None if self.abcd is None else tuple(_elem(ctx, v) for v in self.abcd)
        gens = make_generators(ctx, self.n, abcd=abcd, action=self.action)
        return PowerFamily(gens, self.m or self.n, self.word_order).matrix(self.ijkl)


def build_code(spec: ConstructionSpec, L: Matrix | None = None) -> LinearCode:
    """Rebuild the code described by ``spec`` (``L`` overrides the stored unitary)."""
    ctx = spec.ctx()
    L = spec.unitary() if L is None else L
    params = dict(spec.params or {})
    default_a = alpha_for_minus_one(ctx)
    a = _elem(ctx, spec.a or params.get("a") or params.get("alpha") or default_a)
    c = spec.construction
    if c == "eq5":
        return construct_eq5(L, a)
    if c == "eq6":
        return construct_eq6(L, a)
    if c == "eq7":
        return construct_eq7(L, a)
    if c == "eq8":
        return construct_eq8(L, a)
    if c in ("bordered_minus", "bordered_plus"):
        family = "minus" if c == "bordered_minus" else "plus"
        if all(k in params for k in PARAM_NAMES):
            bp = BorderedParams.parse(ctx, [params[k] for k in PARAM_NAMES])
        else:
            bp = solve_bordered_params(
                family,
                int(params["delta_case"]),
                int(params["case"]),
                spec.n,
                ctx,
                theta_choice=params.get("theta"),
                gamma=params.get("gamma"),
                a=params.get("a"),
            )
        return construct_bordered(L, bp, family)
    if c == "extended":
        return construct_extended(L, ExtensionSpec.parse(ctx, spec.lambdas, spec.x, a))
    if c == "eq17":
        return construct_eq17_18(L, a, "explicit")
    if c == "buildup":
        seed = LinearCode.from_json(spec.seed, ctx)
        return build_up(seed, spec.x, a)
    if c == "embed":
        return embed_lengthen(LinearCode.from_json(spec.seed, ctx))
    raise ValueError(c)
