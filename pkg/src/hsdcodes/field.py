"""Exact arithmetic in GF(q^2), q = p^m, on discrete-log codes.

Every element is stored as an integer *code*: ``k`` in ``[0, Q-2]`` stands
for ``w^k`` where ``w`` is the root of the Conway polynomial defining the
field and ``Q = q^2``, and the single code ``Q - 1`` stands for zero.  So
integer order on codes is the (log-exponent, zero-last) order.

Addition goes through a Zech-logarithm table, which keeps all four
operations (and Frobenius conjugation ``x -> x^q``) as O(1) table lookups
that vectorise over numpy arrays of codes.
"""

from __future__ import annotations

import functools
import json
import os
import re
from importlib import resources
from typing import Union

import numpy as np

from . import kernels
from .errors import (
    ContextMismatch,
    FieldDivisionByZero,
    FieldTooLarge,
    NoConwayPolynomialShipped,
    NoRoot,
    NotPrime,
    ZeroInput,
)

MAX_ORDER = 2**26

CodeLike = Union[int, np.ndarray]


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@functools.lru_cache(maxsize=None)
def _conway_table(path: str | None) -> dict:
    if path:
        with open(path) as fh:
            return json.load(fh)["polynomials"]
    text = resources.files("hsdcodes").joinpath("data/conway.json").read_text()
    return json.loads(text)["polynomials"]


def conway_polynomial(p: int, degree: int) -> tuple[int, ...]:
    """Coefficients (constant term first) of the shipped Conway polynomial."""
    table = _conway_table(os.environ.get("HSD_CONWAY_TABLE"))
    try:
        return tuple(table[str(p)][str(degree)])
    except KeyError:
        raise NoConwayPolynomialShipped(
            f"no Conway polynomial of degree {degree} over GF({p}) in the table"
        ) from None


class FieldCtx:
    """The tower GF(p) < GF(q) < GF(q^2) with its log/exp/Zech tables.

    Immutable after construction; share freely.
    """

    def __init__(self, p: int, m: int, modulus: tuple[int, ...] | None = None):
        if not _is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if m < 1:
            raise ValueError("m must be positive")
        order = p ** (2 * m)
        if order > MAX_ORDER:
            raise FieldTooLarge(f"GF({p}^{2 * m}) exceeds 2^26 elements")
        if modulus is None:
            modulus = conway_polynomial(p, 2 * m)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != 2 * m + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree 2m")
        self.p = p
        self.m = m
        self.q = p**m
        self.order = order
        self.degree = 2 * m
        self.modulus = modulus
        self.zero_code = order - 1
        # log-shift that negates: w^((Q-1)/2) = -1 for odd p
        self.neg_shift = 0 if p == 2 else (order - 1) // 2

        exp = kernels.build_exp_table(p, 2 * m, np.array(modulus[:-1], dtype=np.int64))
        log = np.full(order, -1, dtype=np.int64)
        log[exp] = np.arange(order - 1, dtype=np.int64)
        self.omega_is_primitive = bool(np.all(log[1:] >= 0))
        if not self.omega_is_primitive:
            raise ValueError("modulus does not define a primitive element")
        log[0] = self.zero_code
        self.exp_table = exp
        self.log_table = log
        # vector form of 1 + w^d: only the constant digit moves
        low = exp % p
        self.zech = log[exp - low + (low + 1) % p]
        for arr in (self.exp_table, self.log_table, self.zech):
            arr.setflags(write=False)

    # ------------------------------------------------------------------
    # identity
    def __repr__(self) -> str:
        return f"FieldCtx(GF({self.p}^{self.degree}), q={self.q})"

    def __reduce__(self):
        return (field_new, (self.p, self.m))

    @property
    def key(self) -> tuple[int, int, tuple[int, ...]]:
        return (self.p, self.m, self.modulus)

    # ------------------------------------------------------------------
    # code-level arithmetic; every method accepts ints or int arrays
    def add(self, a: CodeLike, b: CodeLike) -> CodeLike:
        Z, M = self.zero_code, self.order - 1
        if np.isscalar(a) and np.isscalar(b):
            a, b = int(a), int(b)
            if a == Z:
                return b
            if b == Z:
                return a
            z = int(self.zech[(b - a) % M])
            return Z if z == Z else (a + z) % M
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        z = self.zech[(b - a) % M]
        out = np.where(z == Z, Z, (a + z) % M)
        out = np.where(a == Z, b, out)
        return np.where(b == Z, a, out)

    def neg(self, a: CodeLike) -> CodeLike:
        Z, M = self.zero_code, self.order - 1
        if np.isscalar(a):
            a = int(a)
            return Z if a == Z else (a + self.neg_shift) % M
        a = np.asarray(a, dtype=np.int64)
        return np.where(a == Z, Z, (a + self.neg_shift) % M)

    def sub(self, a: CodeLike, b: CodeLike) -> CodeLike:
        return self.add(a, self.neg(b))

    def mul(self, a: CodeLike, b: CodeLike) -> CodeLike:
        Z, M = self.zero_code, self.order - 1
        if np.isscalar(a) and np.isscalar(b):
            a, b = int(a), int(b)
            return Z if (a == Z or b == Z) else (a + b) % M
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        return np.where((a == Z) | (b == Z), Z, (a + b) % M)

    def inv(self, a: CodeLike) -> CodeLike:
        Z, M = self.zero_code, self.order - 1
        if np.isscalar(a):
            if int(a) == Z:
                raise FieldDivisionByZero("inverse of zero")
            return (-int(a)) % M
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == Z):
            raise FieldDivisionByZero("inverse of zero")
        return (-a) % M

    def div(self, a: CodeLike, b: CodeLike) -> CodeLike:
        return self.mul(a, self.inv(b))

    def pow(self, a: CodeLike, e: int) -> CodeLike:
        Z, M = self.zero_code, self.order - 1
        if np.isscalar(a):
            a = int(a)
            if a == Z:
                if e < 0:
                    raise FieldDivisionByZero("negative power of zero")
                return 0 if e == 0 else Z
            return (a * e) % M
        a = np.asarray(a, dtype=np.int64)
        if e < 0 and np.any(a == Z):
            raise FieldDivisionByZero("negative power of zero")
        if e == 0:
            return np.zeros_like(a)
        return np.where(a == Z, Z, (a * e) % M)

    def conj(self, a: CodeLike) -> CodeLike:
        """Frobenius ``x -> x^q``."""
        return self.pow(a, self.q)

    def norm(self, a: CodeLike) -> CodeLike:
        """``x -> x^(q+1)``, onto GF(q)."""
        return self.pow(a, self.q + 1)

    def from_int(self, n: int) -> int:
        """Code of the prime-field element ``n * 1``."""
        return int(self.log_table[n % self.p])

    def to_vector(self, a: CodeLike) -> CodeLike:
        """Polynomial-basis integer for a code (base-p digits are coefficients)."""
        if np.isscalar(a):
            return 0 if int(a) == self.zero_code else int(self.exp_table[int(a)])
        a = np.asarray(a, dtype=np.int64)
        safe = np.where(a == self.zero_code, 0, a)
        return np.where(a == self.zero_code, 0, self.exp_table[safe])

    def from_vector(self, v: CodeLike) -> CodeLike:
        if np.isscalar(v):
            return int(self.log_table[int(v)])
        return self.log_table[np.asarray(v, dtype=np.int64)]

    def in_subfield(self, a: CodeLike) -> CodeLike:
        """True where ``x^q == x``."""
        if np.isscalar(a):
            return self.conj(a) == int(a)
        return self.conj(a) == np.asarray(a)

    # ------------------------------------------------------------------
    # text format: "0", "1", "w", "w^k"; bare integers are prime-field ints
    _TOKEN = re.compile(r"^\s*(?:(?P<w>w|ω)(?:\^\{?(?P<e>-?\d+)\}?)?|(?P<n>-?\d+))\s*$")

    def parse(self, text: str | int) -> int:
        if isinstance(text, (int, np.integer)):
            return self.from_int(int(text))
        mt = self._TOKEN.match(text)
        if not mt:
            raise ValueError(f"cannot parse field element {text!r}")
        if mt.group("n") is not None:
            return self.from_int(int(mt.group("n")))
        e = int(mt.group("e")) if mt.group("e") is not None else 1
        return e % (self.order - 1)

    def format(self, code: int) -> str:
        code = int(code)
        if code == self.zero_code:
            return "0"
        if code == 0:
            return "1"
        return f"w^{code}"

    def parse_array(self, rows) -> np.ndarray:
        return np.array([[self.parse(t) for t in row] for row in rows], dtype=np.int64)

    def format_array(self, arr: np.ndarray) -> list:
        arr = np.asarray(arr)
        if arr.ndim == 1:
            return [self.format(c) for c in arr]
        return [self.format_array(r) for r in arr]

    # ------------------------------------------------------------------
    # element constructors
    def __call__(self, x) -> FieldElement:
        if isinstance(x, FieldElement):
            self._check(x)
            return x
        if isinstance(x, str):
            return FieldElement(self, self.parse(x))
        return FieldElement(self, self.from_int(int(x)))

    def elem(self, code: int) -> FieldElement:
        return FieldElement(self, int(code))

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, self.zero_code)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def omega(self) -> FieldElement:
        return FieldElement(self, 1 % (self.order - 1))

    def elements(self):
        """All elements in code order (zero last)."""
        return [FieldElement(self, c) for c in range(self.order)]

    def _check(self, x: FieldElement) -> None:
        if x.ctx is not self and x.ctx.key != self.key:
            raise ContextMismatch(f"element of {x.ctx} used with {self}")

    def card(self) -> dict:
        return {
            "p": self.p,
            "m": self.m,
            "q": self.q,
            "q2": self.order,
            "modulus": list(self.modulus),
            "omega_order": self.order - 1,
            "omega_is_primitive": self.omega_is_primitive,
            "alpha": self.format(alpha_for_minus_one(self).code),
        }


class FieldElement:
    """One element of GF(q^2), held as its discrete-log code."""

    __slots__ = ("ctx", "code")

    def __init__(self, ctx: FieldCtx, code: int):
        self.ctx = ctx
        self.code = int(code)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            self.ctx._check(other)
            return other.code
        if isinstance(other, (int, np.integer)):
            return self.ctx.from_int(int(other))
        return NotImplemented

    def _wrap(self, code: int) -> FieldElement:
        return FieldElement(self.ctx, code)

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.ctx.add(self.code, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.ctx.sub(self.code, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.ctx.sub(o, self.code))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.ctx.mul(self.code, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.ctx.div(self.code, o))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.ctx.div(o, self.code))

    def __neg__(self):
        return self._wrap(self.ctx.neg(self.code))

    def __pow__(self, e: int):
        return self._wrap(self.ctx.pow(self.code, int(e)))

    def inv(self) -> FieldElement:
        return self._wrap(self.ctx.inv(self.code))

    def conj(self) -> FieldElement:
        return self._wrap(self.ctx.conj(self.code))

    def norm(self) -> FieldElement:
        return self._wrap(self.ctx.norm(self.code))

    def is_zero(self) -> bool:
        return self.code == self.ctx.zero_code

    def in_subfield(self) -> bool:
        return bool(self.ctx.in_subfield(self.code))

    def log(self) -> int:
        if self.is_zero():
            raise ZeroInput("log of zero")
        return self.code

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.ctx.key == other.ctx.key and self.code == other.code
        if isinstance(other, (int, np.integer)):
            return self.code == self.ctx.from_int(int(other))
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ctx.key, self.code))

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __str__(self) -> str:
        return self.ctx.format(self.code)

    def __repr__(self) -> str:
        return f"<{self} in GF({self.ctx.order})>"


@functools.lru_cache(maxsize=None)
def _cached_field(p: int, m: int, conway_path: str | None) -> FieldCtx:
    return FieldCtx(p, m)


def field_new(p: int, m: int) -> FieldCtx:
    """GF(q^2) for q = p^m, defined by the shipped Conway polynomial."""
    return _cached_field(p, m, os.environ.get("HSD_CONWAY_TABLE"))


def field_from_order(q2: int) -> FieldCtx:
    """Field context from its order q^2 (must be an even power of a prime)."""
    for p in range(2, q2 + 1):
        if q2 % p == 0:
            break
    e, r = 0, q2
    while r % p == 0:
        r //= p
        e += 1
    if r != 1 or not _is_prime(p):
        raise NotPrime(f"{q2} is not a prime power")
    if e % 2:
        raise ValueError(f"{q2} is not the square of a prime power")
    return field_new(p, e // 2)


def conj(x: FieldElement) -> FieldElement:
    return x.conj()


def norm_root(n: FieldElement, ctx: FieldCtx | None = None) -> FieldElement:
    """Smallest-exponent ``t`` with ``t^(q+1) == n`` for nonzero ``n`` in GF(q)."""
    ctx = ctx or n.ctx
    if isinstance(n, (int, np.integer)):
        n = ctx(int(n))
    ctx._check(n)
    if n.is_zero():
        raise ZeroInput("norm_root of zero")
    if not n.in_subfield():
        raise NoRoot(f"{n} is not in GF({ctx.q})")
    # s*(q+1) = log n  (mod q^2-1); log n is a multiple of q+1 on GF(q)*
    return ctx.elem(n.code // (ctx.q + 1))


def alpha_for_minus_one(ctx: FieldCtx) -> FieldElement:
    """An element with ``alpha^(q+1) == -1``: w^((q-1)/2), or 1 in characteristic 2."""
    if ctx.p == 2:
        return ctx.one
    alpha = ctx.elem((ctx.q - 1) // 2)
    minus_one = -ctx.one
    if alpha.norm() == minus_one:
        return alpha
    for c in range(ctx.order - 1):
        if ctx.norm(c) == minus_one.code:
            return ctx.elem(c)
    raise AssertionError("norm map is onto GF(q)*")
