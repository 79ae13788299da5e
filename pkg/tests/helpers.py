"""Shared generators of random valid inputs."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from hsdcodes.field import FieldCtx, field_from_order
from hsdcodes.linalg import identity
from hsdcodes.unitary import make_generators, transvection_solutions


@lru_cache(maxsize=None)
def _solutions(order: int):
    return transvection_solutions(field_from_order(order))


def random_unitary(F: FieldCtx, n: int, seed: int, length: int = 12):
    """Product of random generators, with a random transvection solution."""
    rng = np.random.default_rng(seed)
    sols = _solutions(F.order)
    abcd = sols[int(rng.integers(len(sols)))]
    gens = make_generators(F, n, abcd=abcd).group_generators()
    L = identity(F, n)
    for _ in range(length):
        L = L @ gens[int(rng.integers(len(gens)))]
    return L


def random_alpha(F: FieldCtx, seed: int):
    """A random element of norm -1."""
    rng = np.random.default_rng(seed)
    pool = [x for x in F.elements() if not x.is_zero() and x.norm() == -F.one]
    return pool[int(rng.integers(len(pool)))]
