"""Hot loops, each in a numba and a pure-numpy flavour.

The numba path is used when numba imports and ``HSD_BACKEND`` is not
``numpy``.  Both flavours are always importable under their ``_nb`` /
``_np`` names so tests and ``benchmarks/bench_kernels.py`` can compare them.

All kernels work on discrete-log codes (see :mod:`hsdcodes.field`):
``Z = Q - 1`` is zero, ``M = Q - 1`` is the multiplicative order.
"""

from __future__ import annotations

import itertools
import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


BACKEND = os.environ.get("HSD_BACKEND", "numba").strip().lower()
USE_NUMBA = HAVE_NUMBA and BACKEND != "numpy"


def active_backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


def _pick(backend: str | None) -> bool:
    if backend is None:
        return USE_NUMBA
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend == "numba"


# ----------------------------------------------------------------------
# scalar helpers for the numba path


@njit(cache=True, inline="always")
def _add(a, b, zech, Z, M):
    if a == Z:
        return b
    if b == Z:
        return a
    d = b - a
    if d < 0:
        d += M
    z = zech[d]
    if z == Z:
        return Z
    s = a + z
    if s >= M:
        s -= M
    return s


@njit(cache=True, inline="always")
def _mul(a, b, Z, M):
    if a == Z or b == Z:
        return Z
    s = a + b
    if s >= M:
        s -= M
    return s


# numpy helpers (array in, array out)
def _add_np(a, b, zech, Z, M):
    z = zech[(b - a) % M]
    out = np.where(z == Z, Z, (a + z) % M)
    out = np.where(a == Z, b, out)
    return np.where(b == Z, a, out)


def _mul_np(a, b, Z, M):
    return np.where((a == Z) | (b == Z), Z, (a + b) % M)


# ----------------------------------------------------------------------
# field table construction


@njit(cache=True)
def _build_exp_nb(p, D, low):
    Q = p**D
    exp = np.empty(Q - 1, dtype=np.int64)
    digits = np.zeros(D, dtype=np.int64)
    digits[0] = 1
    pw = np.empty(D, dtype=np.int64)
    pw[0] = 1
    for i in range(1, D):
        pw[i] = pw[i - 1] * p
    for k in range(Q - 1):
        v = 0
        for i in range(D):
            v += digits[i] * pw[i]
        exp[k] = v
        top = digits[D - 1]
        for i in range(D - 1, 0, -1):
            digits[i] = (digits[i - 1] - top * low[i]) % p
        digits[0] = (-top * low[0]) % p
    return exp


def _build_exp_np(p, D, low):
    Q = p**D
    exp = np.empty(Q - 1, dtype=np.int64)
    digits = [0] * D
    digits[0] = 1
    pw = [p**i for i in range(D)]
    low = [int(c) for c in low]
    for k in range(Q - 1):
        exp[k] = sum(d * w for d, w in zip(digits, pw))
        top = digits[-1]
        digits = [(-top * low[0]) % p] + [
            (digits[i - 1] - top * low[i]) % p for i in range(1, D)
        ]
    return exp


def build_exp_table(p: int, D: int, low: np.ndarray, backend: str | None = None) -> np.ndarray:
    """``exp[k]`` = polynomial-basis integer of ``w^k`` for the monic modulus
    ``x^D + sum(low[i] x^i)``."""
    if _pick(backend) and p**D > 4096:
        return _build_exp_nb(p, D, low.astype(np.int64))
    return _build_exp_np(p, D, low)


# ----------------------------------------------------------------------
# minimum weight by exhaustive projective enumeration
#
# rowmul[j, c, :] is the codeword c * G_j.  Each nonzero codeword is a
# scalar multiple of exactly one message whose leading nonzero symbol is 1,
# so only (Q^k - 1)/(Q - 1) messages are visited.


def row_multiples(G: np.ndarray, zech: np.ndarray, Z: int, M: int) -> np.ndarray:
    k, n = G.shape
    Q = Z + 1
    c = np.arange(Q, dtype=np.int64)[None, :, None]
    return _mul_np(c, G[:, None, :], Z, M)


@njit(cache=True, nogil=True)
def _min_weight_nb(rowmul, zech, Z, M, stop_below, lead_lo, lead_hi):
    k, Q, n = rowmul.shape
    best = n + 1
    partial = np.empty((k + 1, n), dtype=np.int64)
    digits = np.zeros(k, dtype=np.int64)
    for lead in range(lead_lo, lead_hi):
        for t in range(n):
            partial[lead + 1, t] = rowmul[lead, 0, t]
        for j in range(lead + 1, k):
            digits[j] = 0
            for t in range(n):
                partial[j + 1, t] = _add(partial[j, t], rowmul[j, 0, t], zech, Z, M)
        while True:
            w = 0
            for t in range(n):
                if partial[k, t] != Z:
                    w += 1
            if w < best:
                best = w
                if best < stop_below:
                    return best
            j = k - 1
            while j > lead:
                digits[j] += 1
                if digits[j] < Q:
                    break
                digits[j] = 0
                j -= 1
            if j <= lead:
                break
            for jj in range(j, k):
                c = digits[jj]
                for t in range(n):
                    partial[jj + 1, t] = _add(partial[jj, t], rowmul[jj, c, t], zech, Z, M)
    return best


_BLOCK_ROWS = 1 << 16


def _span_table(rows: list[np.ndarray], n: int, zech, Z, M) -> np.ndarray:
    """All sums ``sum_j rows[j][c_j]`` as a (Q^len(rows), n) array."""
    table = np.full((1, n), Z, dtype=np.int64)
    for rm in rows:
        table = _add_np(table[:, None, :], rm[None, :, :], zech, Z, M).reshape(-1, n)
    return table


def _min_weight_np(rowmul, zech, Z, M, stop_below, lead_lo, lead_hi):
    k, Q, n = rowmul.shape
    best = n + 1
    for lead in range(lead_lo, lead_hi):
        free = list(range(lead + 1, k))
        tail_len = 0
        while tail_len < len(free) and Q ** (tail_len + 1) <= _BLOCK_ROWS:
            tail_len += 1
        head, tail = free[: len(free) - tail_len], free[len(free) - tail_len :]
        table = _span_table([rowmul[j] for j in tail], n, zech, Z, M)
        base = rowmul[lead, 0]
        for combo in itertools.product(range(Q), repeat=len(head)):
            prefix = base
            for j, c in zip(head, combo):
                prefix = _add_np(prefix, rowmul[j, c], zech, Z, M)
            words = _add_np(prefix[None, :], table, zech, Z, M)
            w = int((words != Z).sum(axis=1).min())
            if w < best:
                best = w
                if best < stop_below:
                    return best
    return best


def min_weight(
    G: np.ndarray,
    zech: np.ndarray,
    Z: int,
    M: int,
    stop_below: int = 0,
    backend: str | None = None,
    leads: tuple[int, int] | None = None,
) -> int:
    """Minimum Hamming weight over all nonzero codewords of the row space of ``G``.

    With ``stop_below > 0`` the scan ends as soon as a word of weight below
    it turns up, and that weight is returned (an upper bound, not exact).
    ``leads`` restricts the scan to messages whose leading index lies in the
    half-open range, for partitioned runs.
    """
    G = np.ascontiguousarray(G, dtype=np.int64)
    k, n = G.shape
    if k == 0:
        return n + 1
    rowmul = row_multiples(G, zech, Z, M)
    lo, hi = leads if leads is not None else (0, k)
    if _pick(backend):
        return int(_min_weight_nb(rowmul, zech, Z, M, stop_below, lo, hi))
    return int(_min_weight_np(rowmul, zech, Z, M, stop_below, lo, hi))


# ----------------------------------------------------------------------
# batched rank of a stack of matrices (used by the MDS minor test)


@njit(cache=True, nogil=True)
def _batched_rank_nb(stack, zech, Z, M, half):
    S, r, c = stack.shape
    out = np.empty(S, dtype=np.int64)
    work = np.empty((r, c), dtype=np.int64)
    for s in range(S):
        for i in range(r):
            for j in range(c):
                work[i, j] = stack[s, i, j]
        rank = 0
        for col in range(c):
            piv = -1
            for i in range(rank, r):
                if work[i, col] != Z:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != rank:
                for j in range(c):
                    tmp = work[piv, j]
                    work[piv, j] = work[rank, j]
                    work[rank, j] = tmp
            inv = (M - work[rank, col]) % M
            for j in range(c):
                work[rank, j] = _mul(work[rank, j], inv, Z, M)
            for i in range(rank + 1, r):
                f = work[i, col]
                if f == Z:
                    continue
                nf = f + half
                if nf >= M:
                    nf -= M
                for j in range(col, c):
                    work[i, j] = _add(work[i, j], _mul(nf, work[rank, j], Z, M), zech, Z, M)
            rank += 1
            if rank == r:
                break
        out[s] = rank
    return out


def _batched_rank_np(stack, zech, Z, M, half):
    work = np.array(stack, dtype=np.int64, copy=True)
    S, r, c = work.shape
    rank = np.zeros(S, dtype=np.int64)
    idx = np.arange(S)
    for col in range(c):
        rows = np.arange(r)[None, :]
        cand = (work[:, :, col] != Z) & (rows >= rank[:, None])
        has = cand.any(axis=1) & (rank < r)
        if not has.any():
            continue
        piv = np.argmax(cand, axis=1)
        sel = idx[has]
        pr, rr = piv[has], rank[has]
        top = work[sel, rr].copy()
        work[sel, rr] = work[sel, pr]
        work[sel, pr] = top
        prow = work[sel, rr]
        inv = (-prow[:, col]) % M
        prow = _mul_np(prow, inv[:, None], Z, M)
        work[sel, rr] = prow
        f = work[sel, :, col]
        nf = np.where(f == Z, Z, (f + half) % M)
        below = rows >= (rr[:, None] + 1)
        nf = np.where(below, nf, Z)
        upd = _add_np(work[sel], _mul_np(nf[:, :, None], prow[:, None, :], Z, M), zech, Z, M)
        work[sel] = upd
        rank[sel] += 1
    return rank


def batched_rank(stack: np.ndarray, zech, Z: int, M: int, half: int, backend: str | None = None):
    stack = np.ascontiguousarray(stack, dtype=np.int64)
    if _pick(backend):
        return _batched_rank_nb(stack, zech, Z, M, half)
    return _batched_rank_np(stack, zech, Z, M, half)


# ----------------------------------------------------------------------
# batched matrix product against one fixed right factor, plus hash keys
# for the group-closure BFS


@njit(cache=True, nogil=True)
def _right_multiply_nb(stack, gen, zech, Z, M):
    S, r, k = stack.shape
    c = gen.shape[1]
    out = np.empty((S, r, c), dtype=np.int64)
    for s in range(S):
        for i in range(r):
            for j in range(c):
                acc = Z
                for t in range(k):
                    acc = _add(acc, _mul(stack[s, i, t], gen[t, j], Z, M), zech, Z, M)
                out[s, i, j] = acc
    return out


def _right_multiply_np(stack, gen, zech, Z, M):
    S, r, k = stack.shape
    acc = np.full((S, r, gen.shape[1]), Z, dtype=np.int64)
    for t in range(k):
        acc = _add_np(acc, _mul_np(stack[:, :, t, None], gen[None, None, t, :], Z, M), zech, Z, M)
    return acc


def right_multiply(stack, gen, zech, Z: int, M: int, backend: str | None = None):
    stack = np.ascontiguousarray(stack, dtype=np.int64)
    gen = np.ascontiguousarray(gen, dtype=np.int64)
    if _pick(backend):
        return _right_multiply_nb(stack, gen, zech, Z, M)
    return _right_multiply_np(stack, gen, zech, Z, M)


def encode_keys(stack: np.ndarray, Q: int):
    """Injective key per matrix: int64 when it fits, else raw bytes rows."""
    S = stack.shape[0]
    flat = stack.reshape(S, -1)
    if flat.shape[1] * np.log2(Q) < 62:
        weights = Q ** np.arange(flat.shape[1], dtype=np.int64)
        return flat @ weights
    width = flat.shape[1] * flat.dtype.itemsize
    return np.ascontiguousarray(flat).view(np.dtype((np.void, width))).ravel()
