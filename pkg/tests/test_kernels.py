import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsdcodes import kernels
from hsdcodes.field import field_from_order

pytestmark = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")

ORDERS = [4, 9, 16, 25, 64]


def rand(F, shape, seed):
    return np.random.default_rng(seed).integers(0, F.order, shape)


@given(st.sampled_from(ORDERS), st.integers(1, 3), st.integers(1, 7), st.integers(0, 10**6))
def test_min_weight_backends_agree(order, k, n, seed):
    F = field_from_order(order)
    G = rand(F, (k, n), seed)
    args = (G, F.zech, F.zero_code, F.order - 1)
    assert kernels.min_weight(*args, backend="numba") == kernels.min_weight(*args, backend="numpy")


@given(st.sampled_from(ORDERS), st.integers(1, 4), st.integers(1, 5), st.integers(0, 10**6))
def test_batched_rank_backends_agree(order, r, c, seed):
    F = field_from_order(order)
    stack = rand(F, (20, r, c), seed)
    # make some members rank deficient
    stack[::3, -1] = stack[::3, 0]
    args = (stack, F.zech, F.zero_code, F.order - 1, F.neg_shift)
    assert np.array_equal(kernels.batched_rank(*args, backend="numba"), kernels.batched_rank(*args, backend="numpy"))


@given(st.sampled_from(ORDERS), st.integers(1, 4), st.integers(0, 10**6))
def test_right_multiply_backends_agree(order, n, seed):
    F = field_from_order(order)
    stack = rand(F, (6, n, n), seed)
    gen = rand(F, (n, n), seed + 1)
    args = (stack, gen, F.zech, F.zero_code, F.order - 1)
    assert np.array_equal(kernels.right_multiply(*args, backend="numba"), kernels.right_multiply(*args, backend="numpy"))


def test_exp_table_backends_agree():
    low = np.array([1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0], dtype=np.int64)  # x^13 + x^4 + x^3 + x + 1
    a = kernels._build_exp_nb(2, 13, low)
    b = kernels._build_exp_np(2, 13, low)
    assert np.array_equal(a, b) and len(set(a.tolist())) == 2**13 - 1


def test_early_exit_and_leads():
    F = field_from_order(9)
    G = rand(F, (3, 6), 11)
    args = (G, F.zech, F.zero_code, F.order - 1)
    d = kernels.min_weight(*args)
    for backend in ("numba", "numpy"):
        assert kernels.min_weight(*args, stop_below=7, backend=backend) < 7
        parts = [kernels.min_weight(*args, leads=(i, i + 1), backend=backend) for i in range(3)]
        assert min(parts) == d


def test_backend_selection():
    assert kernels.active_backend() in ("numba", "numpy")
    with pytest.raises(ValueError):
        kernels.batched_rank(np.zeros((1, 1, 1), dtype=np.int64), None, 0, 0, 0, backend="fortran")
