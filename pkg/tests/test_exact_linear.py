import random
from fractions import Fraction

from derived_kernel.exact_linear import (
    RatMatrix,
    cokernel_dims,
    integer_row_space_contains,
    kernel_basis,
    rank,
    smith_normal_form,
    solve,
)


def test_kernel_empty_matrix():
    assert kernel_basis(RatMatrix(0, 0)) == []


def test_kernel_identity():
    m = RatMatrix(3, 3, {(i, i): 1 for i in range(3)})
    assert kernel_basis(m) == []


def test_kernel_row_vector():
    # [[1, 1]] -> basis {(1, -1)}, solved by hand
    m = RatMatrix(1, 2, {(0, 0): 1, (0, 1): 1})
    assert kernel_basis(m) == [{0: Fraction(1), 1: Fraction(-1)}]


def test_cokernel_examples():
    assert cokernel_dims(RatMatrix(2, 2, {(0, 0): 1, (1, 1): 1})) == 0
    assert cokernel_dims(RatMatrix(3, 2)) == 3
    # [[2, 4], [1, 2]] has rank 1 by row reduction
    m = RatMatrix(2, 2, {(0, 0): 2, (0, 1): 4, (1, 0): 1, (1, 1): 2})
    assert cokernel_dims(m) == 1


def test_smith_diag_2_3():
    # gcd-step elimination by hand gives (1, 6)
    f = smith_normal_form([[2, 0], [0, 3]])
    assert f.diagonal == (1, 6)


def test_smith_identity_and_zero():
    assert smith_normal_form([[1, 0], [0, 1]]).diagonal == (1, 1)
    assert smith_normal_form([[0, 0], [0, 0]]).diagonal == (0, 0)
    assert smith_normal_form([]).diagonal == ()


def test_rank_plus_kernel_on_random_matrices():
    rng = random.Random(7)
    for _ in range(40):
        rows = rng.randrange(0, 6)
        cols = rng.randrange(0, 6)
        ent = {}
        for r in range(rows):
            for c in range(cols):
                if rng.random() < 0.55:
                    ent[(r, c)] = Fraction(rng.randrange(-4, 5))
        m = RatMatrix(rows, cols, ent)
        assert rank(m) + len(kernel_basis(m)) == cols
        for v in kernel_basis(m):
            assert m.apply(v) == {}


def test_snf_reconstruction_random():
    rng = random.Random(11)
    for _ in range(30):
        rows = rng.randrange(1, 5)
        cols = rng.randrange(1, 5)
        a = [[rng.randrange(-6, 7) for _ in range(cols)] for _ in range(rows)]
        f = smith_normal_form(a)  # invariants asserted internally
        nz = f.nonzero()
        for x, y in zip(nz, nz[1:]):
            assert y % x == 0


def test_determinism_bit_exact():
    rng = random.Random(3)
    ent = {(r, c): Fraction(rng.randrange(-3, 4), rng.randrange(1, 4))
           for r in range(5) for c in range(7) if rng.random() < 0.6}
    m1 = RatMatrix(5, 7, ent)
    m2 = RatMatrix(5, 7, dict(reversed(list(ent.items()))))
    assert repr(kernel_basis(m1)) == repr(kernel_basis(m2))
    assert kernel_basis(m1) == kernel_basis(m2)


def test_solve():
    m = RatMatrix(2, 2, {(0, 0): 1, (0, 1): 2, (1, 1): 1})
    b = {0: Fraction(5), 1: Fraction(2)}
    x = solve(m, b)
    assert m.apply(x) == b
    # inconsistent system
    m2 = RatMatrix(2, 1, {(0, 0): 1, (1, 0): 2})
    assert solve(m2, {0: Fraction(1), 1: Fraction(3)}) is None


def test_integer_row_space():
    rows = [[1, -2, 1, 0], [0, 1, -2, 1]]
    assert integer_row_space_contains(rows, 4, [1, -1, -1, 1])
    assert not integer_row_space_contains(rows, 4, [1, 0, 0, 0])
    assert integer_row_space_contains([], 3, [0, 0, 0])
    assert not integer_row_space_contains([[2, 0]], 2, [1, 0])
