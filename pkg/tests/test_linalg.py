import random

import pytest
from hypothesis import given, settings, strategies as st

from d2kit.fields import Field, FieldError
from d2kit.linalg import (
    Subspace, coefficients_in, identity, kernel, mat_mul, mat_vec, rref,
    solve, solve_many, span_of_products, vec_is_zero, zeros_mat, zeros_vec,
)

Q = Field("rational")
F5 = Field("prime", 5)


def q(x):
    return Q.conv(x)


def qm(rows):
    return tuple(tuple(Q.conv(x) for x in r) for r in rows)


def qv(xs):
    return tuple(Q.conv(x) for x in xs)


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------

def test_field_basics():
    assert Q.characteristic == 0
    assert F5.characteristic == 5
    assert Q.conv("9/2") == q(9) / 2
    assert F5.conv("1/2") == 3  # 2 * 3 = 6 = 1 mod 5
    assert F5.inv(2) == 3
    assert Q.to_str(q(-4)) == "-4"
    assert Q.to_str(Q.conv("9/2")) == "9/2"
    assert F5.to_str(7) == "2"


def test_field_rejects_floats_and_bad_primes():
    with pytest.raises(FieldError):
        Q.conv(0.5)
    with pytest.raises(FieldError):
        Field("prime", 6)
    with pytest.raises(FieldError):
        Field("prime")


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def test_solve_identity_returns_rhs():
    b = qv([3, -1, 7])
    assert solve(Q, identity(Q, 3), b) == b


def test_solve_zero_matrix_nonzero_rhs_is_none():
    assert solve(Q, zeros_mat(Q, 2, 2), qv([1, 0])) is None


def test_solve_2x2_rational():
    # hand elimination oracle: x2 = 9/2 from -2*x2 = -9, then x1 = 5 - 2*(9/2) = -4
    A = qm([[1, 2], [3, 4]])
    x = solve(Q, A, qv([5, 6]))
    assert x == (q(-4), Q.conv("9/2"))
    assert mat_vec(Q, A, x) == qv([5, 6])


def test_solve_shape_mismatch():
    with pytest.raises(Exception):
        solve(Q, qm([[1, 2]]), qv([1, 2]))


def test_solve_many_mixed_solvability():
    A = qm([[1, 0], [0, 0]])
    sols = solve_many(Q, A, [qv([2, 0]), qv([0, 1])])
    assert sols[0] == qv([2, 0])
    assert sols[1] is None


# ---------------------------------------------------------------------------
# kernel
# ---------------------------------------------------------------------------

def test_kernel_identity_is_zero_space():
    assert kernel(Q, identity(Q, 4)).is_zero()


def test_kernel_zero_matrix_is_full():
    k = kernel(Q, zeros_mat(Q, 3, 3))
    assert k.is_full() and k.dim == 3


def test_kernel_sum_example():
    k = kernel(Q, qm([[1, 1]]))
    assert k.dim == 1
    assert k.basis == (qv([1, -1]),)


def test_rank_nullity_on_seeded_random():
    rng = random.Random(7)
    for _ in range(25):
        rows, cols = rng.randint(1, 6), rng.randint(1, 6)
        A = tuple(tuple(q(rng.randint(-3, 3)) for _ in range(cols)) for _ in range(rows))
        R, pivots = rref(Q, A, cols)
        k = kernel(Q, A, cols)
        assert len(pivots) + k.dim == cols
        for v in k.basis:
            assert vec_is_zero(mat_vec(Q, A, v))


# ---------------------------------------------------------------------------
# Subspace / member
# ---------------------------------------------------------------------------

def test_member_full_space():
    S = Subspace.full(Q, 3)
    v = qv([2, -5, 1])
    assert S.member(v) == v


def test_member_zero_space_rejects_nonzero():
    S = Subspace.zero(Q, 2)
    assert S.member(qv([1, 0])) is None
    assert S.member(qv([0, 0])) == ()


def test_member_coefficients_reconstruct():
    S = Subspace.from_vectors(Q, 3, [qv([1, 1, 0]), qv([0, 1, 1])])
    v = qv([2, 3, 1])
    c = S.member(v)
    assert c is not None
    recon = zeros_vec(Q, 3)
    for ci, b in zip(c, S.basis):
        recon = tuple(a + ci * bb for a, bb in zip(recon, b))
    assert recon == v


def test_coefficients_in_given_generators():
    # substitution oracle: 2*(1,1) + 1*(0,1) = (2,3)
    c = coefficients_in(Q, [qv([1, 1]), qv([0, 1])], qv([2, 3]))
    assert c == qv([2, 1])
    assert coefficients_in(Q, [qv([1, 0])], qv([0, 1])) is None


def test_canonical_equality_under_row_order():
    vecs = [qv([1, 2, 3]), qv([0, 1, 1]), qv([2, 5, 7])]
    S1 = Subspace.from_vectors(Q, 3, vecs)
    S2 = Subspace.from_vectors(Q, 3, list(reversed(vecs)))
    assert S1 == S2 and S1.basis == S2.basis


def test_intersect_and_sum():
    S1 = Subspace.from_vectors(Q, 3, [qv([1, 0, 0]), qv([0, 1, 0])])
    S2 = Subspace.from_vectors(Q, 3, [qv([0, 1, 0]), qv([0, 0, 1])])
    assert S1.intersect(S2).basis == (qv([0, 1, 0]),)
    assert S1.sum_with(S2).is_full()


# ---------------------------------------------------------------------------
# span_of_products
# ---------------------------------------------------------------------------

def test_span_of_products_identity():
    I = identity(Q, 2)
    S = span_of_products(Q, [I], [I])
    assert S.dim == 1 and S.contains(qv([1, 0, 0, 1]))


def test_span_of_products_zero():
    S = span_of_products(Q, [zeros_mat(Q, 2, 2)], [identity(Q, 2)])
    assert S.is_zero()


def test_span_of_products_matrix_units():
    units = []
    for i in range(2):
        for j in range(2):
            m = [[q(0)] * 2 for _ in range(2)]
            m[i][j] = q(1)
            units.append(tuple(tuple(r) for r in m))
    S = span_of_products(Q, units, units)
    assert S.dim == 4  # matrix units multiply back onto all matrix units


# ---------------------------------------------------------------------------
# property tests
# ---------------------------------------------------------------------------

small_scalar = st.integers(min_value=-4, max_value=4)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4), st.data())
def test_kernel_vectors_annihilate(rows, cols, data):
    A = tuple(tuple(q(data.draw(small_scalar)) for _ in range(cols)) for _ in range(rows))
    for v in kernel(Q, A, cols).basis:
        assert vec_is_zero(mat_vec(Q, A, v))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4), st.data())
def test_member_round_trip(n, data):
    vecs = [tuple(q(data.draw(small_scalar)) for _ in range(n)) for _ in range(n - 1)]
    S = Subspace.from_vectors(Q, n, vecs)
    coeffs = [q(data.draw(small_scalar)) for _ in range(S.dim)]
    v = zeros_vec(Q, n)
    for c, b in zip(coeffs, S.basis):
        v = tuple(a + c * bb for a, bb in zip(v, b))
    assert S.member(v) == tuple(coeffs)


def test_prime_field_linear_algebra():
    A = tuple(tuple(F5.conv(x) for x in r) for r in [[1, 2], [3, 4]])
    x = solve(F5, A, (F5.conv(5), F5.conv(6)))
    assert mat_vec(F5, A, x) == (0, 1)
    k = kernel(F5, ((1, 1),))
    assert k.basis == ((1, 4),)
    assert mat_mul(F5, A, A) == ((2, 0), (0, 2))
