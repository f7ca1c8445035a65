from d2kit.algebra import (
    base_field_algebra, cyclic_group_table, group_algebra, matrix_algebra,
)
from d2kit.bimodules import (
    Bimodule, h_equivalent, hom_bimodule, modules_isomorphic, similar_summand,
    _hom_by_generators, _hom_direct,
)
from d2kit.fields import Field
from d2kit.linalg import Subspace, identity, mat_mul, vec_of_mat, zeros_mat

Q = Field("rational")


def q(x):
    return Q.conv(x)


def test_regular_bimodule_validates():
    M = matrix_algebra(Q, 2)
    X = Bimodule.regular(M)
    X.validate()


def test_end_of_regular_bimodule_is_center():
    # bimodule endos of A as an A-A-bimodule = center of A
    M = matrix_algebra(Q, 2)
    X = Bimodule.regular(M)
    H = hom_bimodule(X, X)
    assert len(H) == 1  # central simple: only scalars
    A2 = group_algebra(Q, cyclic_group_table(2))
    H2 = hom_bimodule(Bimodule.regular(A2), Bimodule.regular(A2))
    assert len(H2) == 2  # commutative: all of A


def test_one_sided_hom_counts():
    # Hom_{K-K}(V, W) is everything: dim = dim V * dim W
    K = base_field_algebra(Q)
    V = Bimodule(K, K, 2, (identity(Q, 2),), (identity(Q, 2),), name="V")
    W = Bimodule(K, K, 3, (identity(Q, 3),), (identity(Q, 3),), name="W")
    assert len(hom_bimodule(V, W)) == 6


def test_similar_summand_self_and_zero():
    M = matrix_algebra(Q, 2)
    X = Bimodule.regular(M)
    w = similar_summand(X, X)
    assert w is not None
    f = Q
    total = zeros_mat(f, 4, 4)
    for c, a, b in w:
        prod = mat_mul(f, a, b)
        total = tuple(tuple(f.add(x, f.mul(c, y)) for x, y in zip(r, s))
                      for r, s in zip(total, prod))
    assert total == identity(f, 4)

    Z = Bimodule(M, M, 0, tuple(() for _ in range(4)), tuple(() for _ in range(4)),
                 name="0", validate=False)
    assert similar_summand(X, Z) == []  # zero module is a summand of anything
    assert similar_summand(Z, X) is None  # X never a summand of copies of 0


def test_simple_modules_of_m2_are_h_equivalent_to_regular():
    # column space Q^2 as a left M_2-module
    M = matrix_algebra(Q, 2)
    lact = []
    for i in range(4):
        u, v = divmod(i, 2)
        mat = [[q(0)] * 2 for _ in range(2)]
        mat[u][v] = q(1)
        lact.append(tuple(tuple(r) for r in mat))
    V = Bimodule.left_module(M, 2, tuple(lact), name="Q^2")
    Reg = Bimodule(M, base_field_algebra(Q), 4, M.lmats, (identity(Q, 4),), name="M")
    assert h_equivalent(V, Reg)
    assert not modules_isomorphic(V, Reg)  # dims differ


def test_generator_reduction_agrees_with_direct():
    M = matrix_algebra(Q, 2)
    Reg = Bimodule(M, base_field_algebra(Q), 4, M.lmats, (identity(Q, 4),), name="M")
    direct = _hom_direct(Reg, Reg)
    reduced = _hom_by_generators(Reg, Reg)
    S1 = Subspace.from_vectors(Q, 16, [vec_of_mat(F) for F in direct])
    S2 = Subspace.from_vectors(Q, 16, [vec_of_mat(F) for F in reduced])
    assert S1 == S2 and S1.dim == 4  # End of left-regular M_2 = right mults
