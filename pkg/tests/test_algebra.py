from itertools import permutations

import pytest
import sympy

from d2kit.algebra import (
    Algebra, AlgebraError, AlgebraMap, FrobeniusCoordinates, base_field_algebra,
    build_algebra, center, centralizer_in, cyclic_group_table, dualize_via_phi,
    frobenius_coordinates, gram_matrix, group_algebra, index_one_coordinates,
    is_separable, matrix_algebra, nondegenerate_form_check, opposite_algebra,
    polynomial_quotient_algebra, product_algebra, separability_idempotent,
    subalgebra_on, tensor_algebra,
)
from d2kit.fields import Field
from d2kit.linalg import Subspace, unit_vec, vec_is_zero, zeros_vec

Q = Field("rational")
F2 = Field("prime", 2)


def q(x):
    return Q.conv(x)


def symmetric_group_table(n):
    elems = sorted(permutations(range(n)))
    index = {p: i for i, p in enumerate(elems)}
    table = []
    for p in elems:
        table.append([index[tuple(p[x] for x in r)] for r in elems])
    return table


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def test_matrix_algebra_basics():
    M = matrix_algebra(Q, 2)
    assert M.dim == 4
    # unit = e_11 + e_22 (indices 0 and 3 in row-major order)
    assert M.unit == (q(1), q(0), q(0), q(1))
    e12, e21 = M.basis(1), M.basis(2)
    assert M.mul(e12, e21) == M.basis(0)
    assert M.mul(e21, e12) == M.basis(3)


def test_group_algebra_c2():
    A = group_algebra(Q, cyclic_group_table(2))
    assert A.dim == 2 and A.is_commutative()
    g = A.basis(1)
    assert A.mul(g, g) == A.unit


def test_opposite_of_matrix_algebra():
    M = matrix_algebra(Q, 2)
    Mop = opposite_algebra(M)
    # e_12 *op e_21 = e_21 e_12 = e_22
    assert Mop.mul(Mop.basis(1), Mop.basis(2)) == M.basis(3)


def test_product_and_tensor():
    A = product_algebra(base_field_algebra(Q), base_field_algebra(Q))
    assert A.dim == 2 and A.is_commutative()
    T = tensor_algebra(matrix_algebra(Q, 2), base_field_algebra(Q))
    assert T.dim == 4


def test_validation_catches_broken_structure():
    # basis 1, a, b with a*a = b, a*b = 1, b*a = 0: (aa)a = 0 but a(aa) = 1
    one, a, b = (unit_vec(Q, 3, i) for i in range(3))
    z = zeros_vec(Q, 3)
    bad = [[one, a, b], [a, b, one], [b, z, z]]
    with pytest.raises(AlgebraError) as err:
        Algebra(Q, bad, one)
    assert "associativity" in str(err.value)


def test_validation_catches_missing_unit():
    with pytest.raises(AlgebraError):
        build_algebra(Q, {"kind": "structure", "dim": 1, "unit": [0],
                          "mult": [[0, 0, 0, "1"]]})


def test_algebra_map_validation():
    A = group_algebra(Q, cyclic_group_table(2))
    M = matrix_algebra(Q, 2)
    # g -> diag(1, -1) is a unital algebra map kC2 -> M_2
    good = AlgebraMap(A, M, [[q(1), q(1)], [q(0), q(0)], [q(0), q(0)], [q(1), q(-1)]])
    assert good.is_injective()
    with pytest.raises(AlgebraError):
        AlgebraMap(A, M, [[q(1), q(1)], [q(0), q(0)], [q(0), q(0)], [q(1), q(2)]])


# ---------------------------------------------------------------------------
# center
# ---------------------------------------------------------------------------

def test_center_matrix_algebra_is_scalars():
    M = matrix_algebra(Q, 2)
    Z = center(M)
    assert Z.dim == 1 and Z.contains(M.unit)


def test_center_commutative_is_everything():
    A = product_algebra(base_field_algebra(Q), base_field_algebra(Q))
    assert center(A).dim == 2


def test_center_s3_is_class_sums():
    table = symmetric_group_table(3)
    A = group_algebra(Q, table)
    Z = center(A)
    # independent oracle: conjugacy class count of S_3 via the table
    n = len(table)
    inv = [next(j for j in range(n) if table[i][j] == 0) for i in range(n)]
    classes = set()
    for x in range(n):
        classes.add(frozenset(table[table[g][x]][inv[g]] for g in range(n)))
    assert Z.dim == len(classes) == 3
    # each class sum is central
    for cl in classes:
        v = [q(0)] * n
        for x in cl:
            v[x] = q(1)
        assert Z.contains(tuple(v))


# ---------------------------------------------------------------------------
# separability
# ---------------------------------------------------------------------------

def test_separability_qxq():
    A = product_algebra(base_field_algebra(Q), base_field_algebra(Q))
    e = separability_idempotent(A)
    assert e is not None
    # (1,0)x(1,0) + (0,1)x(0,1) is the separability idempotent
    expect = [q(0)] * 4
    expect[0 * 2 + 0] = q(1)
    expect[1 * 2 + 1] = q(1)
    assert e == tuple(expect)


def test_separability_m2_standard_element():
    M = matrix_algebra(Q, 2)
    e = separability_idempotent(M)
    assert e is not None
    # direct verification of the standard element (1/2) sum_j e_1j (x) e_j1
    # is covered by _separability_holds inside; here check mu and symmetry
    # of the returned witness by hand on one basis element
    f = M.field
    a = M.basis(1)  # e_12
    left = [f.zero()] * 16
    right = [f.zero()] * 16
    for u in range(4):
        for v in range(4):
            c = e[u * 4 + v]
            if c == 0:
                continue
            au = M.mul(a, M.basis(u))
            va = M.mul(M.basis(v), a)
            for w in range(4):
                left[w * 4 + v] = f.add(left[w * 4 + v], f.mul(c, au[w]))
                right[u * 4 + w] = f.add(right[u * 4 + w], f.mul(c, va[w]))
    assert left == right


def test_separability_nilpotent_none():
    A = polynomial_quotient_algebra(Q, [0, 0], name="Q[x]/x^2")
    assert separability_idempotent(A) is None
    assert not is_separable(A)


# ---------------------------------------------------------------------------
# Frobenius coordinates
# ---------------------------------------------------------------------------

def test_frobenius_c2_coefficient_of_identity():
    A = group_algebra(Q, cyclic_group_table(2))
    fc = frobenius_coordinates(A)
    assert fc is not None and fc.verify(A)
    # the very first candidate (coefficient of the identity) works
    assert fc.phi == unit_vec(Q, 2, 0)
    assert fc.left == (A.basis(0), A.basis(1))
    assert fc.right == (A.basis(0), A.basis(1))


def test_frobenius_m2_trace_instance():
    M = matrix_algebra(Q, 2)
    # trace pairing identity: dual bases {e_ij}, {e_ji}
    trace = (q(1), q(0), q(0), q(1))
    fc = FrobeniusCoordinates(
        phi=trace,
        left=tuple(M.basis(i) for i in range(4)),
        right=(M.basis(0), M.basis(2), M.basis(1), M.basis(3)))
    assert fc.verify(M)
    # and the search finds some valid system too
    found = frobenius_coordinates(M)
    assert found is not None and found.verify(M)


def test_frobenius_upper_triangular_none_with_symbolic_oracle():
    # upper triangular 2x2, basis e11, e12, e22
    f = Q
    z = zeros_vec(f, 3)

    def vec(i):
        return unit_vec(f, 3, i)

    mult = [[vec(0), vec(1), z],
            [z, z, vec(1)],
            [z, z, vec(2)]]
    T = Algebra(Q, mult, (q(1), q(0), q(1)), name="T2")
    assert frobenius_coordinates(T) is None
    # independent oracle: the generic Gram determinant vanishes identically
    a, b, c = sympy.symbols("a b c")
    phis = (a, b, c)
    G = sympy.Matrix(3, 3, lambda i, j: sum(
        sympy.Integer(int(x)) * p for x, p in zip(mult[i][j], phis)))
    assert sympy.expand(G.det()) == 0


def test_frobenius_qx2_exists():
    # K[x]/x^2 is Frobenius (coefficient-of-x form) though not separable
    A = polynomial_quotient_algebra(Q, [0, 0])
    fc = frobenius_coordinates(A)
    assert fc is not None and fc.verify(A)


def test_nondegenerate_form_checks():
    M = matrix_algebra(Q, 2)
    trace = (q(1), q(0), q(0), q(1))
    assert nondegenerate_form_check(M, trace) == (True, True)
    assert nondegenerate_form_check(M, zeros_vec(Q, 4)) == (False, False)
    A = polynomial_quotient_algebra(Q, [0, 0])
    coeff_x = (q(0), q(1))
    assert gram_matrix(A, coeff_x) == ((q(0), q(1)), (q(1), q(0)))
    assert nondegenerate_form_check(A, coeff_x) == (True, True)


# ---------------------------------------------------------------------------
# index-one coordinates
# ---------------------------------------------------------------------------

def test_index_one_product_of_fields_is_sum_functional():
    A = product_algebra(base_field_algebra(Q), base_field_algebra(Q))
    fc = index_one_coordinates(A)
    assert fc.index_one and fc.verify(A, require_index_one=True)
    assert fc.phi == (q(1), q(1))  # sum of the coordinates


def test_index_one_m2_char0():
    M = matrix_algebra(Q, 2)
    fc = index_one_coordinates(M)
    assert fc.index_one and fc.verify(M, require_index_one=True)
    s = zeros_vec(Q, 4)
    for e, fi in zip(fc.left, fc.right):
        prod = M.mul(e, fi)
        s = tuple(a + b for a, b in zip(s, prod))
    assert s == M.unit


def test_index_one_m2_f2_paper_vector():
    M = matrix_algebra(F2, 2)
    # phi(X) = X_11 + X_12 + X_21 with the six-term dual basis tensor
    phi = (1, 1, 1, 0)
    pairs = [(0, 2), (1, 0), (1, 2), (3, 1), (3, 3), (2, 3)]  # e11(x)e21 + e12(x)e11 + ...
    left = tuple(M.basis(i) for i, _ in pairs)
    right = tuple(M.basis(j) for _, j in pairs)
    fc = FrobeniusCoordinates(phi=phi, left=left, right=right, index_one=True)
    assert fc.verify(M, require_index_one=True)


def test_index_one_requires_separable():
    A = polynomial_quotient_algebra(Q, [0, 0])
    with pytest.raises(AlgebraError):
        index_one_coordinates(A)


# ---------------------------------------------------------------------------
# dualize_via_phi
# ---------------------------------------------------------------------------

def test_dualize_regular_module():
    A = product_algebra(base_field_algebra(Q), base_field_algebra(Q))
    fc = frobenius_coordinates(A)
    hom_basis, to_linear, from_linear = dualize_via_phi(A, fc, A.rmats)
    # V = A regular: both hom spaces have dimension 2
    assert len(hom_basis) == 2
    # identity-as-hom corresponds to phi itself
    from d2kit.linalg import identity as id_mat
    assert to_linear(id_mat(Q, 2)) == fc.phi


def test_dualize_c2_group_algebra():
    A = group_algebra(Q, cyclic_group_table(2))
    fc = frobenius_coordinates(A)
    hom_basis, to_linear, from_linear = dualize_via_phi(A, fc, A.rmats)
    assert len(hom_basis) == 2  # round trips asserted inside


# ---------------------------------------------------------------------------
# subalgebras / centralizers
# ---------------------------------------------------------------------------

def test_subalgebra_on_upper_triangulars():
    M = matrix_algebra(Q, 2)
    span = Subspace.from_vectors(Q, 4, [M.basis(0), M.basis(1), M.basis(3)])
    S, incl = subalgebra_on(M, span, name="T2")
    assert S.dim == 3
    assert incl(S.unit) == M.unit


def test_centralizer_of_diagonals():
    M = matrix_algebra(Q, 2)
    diag = [M.basis(0), M.basis(3)]
    C = centralizer_in(M, diag)
    assert C.dim == 2  # the diagonal matrices themselves
