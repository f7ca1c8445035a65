"""Built-in example extensions and a seeded random-extension generator.

Gallery names are stable identifiers used by the command line and the test
suite.  Every entry returns a fresh RingExtension.
"""

import random
from itertools import permutations

from .algebra import (
    Algebra, AlgebraMap, base_field_algebra, cyclic_group_table, group_algebra,
    matrix_algebra, product_algebra, subalgebra_on,
)
from .extension import RingExtension
from .fields import Field
from .linalg import Subspace, identity, unit_vec, zeros_vec


def symmetric_group_table(n):
    elems = sorted(permutations(range(n)))
    index = {p: i for i, p in enumerate(elems)}
    return [[index[tuple(p[x] for x in r)] for r in elems] for p in elems]


def _inclusion_extension(M, vectors, nname, name):
    N, incl = subalgebra_on(M, Subspace.from_vectors(M.field, M.dim, vectors),
                            name=nname)
    return RingExtension(N, M, incl, name=name)


def trivial_extension(field=None):
    """N = M = the C_2 group algebra, identity inclusion."""
    f = field or Field("rational")
    M = group_algebra(f, cyclic_group_table(2), name="kC2")
    return RingExtension(M, M, AlgebraMap.identity(M), name="trivial")


def upper_triangular_in_m2(field=None):
    """M = M_2, N = upper triangular matrices."""
    f = field or Field("rational")
    M = matrix_algebra(f, 2)
    return _inclusion_extension(M, [M.basis(0), M.basis(1), M.basis(3)],
                                "T2", "uppertri-in-M2")


def scalars_in_m2(field=None):
    f = field or Field("rational")
    M = matrix_algebra(f, 2)
    N = base_field_algebra(f)
    incl = AlgebraMap(N, M, tuple((c,) for c in M.unit), name="unit")
    return RingExtension(N, M, incl, name="scalars-in-M2")


def scalars_in_kxk(field=None):
    f = field or Field("rational")
    K = base_field_algebra(f)
    M = product_algebra(K, K, name="KxK")
    incl = AlgebraMap(K, M, tuple((c,) for c in M.unit), name="unit")
    return RingExtension(K, M, incl, name="scalars-in-KxK")


def scalars_in_kxkxk(field=None):
    f = field or Field("rational")
    K = base_field_algebra(f)
    M = product_algebra(product_algebra(K, K), K, name="KxKxK")
    incl = AlgebraMap(K, M, tuple((c,) for c in M.unit), name="unit")
    return RingExtension(K, M, incl, name="scalars-in-KxKxK")


def kc2_in_kc4(field=None):
    """Q[C_2] inside Q[C_4] (the subgroup generated by the square)."""
    f = field or Field("rational")
    M = group_algebra(f, cyclic_group_table(4), name="kC4")
    one, g2 = M.basis(0), M.basis(2)
    return _inclusion_extension(M, [one, g2], "kC2", "kC2-in-kC4")


def kc3_in_ks3(field=None):
    """Q[C_3] inside Q[S_3] (the normal subgroup of 3-cycles)."""
    f = field or Field("rational")
    table = symmetric_group_table(3)
    M = group_algebra(f, table, name="kS3")
    elems = sorted(permutations(range(3)))
    three_cycle_indices = [i for i, p in enumerate(elems)
                           if p in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]]
    vectors = [M.basis(i) for i in three_cycle_indices]
    return _inclusion_extension(M, vectors, "kC3", "kC3-in-kS3")


def random_extension(seed, max_dim=6, field=None):
    """A seeded random extension: M drawn from a template pool, N the unital
    subalgebra generated by random elements of M."""
    f = field or Field("rational")
    rng = random.Random(seed)
    templates = [
        lambda: matrix_algebra(f, 2),
        lambda: group_algebra(f, cyclic_group_table(rng.choice([2, 3, 4, 6])), name="kCn"),
        lambda: group_algebra(f, symmetric_group_table(3), name="kS3"),
        lambda: product_algebra(base_field_algebra(f), base_field_algebra(f)),
        lambda: product_algebra(matrix_algebra(f, 2), base_field_algebra(f)),
        lambda: _upper_triangular_algebra(f),
        lambda: product_algebra(_upper_triangular_algebra(f), base_field_algebra(f)),
    ]
    while True:
        M = rng.choice(templates)()
        if M.dim <= max_dim:
            break
    # subalgebra generated by 1 and a couple of random small elements
    k = rng.choice([1, 1, 2])
    gens = []
    for _ in range(k):
        gens.append(tuple(f.conv(rng.randint(-2, 2)) for _ in range(M.dim)))
    span = Subspace.from_vectors(f, M.dim, [M.unit] + gens)
    grown = True
    while grown:
        grown = False
        basis = list(span.basis)
        for x in basis:
            for y in basis:
                p = M.mul(x, y)
                if not span.contains(p):
                    span = span.sum_with(Subspace.from_vectors(f, M.dim, [p]))
                    grown = True
    N, incl = subalgebra_on(M, span, name="N")
    return RingExtension(N, M, incl, name="random-%d" % seed)


def _upper_triangular_algebra(f):
    M = matrix_algebra(f, 2)
    S, _ = subalgebra_on(
        M, Subspace.from_vectors(f, 4, [M.basis(0), M.basis(1), M.basis(3)]), name="T2")
    return S


# seed pinned so that the sample is certifiably not D2 (see test suite)
NON_D2_SEED = 0


def gallery_names():
    return list(_GALLERY)


def gallery_extension(name, field=None):
    if name not in _GALLERY:
        raise KeyError("unknown gallery example %r (have: %s)"
                       % (name, ", ".join(_GALLERY)))
    return _GALLERY[name](field)


_GALLERY = {
    "trivial": trivial_extension,
    "uppertri_in_M2": upper_triangular_in_m2,
    "uppertri_in_M2_F2": lambda field=None: upper_triangular_in_m2(Field("prime", 2)),
    "scalars_in_M2": scalars_in_m2,
    "scalars_in_KxK": scalars_in_kxk,
    "centrally_projective_KxKxK": scalars_in_kxkxk,
    "kC2_in_kC4": kc2_in_kc4,
    "kC3_in_kS3": kc3_in_ks3,
    "random_non_d2": lambda field=None: random_extension(NON_D2_SEED, field=field),
}
