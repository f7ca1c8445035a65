import pytest

from d2kit.algebra import AlgebraMap, polynomial_quotient_algebra
from d2kit.extension import ExtensionError, RingExtension, centralizer_chain
from d2kit.fields import Field
from d2kit.gallery import (
    kc2_in_kc4, random_extension, scalars_in_m2, trivial_extension,
    upper_triangular_in_m2,
)
from d2kit.morita import (
    build_context, mu_r_surjective, progenerator_checks, right_side_duals,
)

Q = Field("rational")


def x2_in_x3():
    q = Q.conv
    N = polynomial_quotient_algebra(Q, [0, 0], name="K[x]/x2")
    M = polynomial_quotient_algebra(Q, [0, 0, 0], name="K[x]/x3")
    iota = AlgebraMap(N, M, [[q(1), q(0)], [q(0), q(0)], [q(0), q(1)]])
    return RingExtension(N, M, iota, name="x2-in-x3")


def test_context_trivial_collapses():
    ext = trivial_extension()
    ctx = build_context(ext)
    ch = ctx.chain
    # N = M: B ~ R ~ C all have the same dimension
    assert ch.B.dim == ch.R.dim == ch.C.dim == 2
    assert ctx.mu_R_bijective


def test_context_uppertri_all_trivial():
    ctx = build_context(upper_triangular_in_m2())
    assert ctx.chain.A.dim == ctx.chain.R.dim == 1
    assert ctx.mu_R_bijective
    progenerator_checks(ctx)


def test_context_kc2_kc4_full_verification():
    ext = kc2_in_kc4()
    ctx = build_context(ext)
    assert ctx.chain.B.dim == 8 and ctx.chain.A.dim == 8 and ctx.chain.R.dim == 4
    assert ctx.mu_R_bijective
    assert set(ctx.report) >= {"mu_R", "psi", "tau", "iota", "end_A", "end_B",
                               "associativity", "psi_bimodule"}
    rep = progenerator_checks(ctx)
    assert rep["A_progenerator"] and rep["B_progenerator"]


def test_context_scalars_rank():
    ext = scalars_in_m2()
    ctx = build_context(ext)
    # mu_R: B (x)_R A ~ C with dim 16*16/4 = 64
    assert ctx.BA.dim == 64 and ctx.chain.C.dim == 64
    assert ctx.mu_R_bijective


def test_right_side_duals_dims():
    ext = scalars_in_m2()
    rep = right_side_duals(ext)
    assert "B_dual_to_A" in rep and "M_tensor_B" in rep and "C_end_A" in rep
    rep2 = right_side_duals(kc2_in_kc4())
    assert "B_dual_to_A" in rep2


def test_converse_mu_r_epi_iff_left_d2_on_gallery():
    from d2kit.extension import d2_quasibasis
    for build in (trivial_extension, upper_triangular_in_m2, kc2_in_kc4,
                  scalars_in_m2, x2_in_x3):
        ext = build()
        left = d2_quasibasis(ext, "left") is not None
        assert mu_r_surjective(ext) == left, ext.name


def test_non_d2_is_refused():
    ext = x2_in_x3()
    with pytest.raises(ExtensionError):
        build_context(ext)
    assert not mu_r_surjective(ext)


def test_random_non_d2_sample_pinned():
    from d2kit.extension import d2_quasibasis
    from d2kit.gallery import NON_D2_SEED
    ext = random_extension(NON_D2_SEED)
    assert d2_quasibasis(ext, "left") is None
    assert d2_quasibasis(ext, "right") is None
