"""Quantum specializations of the depth-two machinery: the biseparable
pairing identities, the Hopf algebra structure on A for an irreducible D2
Frobenius extension (antipode, integrals, split/separable criteria), and the
weak Hopf structures on A and B when the centralizer is separable.
"""

import random
from dataclasses import dataclass, field as dc_field

from .algebra import (
    Algebra, AlgebraError, index_one_coordinates, separability_idempotent,
)
from .bialgebroid import (
    BialgebroidError, bialgebroid_A, bialgebroid_B, verify_axioms, axioms_hold,
)
from .extension import centralizer_chain, classify, d2_quasibasis
from .linalg import (
    Subspace, coefficients_in, identity, kernel, mat_mul, mat_vec, rref,
    solve, solve_many, transpose, unit_vec, vec_add, vec_is_zero, vec_of_mat,
    vec_scale, zeros_vec,
)
from .morita import _pair_apply_mu
from .tower import build_tower, find_frobenius_system, psi_isos


class HypothesisFailure(ValueError):
    """A quantum construction was asked for outside its hypotheses."""


def is_irreducible(ext):
    """Trivial centralizer: R = K 1_M."""
    chain = centralizer_chain(ext)
    return chain.R.dim == 1


def _require(cond, what):
    if not cond:
        raise HypothesisFailure("hypothesis failed: %s" % what)


# ---------------------------------------------------------------------------
# biseparable case
# ---------------------------------------------------------------------------

def biseparable_pairing_check(ext, corrupt=False):
    """With trivial centralizer, Frobenius, D2, split and separable: the
    pairing <b, a> = b^1 a(b^2) agrees with the tower pairing
    E_M E_{M_1}(psi_B(b) e_1 e_2 phi_A(a)), and the counit of M_2^M matches
    eps_B through psi_B.  `corrupt` perturbs psi_B as a negative control."""
    prof = classify(ext)
    _require(is_irreducible(ext), "trivial centralizer")
    _require(prof.left_d2 and prof.right_d2, "depth two")
    _require(prof.split and prof.separable, "biseparable (split + separable)")
    sys = find_frobenius_system(ext)
    _require(sys is not None, "Frobenius")
    f = ext.field
    tower = build_tower(ext)
    isos = psi_isos(tower)
    chain = centralizer_chain(ext)
    M, M1, M2 = ext.M, tower.M1, tower.M2
    T = tower.T
    A, B_space = chain.A, chain.B_space

    psiB_cols = [c for c in isos["psi_B_cols"]]
    if corrupt:
        bad = [list(r) for r in map(list, psiB_cols)]
        bad[0][0] = f.add(bad[0][0], f.one())
        psiB_cols = [tuple(r) for r in bad]

    e1_2 = tower.in_m2(tower.e1)
    failures = []
    for bi in range(B_space.dim):
        amb = T.section(B_space.basis[bi])
        for t in range(A.dim):
            amat = A.mats[t]
            # <b, a> = b^1 a(b^2), a scalar since R = K
            val = _pair_apply_mu(ext, amat, amb, side="second")
            inner = chain.R_space.member(val)
            assert inner is not None
            # E_M E_{M_1}(psi_B(b) e_1 e_2 phi_A(a))
            phiA_elt = tower.in_m2(isos["phi_A_cols"][t])
            prod = M2.mul(M2.mul(M2.mul(psiB_cols[bi], e1_2), tower.e2), phiA_elt)
            down = mat_vec(f, tower.E_M, mat_vec(f, tower.E_M1, prod))
            want = _scale_elem(f, chain, inner, M)
            if down != want:
                failures.append(("pairing", bi, t))
    # counit comparison: E_{M_1}(e_2 psi_B(b)) = eps_B(b) 1_{M_1}
    bgB, _ = bialgebroid_B(ext)
    for bi in range(B_space.dim):
        lhs = mat_vec(f, tower.E_M1, M2.mul(tower.e2, psiB_cols[bi]))
        eps = bgB.eps_of(unit_vec(f, B_space.dim, bi))
        want = _m1_scale(f, tower, chain, eps)
        if lhs != want:
            failures.append(("counit", bi))
    return failures


def _scale_elem(f, chain, r_coords, M):
    out = zeros_vec(f, M.dim)
    for c, b in zip(r_coords, chain.R_space.basis):
        if c != 0:
            out = vec_add(f, out, vec_scale(f, c, b))
    return out


def _m1_scale(f, tower, chain, r_coords):
    elem = _scale_elem(f, chain, r_coords, tower.ext.M)
    return tower.in_m1(elem)


def qf_instance_check(ext):
    """Instance laws: D2 + biseparable implies QF, and D2 implies depth
    three, decided by the classifier's linear certificates."""
    prof = classify(ext)
    report = {}
    d2 = prof.left_d2 and prof.right_d2
    bisep = (prof.split and prof.separable
             and prof.fg_projective_left and prof.fg_projective_right)
    if d2 and bisep:
        assert prof.left_qf and prof.right_qf, \
            "a D2 biseparable extension must be QF"
        report["qf_from_biseparable"] = True
    else:
        report["qf_from_biseparable"] = None  # hypotheses unmet; nothing claimed
    if d2:
        assert prof.depth3_left and prof.depth3_right, \
            "a D2 extension must be depth three"
        report["depth3_from_d2"] = True
    else:
        report["depth3_from_d2"] = None
    report["flags"] = prof.flag_dict()
    return report


# ---------------------------------------------------------------------------
# the irreducible Hopf case
# ---------------------------------------------------------------------------

@dataclass
class HopfStructure:
    bialgebroid: object
    psi: tuple          # Frobenius functional on A, values in K
    psi_left: tuple     # dual basis elements of A
    psi_right: tuple
    left_norm: tuple    # E as an element of A
    antipode: tuple     # matrix A -> A


def _scalar_of(f, chain, r_coords):
    """The scalar lambda with r = lambda 1 for trivial R."""
    assert len(r_coords) == 1
    # R basis is the echelonized span of 1_M; normalize so that the basis
    # vector corresponds to mu * 1_M
    one_coords = chain.R_space.member(chain.ext.M.unit) \
        if hasattr(chain, "ext") else None
    return r_coords[0]


def hopf_from_irreducible(ext, seed=0):
    """The Hopf algebra structure on A for an irreducible D2 Frobenius
    extension: the Frobenius functional psi(alpha) = sum alpha(x_j) y_j with
    dual bases from the quasibasis, the left norm E, and the antipode from
    the closed formula, all verified (both convolution identities, duality
    of A and B as bialgebras)."""
    chain = centralizer_chain(ext)
    _require(is_irreducible(ext), "trivial centralizer R = K1")
    qb = d2_quasibasis(ext, "left", chain)
    _require(qb is not None and d2_quasibasis(ext, "right", chain) is not None,
             "depth two")
    sys = find_frobenius_system(ext, seed=seed)
    _require(sys is not None, "Frobenius")
    f = ext.field
    M = ext.M
    A = chain.A
    bgA, action = bialgebroid_A(ext)
    T = ext.tensor_square()

    # the unit of R in coordinates, to convert R-coords to scalars
    one_R = chain.R_space.member(M.unit)
    assert one_R is not None and len(one_R) == 1

    def scalar(r_coords):
        return f.div(r_coords[0], one_R[0])

    # psi(alpha) = sum_j alpha(x_j) y_j, a scalar
    psi = []
    for amat in A.mats:
        acc = zeros_vec(f, M.dim)
        for x, y in zip(sys.xs, sys.ys):
            acc = vec_add(f, acc, M.mul(mat_vec(f, amat, x), y))
        c = chain.R_space.member(acc)
        assert c is not None, "psi must land in R = K1"
        psi.append(scalar(c))
    psi = tuple(psi)

    # dual bases {b_i^1 E(b_i^2 -)}, {beta_i} for psi
    EM_mat = sys.E_in_M(ext)
    left_elems, right_elems = [], []
    for b, beta in qb.pairs:
        amb = T.section(b)
        cols = []
        for j in range(M.dim):
            val = zeros_vec(f, M.dim)
            for idx, c in enumerate(amb):
                if c == 0:
                    continue
                a, b2 = divmod(idx, M.dim)
                val = vec_add(f, val, vec_scale(f, c, M.mul(
                    M.basis(a), mat_vec(f, EM_mat, M.mul(M.basis(b2), M.basis(j))))))
            cols.append(val)
        left_elems.append(A.coords_must(transpose(cols)))
        right_elems.append(A.coords_must(beta))

    def psi_of(a_coords):
        return sum((f.mul(c, p) for c, p in zip(a_coords, psi) if c != 0), f.zero())

    # verify the Frobenius identities for (psi, left, right) on the algebra A
    Aalg = A.algebra
    for t in range(A.dim):
        r = Aalg.basis(t)
        acc1 = zeros_vec(f, A.dim)
        acc2 = zeros_vec(f, A.dim)
        for e, fi in zip(left_elems, right_elems):
            acc1 = vec_add(f, acc1, vec_scale(f, psi_of(Aalg.mul(r, e)), fi))
            acc2 = vec_add(f, acc2, vec_scale(f, psi_of(Aalg.mul(fi, r)), e))
        assert acc1 == r and acc2 == r, "psi dual bases fail on A"

    # a_(1) psi(a_(2)) = psi(a) 1_A on every basis element
    for t in range(A.dim):
        acc = zeros_vec(f, A.dim)
        for (x, y, c) in bgA.sweedler(unit_vec(f, A.dim, t)):
            acc = vec_add(f, acc, vec_scale(
                f, f.mul(c, psi[y]), unit_vec(f, A.dim, x)))
        assert acc == vec_scale(f, psi[t], Aalg.unit), \
            "a_(1) psi(a_(2)) = psi(a) 1 fails"

    # E as an element of A, and psi(a E) = eps(a)
    E_elt = A.coords_must(EM_mat)
    for t in range(A.dim):
        lhs = psi_of(Aalg.mul(unit_vec(f, A.dim, t), E_elt))
        eps = scalar(bgA.eps_of(unit_vec(f, A.dim, t)))
        assert lhs == eps, "E must be a left norm: psi(aE) = eps(a)"

    # antipode from the closed formula S(a) = E_(1) psi(a E_(2))
    E_pairs = bgA.sweedler(E_elt)
    S_cols = []
    for t in range(A.dim):
        acc = zeros_vec(f, A.dim)
        for (x, y, c) in E_pairs:
            coeff = f.mul(c, psi_of(Aalg.mul(unit_vec(f, A.dim, t),
                                             unit_vec(f, A.dim, y))))
            acc = vec_add(f, acc, vec_scale(f, coeff, unit_vec(f, A.dim, x)))
        S_cols.append(acc)
    S = transpose(S_cols)

    # convolution identities: id * S = S * id = unit o counit
    for t in range(A.dim):
        conv1 = zeros_vec(f, A.dim)
        conv2 = zeros_vec(f, A.dim)
        for (x, y, c) in bgA.sweedler(unit_vec(f, A.dim, t)):
            conv1 = vec_add(f, conv1, vec_scale(f, c, Aalg.mul(
                unit_vec(f, A.dim, x), mat_vec(f, S, unit_vec(f, A.dim, y)))))
            conv2 = vec_add(f, conv2, vec_scale(f, c, Aalg.mul(
                mat_vec(f, S, unit_vec(f, A.dim, x)), unit_vec(f, A.dim, y))))
        want = vec_scale(f, scalar(bgA.eps_of(unit_vec(f, A.dim, t))), Aalg.unit)
        assert conv1 == want, "id * S = u eps fails"
        assert conv2 == want, "S * id = u eps fails"

    # duality of A and B as bialgebras over K
    bgB, _ = bialgebroid_B(ext)
    _verify_bialgebra_duality(ext, bgA, bgB, scalar)

    return HopfStructure(bialgebroid=bgA, psi=psi,
                         psi_left=tuple(left_elems), psi_right=tuple(right_elems),
                         left_norm=E_elt, antipode=S)


def _verify_bialgebra_duality(ext, bgA, bgB, scalar):
    """<bb', a> = <b, a_(1)><b', a_(2)> and <b, aa'> = <b_(1), a><b_(2), a'>,
    plus nondegeneracy, for the K-valued pairing of an irreducible extension."""
    f = ext.field
    chain = centralizer_chain(ext)
    T = ext.tensor_square()
    A, B_space = chain.A, chain.B_space
    Bc = chain.B

    def pair(b_coords, a_coords):
        amb = T.section(_from_basis(f, B_space.basis, b_coords))
        amat = _combine_mats(f, A.mats, a_coords)
        val = _pair_apply_mu(ext, amat, amb, side="second")
        c = chain.R_space.member(val)
        assert c is not None
        return scalar(c)

    nb, na = B_space.dim, A.dim
    G = [[pair(unit_vec(f, nb, i), unit_vec(f, na, j)) for j in range(na)]
         for i in range(nb)]
    assert len(rref(f, G, na)[1]) == min(na, nb) == na == nb, \
        "the duality pairing must be nondegenerate"
    for i in range(nb):
        for j in range(nb):
            prod = Bc.mul(unit_vec(f, nb, i), unit_vec(f, nb, j))
            for t in range(na):
                lhs = pair(prod, unit_vec(f, na, t))
                rhs = f.zero()
                for (x, y, c) in bgA.sweedler(unit_vec(f, na, t)):
                    rhs = f.add(rhs, f.mul(c, f.mul(G[i][x], G[j][y])))
                assert lhs == rhs, "<bb', a> duality fails"
    Aalg = A.algebra
    for i in range(nb):
        pairs = bgB.sweedler(unit_vec(f, nb, i))
        for t in range(na):
            for u in range(na):
                lhs = pair(unit_vec(f, nb, i), Aalg.mul(unit_vec(f, na, t),
                                                        unit_vec(f, na, u)))
                rhs = f.zero()
                for (x, y, c) in pairs:
                    rhs = f.add(rhs, f.mul(c, f.mul(G[x][t], G[y][u])))
                assert lhs == rhs, "<b, aa'> duality fails"


def _from_basis(f, basis, coords):
    out = zeros_vec(f, len(basis[0]) if basis else 0)
    for c, b in zip(coords, basis):
        if c != 0:
            out = vec_add(f, out, vec_scale(f, c, b))
    return out


def _combine_mats(f, mats, coeffs):
    n = len(mats[0])
    out = [[f.zero()] * n for _ in range(n)]
    for c, m in zip(coeffs, mats):
        if c == 0:
            continue
        for a in range(n):
            for b in range(n):
                if m[a][b] != 0:
                    out[a][b] = f.add(out[a][b], f.mul(c, m[a][b]))
    return tuple(tuple(r) for r in out)


def conjugation_identity(ext, hopf=None, seed=0):
    """E_M(a m e_1) = a_(1) m S-hat(a_(2)) inside M_1, for every a in M_1^N
    and every basis m."""
    if hopf is None:
        hopf = hopf_from_irreducible(ext, seed=seed)
    f = ext.field
    tower = build_tower(ext)
    isos = psi_isos(tower)
    chain = centralizer_chain(ext)
    A = chain.A
    M, M1 = ext.M, tower.M1
    bgA = hopf.bialgebroid
    psiA_cols = isos["psi_A_cols"]
    S = hopf.antipode
    for t in range(A.dim):
        a_hat = psiA_cols[t]
        pairs = bgA.sweedler(unit_vec(f, A.dim, t))
        for j in range(M.dim):
            m = M.basis(j)
            lhs_m = mat_vec(f, tower.E_M,
                            M1.mul(M1.mul(a_hat, tower.in_m1(m)), tower.e1))
            lhs = tower.in_m1(lhs_m)
            rhs = zeros_vec(f, M1.dim)
            for (x, y, c) in pairs:
                sy = mat_vec(f, S, unit_vec(f, A.dim, y))
                term = M1.mul(M1.mul(_apply_cols(f, psiA_cols, unit_vec(f, A.dim, x)),
                                     tower.in_m1(m)),
                              _apply_cols(f, psiA_cols, sy))
                rhs = vec_add(f, rhs, vec_scale(f, c, term))
            assert lhs == rhs, "the conjugation identity fails"
    return True


def _apply_cols(f, cols, coeffs):
    out = zeros_vec(f, len(cols[0]) if cols else 0)
    for c, col in zip(coeffs, cols):
        if c != 0:
            out = vec_add(f, out, vec_scale(f, c, col))
    return out


# ---------------------------------------------------------------------------
# weak bialgebras and weak Hopf algebras (separable centralizer)
# ---------------------------------------------------------------------------

@dataclass
class WeakHopfStructure:
    algebra: Algebra
    delta: tuple          # n -> n^2 matrix over K
    eps: tuple            # 1 x n matrix (row) over K
    pi_L: tuple = None
    pi_R: tuple = None
    antipode: tuple = None
    genuinely_weak: bool = False
    report: dict = dc_field(default_factory=dict)

    def sweedler(self, a_coords):
        f = self.algebra.field
        n = self.algebra.dim
        out = []
        d = mat_vec(f, self.delta, a_coords)
        for idx, c in enumerate(d):
            if c != 0:
                out.append((idx // n, idx % n, c))
        return out

    def eps_of(self, a_coords):
        f = self.algebra.field
        return sum((f.mul(c, e) for c, e in zip(a_coords, self.eps[0]) if c != 0),
                   f.zero())


def weak_bialgebra_lift(bg, index_one):
    """The weak bialgebra over K induced by a bialgebroid over a separable
    base with index-one coordinates (phi, e_i, f_i):

      left  handedness: Delta(a) = sum_i t(e_i) a_(1) (x) s(f_i) a_(2)
      right handedness: Delta(b) = sum_i b_(1) s(e_i) (x) b_(2) t(f_i)

    and eps = phi o eps_bg.  All weak bialgebra axioms are verified."""
    f = bg.field
    A, R = bg.total, bg.base
    n = A.dim
    fc = index_one
    pairs_ef = list(zip(fc.left, fc.right))

    dcols = []
    for t in range(n):
        acc = [f.zero()] * (n * n)
        for (x, y, c) in bg.sweedler(unit_vec(f, n, t)):
            for e, fi in pairs_ef:
                if bg.handedness == "left":
                    u = A.mul(bg.t_of(e), A.basis(x))
                    v = A.mul(bg.s_of(fi), A.basis(y))
                else:
                    u = A.mul(A.basis(x), bg.s_of(e))
                    v = A.mul(A.basis(y), bg.t_of(fi))
                for i, cu in enumerate(u):
                    if cu == 0:
                        continue
                    base = i * n
                    cc = f.mul(c, cu)
                    for j, cv in enumerate(v):
                        if cv != 0:
                            acc[base + j] = f.add(acc[base + j], f.mul(cc, cv))
        dcols.append(tuple(acc))
    delta = transpose(dcols)

    phi_row = fc.phi
    eps_row = []
    for t in range(n):
        r = bg.eps_of(unit_vec(f, n, t))
        eps_row.append(sum((f.mul(p, c) for p, c in zip(phi_row, r) if p != 0 and c != 0),
                           f.zero()))
    w = WeakHopfStructure(algebra=A, delta=delta, eps=(tuple(eps_row),))

    one_one = [f.zero()] * (n * n)
    for i, cu in enumerate(A.unit):
        if cu == 0:
            continue
        for j, cv in enumerate(A.unit):
            if cv != 0:
                one_one[i * n + j] = f.mul(cu, cv)
    w.genuinely_weak = (mat_vec(f, delta, A.unit) != tuple(one_one))

    _verify_weak_bialgebra(w)
    w.pi_L, w.pi_R = _projections(w)
    return w


def _verify_weak_bialgebra(w):
    f = w.algebra.field
    A = w.algebra
    n = A.dim

    # coassociativity
    for t in range(n):
        lhs = {}
        rhs = {}
        for (x, y, c) in w.sweedler(unit_vec(f, n, t)):
            for (u, v, c2) in w.sweedler(unit_vec(f, n, x)):
                key = (u, v, y)
                lhs[key] = f.add(lhs.get(key, f.zero()), f.mul(c, c2))
            for (u, v, c2) in w.sweedler(unit_vec(f, n, y)):
                key = (x, u, v)
                rhs[key] = f.add(rhs.get(key, f.zero()), f.mul(c, c2))
        assert {k: v for k, v in lhs.items() if v != 0} == \
               {k: v for k, v in rhs.items() if v != 0}, "weak coassociativity fails"

    # counit laws
    for t in range(n):
        acc1 = zeros_vec(f, n)
        acc2 = zeros_vec(f, n)
        for (x, y, c) in w.sweedler(unit_vec(f, n, t)):
            acc1 = vec_add(f, acc1, vec_scale(
                f, f.mul(c, w.eps_of(unit_vec(f, n, x))), unit_vec(f, n, y)))
            acc2 = vec_add(f, acc2, vec_scale(
                f, f.mul(c, w.eps_of(unit_vec(f, n, y))), unit_vec(f, n, x)))
        assert acc1 == unit_vec(f, n, t) and acc2 == unit_vec(f, n, t), \
            "weak counit laws fail"

    # multiplicativity (bulk-checked through the integer fast path)
    assert _weak_mult_ok(w), "weak coproduct must be multiplicative"

    # Delta^2(1) identity
    d1 = w.sweedler(A.unit)
    d2 = {}
    for (x, y, c) in d1:
        for (u, v, c2) in w.sweedler(unit_vec(f, n, y)):
            key = (x, u, v)
            d2[key] = f.add(d2.get(key, f.zero()), f.mul(c, c2))
    left = {}
    right = {}
    for (x, y, c) in d1:
        for (u, v, c2) in d1:
            # (Delta(1) (x) 1)(1 (x) Delta(1)) with legs (x, y u, v)
            mid = A.mul(unit_vec(f, n, y), unit_vec(f, n, u))
            for m_idx, cm in enumerate(mid):
                if cm != 0:
                    key = (x, m_idx, v)
                    left[key] = f.add(left.get(key, f.zero()),
                                      f.mul(f.mul(c, c2), cm))
            # (1 (x) Delta(1))(Delta(1) (x) 1): legs (u, v x?, ...)
        # second bracket computed below
    for (u, v, c2) in d1:
        for (x, y, c) in d1:
            mid = A.mul(unit_vec(f, n, v), unit_vec(f, n, x))
            for m_idx, cm in enumerate(mid):
                if cm != 0:
                    key = (u, m_idx, y)
                    right[key] = f.add(right.get(key, f.zero()),
                                       f.mul(f.mul(c2, c), cm))
    clean = lambda d: {k: v for k, v in d.items() if v != 0}
    assert clean(left) == clean(right) == clean(d2), "Delta^2(1) identity fails"

    # weak counit identities
    eps_pair = [[w.eps_of(A.mul(A.basis(i), A.basis(j))) for j in range(n)]
                for i in range(n)]

    def eps_prod(i, x):
        return eps_pair[i][x]

    for b in range(n):
        pairs = w.sweedler(unit_vec(f, n, b))
        for a in range(n):
            for c_idx in range(n):
                abc = w.eps_of(A.mul(A.mul(A.basis(a), A.basis(b)), A.basis(c_idx)))
                s1 = f.zero()
                s2 = f.zero()
                for (x, y, c) in pairs:
                    s1 = f.add(s1, f.mul(c, f.mul(eps_prod(a, x), eps_prod(y, c_idx))))
                    s2 = f.add(s2, f.mul(c, f.mul(eps_prod(a, y), eps_prod(x, c_idx))))
                assert s1 == abc, "eps(a b_(1)) eps(b_(2) c) = eps(abc) fails"
                assert s2 == abc, "eps(a b_(2)) eps(b_(1) c) = eps(abc) fails"


def _weak_mult_ok(w):
    """Delta(ab) = Delta(a)Delta(b) for all basis pairs, via int64 einsum with
    a certified bound, exact fallback otherwise."""
    import numpy as np
    from ._verify import _common_denominator, _to_int_array, _fits, _maxabs

    f = w.algebra.field
    A = w.algebra
    n = A.dim
    d = _common_denominator(f, (w.delta, A.mult))
    D = _to_int_array(f, w.delta, d).reshape(n, n, n)   # D[(k l), a] -> [k, l, a]
    C = _to_int_array(f, A.mult, d)                      # C[a, b, k]
    mx = max(_maxabs(D), _maxabs(C))
    if not _fits(n * n, mx, mx, mx, n):
        return _weak_mult_exact(w)
    # lhs[a,b,k,l] = sum_t C[a,b,t] D[k,l,t], scaled d^2; bring to d^4
    lhs = np.einsum("abt,klt->abkl", C, D) * (d * d)
    # rhs[a,b,k,l] = sum D[p,q,a] D[r,s,b] C[p,r,k] C[q,s,l], scaled d^4
    rhs = np.einsum("pqa,rsb,prk,qsl->abkl", D, D, C, C, optimize=True)
    if f.p is not None:
        lhs %= f.p
        rhs %= f.p
    return bool(np.array_equal(lhs, rhs))


def _weak_mult_exact(w):
    f = w.algebra.field
    A = w.algebra
    n = A.dim
    for a in range(n):
        pa = w.sweedler(unit_vec(f, n, a))
        for b in range(n):
            pb = w.sweedler(unit_vec(f, n, b))
            lhs = mat_vec(f, w.delta, A.mul(A.basis(a), A.basis(b)))
            acc = [f.zero()] * (n * n)
            for (p, q, c1) in pa:
                for (r, s, c2) in pb:
                    c = f.mul(c1, c2)
                    u = A.mul(A.basis(p), A.basis(r))
                    v = A.mul(A.basis(q), A.basis(s))
                    for i, cu in enumerate(u):
                        if cu == 0:
                            continue
                        base = i * n
                        cc = f.mul(c, cu)
                        for j, cv in enumerate(v):
                            if cv != 0:
                                acc[base + j] = f.add(acc[base + j], f.mul(cc, cv))
            if tuple(acc) != lhs:
                return False
    return True


def _projections(w):
    """Pi^L(a) = eps(1_(1) a) 1_(2) and Pi^R(a) = 1_(1) eps(a 1_(2))."""
    f = w.algebra.field
    A = w.algebra
    n = A.dim
    d1 = w.sweedler(A.unit)
    piL_cols, piR_cols = [], []
    for t in range(n):
        a = A.basis(t)
        accL = zeros_vec(f, n)
        accR = zeros_vec(f, n)
        for (x, y, c) in d1:
            accL = vec_add(f, accL, vec_scale(
                f, f.mul(c, w.eps_of(A.mul(A.basis(x), a))), unit_vec(f, n, y)))
            accR = vec_add(f, accR, vec_scale(
                f, f.mul(c, w.eps_of(A.mul(a, A.basis(y)))), unit_vec(f, n, x)))
        piL_cols.append(accL)
        piR_cols.append(accR)
    piL, piR = transpose(piL_cols), transpose(piR_cols)
    # Pi^L is idempotent and unital
    assert mat_mul(f, piL, piL) == piL, "Pi^L must be idempotent"
    assert mat_vec(f, piL, A.unit) == A.unit, "Pi^L(1) = 1 must hold"
    assert mat_mul(f, piR, piR) == piR
    assert mat_vec(f, piR, A.unit) == A.unit
    return piL, piR


def solve_antipode(w):
    """S from the two linear antipode axioms S(a_(1)) a_(2) = Pi^R(a) and
    a_(1) S(a_(2)) = Pi^L(a); the third axiom S(a_(1)) a_(2) S(a_(3)) = S(a)
    is verified afterwards."""
    f = w.algebra.field
    A = w.algebra
    n = A.dim
    rows, rhs = [], []
    for t in range(n):
        pairs = w.sweedler(unit_vec(f, n, t))
        # sum S(e_x) e_y = Pi^R(e_t):  unknowns S[k][m] indexed k*n+m
        for coord in range(n):
            row1 = [f.zero()] * (n * n)
            row2 = [f.zero()] * (n * n)
            for (x, y, c) in pairs:
                Ry = A.rmul_mat(A.basis(y))
                Lx = A.lmul_mat(A.basis(x))
                for k in range(n):
                    if Ry[coord][k] != 0:
                        row1[k * n + x] = f.add(row1[k * n + x],
                                                f.mul(c, Ry[coord][k]))
                    if Lx[coord][k] != 0:
                        row2[k * n + y] = f.add(row2[k * n + y],
                                                f.mul(c, Lx[coord][k]))
            rows.append(tuple(row1))
            rhs.append(mat_vec(f, w.pi_R, unit_vec(f, n, t))[coord])
            rows.append(tuple(row2))
            rhs.append(mat_vec(f, w.pi_L, unit_vec(f, n, t))[coord])
    sol = solve(f, rows, tuple(rhs))
    if sol is None:
        raise AlgebraError("internal alarm: the antipode system is unsolvable")
    S0 = tuple(tuple(sol[k * n + m] for m in range(n)) for k in range(n))

    def conv(F, G):
        # (F * G)(a) = sum F(a_(1)) G(a_(2))
        cols = []
        for t in range(n):
            acc = zeros_vec(f, n)
            for (x, y, c) in w.sweedler(unit_vec(f, n, t)):
                acc = vec_add(f, acc, vec_scale(f, c, A.mul(
                    mat_vec(f, F, unit_vec(f, n, x)),
                    mat_vec(f, G, unit_vec(f, n, y)))))
            cols.append(acc)
        return transpose(cols)

    # the homogeneous solutions X satisfy X * id = id * X = 0, so the cubic
    # axiom for S = S0 + X reduces to the linear equation
    # Pi^R * X - X = S0 - S0 * id * S0 over the kernel
    ker = kernel(f, rows, n * n)
    if not ker.is_zero():
        Id = identity(f, n)
        defect = _msub(f, S0, conv(conv(S0, Id), S0))
        cols = []
        for kv in ker.basis:
            K = tuple(tuple(kv[k * n + m] for m in range(n)) for k in range(n))
            img = _msub(f, conv(w.pi_R, K), K)
            cols.append(vec_of_mat(img))
        coeffs = coefficients_in(f, cols, vec_of_mat(defect))
        if coeffs is None:
            raise AlgebraError("internal alarm: the antipode correction is unsolvable")
        S = [list(r) for r in S0]
        for c, kv in zip(coeffs, ker.basis):
            if c == 0:
                continue
            for k in range(n):
                for m in range(n):
                    S[k][m] = f.add(S[k][m], f.mul(c, kv[k * n + m]))
        S = tuple(tuple(r) for r in S)
    else:
        S = S0
    # third axiom, verified exhaustively
    for t in range(n):
        acc = zeros_vec(f, n)
        for (x, y, c) in w.sweedler(unit_vec(f, n, t)):
            for (u, v, c2) in w.sweedler(unit_vec(f, n, y)):
                term = A.mul(A.mul(mat_vec(f, S, unit_vec(f, n, x)),
                                   unit_vec(f, n, u)),
                             mat_vec(f, S, unit_vec(f, n, v)))
                acc = vec_add(f, acc, vec_scale(f, f.mul(c, c2), term))
        assert acc == mat_vec(f, S, unit_vec(f, n, t)), \
            "S(a_(1)) a_(2) S(a_(3)) = S(a) fails"
    w.antipode = S
    return S


def _msub(f, Amat, Bmat):
    return tuple(tuple(f.sub(x, y) for x, y in zip(r1, r2))
                 for r1, r2 in zip(Amat, Bmat))


def weak_hopf_verify(ext, seed=0):
    """Thm-level pipeline: dual weak Hopf structures on A and B for a D2
    Frobenius extension with separable centralizer over a field.  Builds both
    weak structures (lift formulas cross-checked against the direct displayed
    formulas), verifies duality under <b, a> = phi(b^1 a(b^2)), the left-map
    identity Pi^L(a) = lambda(a(1)), the left-integral law for E, its
    nondegeneracy (surjectivity of b -> E <| b), and the antipodes."""
    chain = centralizer_chain(ext)
    qb = d2_quasibasis(ext, "left", chain)
    _require(qb is not None and d2_quasibasis(ext, "right", chain) is not None,
             "depth two")
    sys = find_frobenius_system(ext, seed=seed)
    _require(sys is not None, "Frobenius")
    try:
        fc = index_one_coordinates(chain.R, seed=seed)
    except AlgebraError as e:
        raise HypothesisFailure("separable centralizer: %s" % e)
    f = ext.field
    M = ext.M
    A, B_space = chain.A, chain.B_space
    bgA, _ = bialgebroid_A(ext)
    bgB, _ = bialgebroid_B(ext)
    wA = weak_bialgebra_lift(bgA, fc)
    wB = weak_bialgebra_lift(bgB, fc)
    report = {"A_weak": True, "B_weak": True,
              "A_genuinely_weak": wA.genuinely_weak,
              "B_genuinely_weak": wB.genuinely_weak}

    # direct displayed formula for Delta on A: sum_{i,j} a(- b^1)b^2 e_j (x)
    # lambda(f_j) beta  (cross-check of the lift)
    T = ext.tensor_square()
    n = A.dim
    direct_cols = []
    for t in range(n):
        amat = A.mats[t]
        acc = [f.zero()] * (n * n)
        for b, beta in qb.pairs:
            amb = T.section(b)
            for e, fi in zip(fc.left, fc.right):
                e_elem = _scale_elem(f, chain, e, M)
                f_elem = _scale_elem(f, chain, fi, M)
                first_cols = []
                for m in range(M.dim):
                    val = zeros_vec(f, M.dim)
                    for idx, c in enumerate(amb):
                        if c == 0:
                            continue
                        a_, b_ = divmod(idx, M.dim)
                        val = vec_add(f, val, vec_scale(f, c, M.mul(M.mul(
                            mat_vec(f, amat, M.mul(M.basis(m), M.basis(a_))),
                            M.basis(b_)), e_elem)))
                    first_cols.append(val)
                first = A.coords_must(transpose(first_cols))
                second = A.coords_must(mat_mul(f, M.lmul_mat(f_elem), beta))
                for i, cu in enumerate(first):
                    if cu == 0:
                        continue
                    for j, cv in enumerate(second):
                        if cv != 0:
                            acc[i * n + j] = f.add(acc[i * n + j], f.mul(cu, cv))
        direct_cols.append(tuple(acc))
    assert transpose(direct_cols) == wA.delta, \
        "the lifted and the displayed weak coproducts on A must agree"
    report["A_direct_formula"] = True

    # eps(a) = phi(a(1))
    for t in range(n):
        r = chain.R_space.member(mat_vec(f, A.mats[t], M.unit))
        val = sum((f.mul(p, c) for p, c in zip(fc.phi, r) if p != 0 and c != 0),
                  f.zero())
        assert val == wA.eps_of(unit_vec(f, n, t))

    # duality pairing <b, a> = phi(b^1 a(b^2))
    nb = B_space.dim

    def pair(b_coords, a_coords):
        amb = T.section(_from_basis(f, B_space.basis, b_coords))
        amat = _combine_mats(f, A.mats, a_coords)
        val = _pair_apply_mu(ext, amat, amb, side="second")
        r = chain.R_space.member(val)
        assert r is not None
        return sum((f.mul(p, c) for p, c in zip(fc.phi, r) if p != 0 and c != 0),
                   f.zero())

    G = [[pair(unit_vec(f, nb, i), unit_vec(f, n, j)) for j in range(n)]
         for i in range(nb)]
    assert len(rref(f, G, n)[1]) == n == nb, "the weak duality Gram must be full"
    report["gram_rank"] = n
    Bc = chain.B
    for i in range(nb):
        for j in range(nb):
            prod = Bc.mul(unit_vec(f, nb, i), unit_vec(f, nb, j))
            for t in range(n):
                lhs = pair(prod, unit_vec(f, n, t))
                rhs = f.zero()
                for (x, y, c) in wA.sweedler(unit_vec(f, n, t)):
                    rhs = f.add(rhs, f.mul(c, f.mul(G[i][x], G[j][y])))
                assert lhs == rhs, "<bc, a> duality fails"
    Aalg = A.algebra
    for i in range(nb):
        pairs = wB.sweedler(unit_vec(f, nb, i))
        for t in range(n):
            for u in range(n):
                lhs = pair(unit_vec(f, nb, i),
                           Aalg.mul(unit_vec(f, n, t), unit_vec(f, n, u)))
                rhs = f.zero()
                for (x, y, c) in pairs:
                    rhs = f.add(rhs, f.mul(c, f.mul(G[x][t], G[y][u])))
                assert lhs == rhs, "<b, a alpha> duality fails"
    for t in range(n):
        assert pair(Bc.unit, unit_vec(f, n, t)) == wA.eps_of(unit_vec(f, n, t))
    for i in range(nb):
        assert pair(unit_vec(f, nb, i), Aalg.unit) == wB.eps_of(unit_vec(f, nb, i))
    report["duality"] = True

    # Pi^L(a) = lambda(a(1))
    for t in range(n):
        lam = M.lmul_mat(mat_vec(f, A.mats[t], M.unit))
        assert mat_vec(f, wA.pi_L, unit_vec(f, n, t)) == A.coords_must(lam), \
            "Pi^L(a) = lambda(a(1)) fails"
    report["left_map"] = True

    # E is a left integral: a E = Pi^L(a) E
    E_elt = A.coords_must(sys.E_in_M(ext))
    for t in range(n):
        lhs = Aalg.mul(unit_vec(f, n, t), E_elt)
        rhs = Aalg.mul(mat_vec(f, wA.pi_L, unit_vec(f, n, t)), E_elt)
        assert lhs == rhs, "a E = Pi^L(a) E fails"
    report["left_integral"] = True

    # nondegeneracy: E <- b = <b, E_(1)> E_(2) equals E <| b = b^1 E(b^2 -),
    # and b -> E <| b is surjective onto A
    EM_mat = sys.E_in_M(ext)
    harpoon_rows = []
    for i in range(nb):
        acc = zeros_vec(f, n)
        for (x, y, c) in wA.sweedler(E_elt):
            acc = vec_add(f, acc, vec_scale(
                f, f.mul(c, pair(unit_vec(f, nb, i), unit_vec(f, n, x))),
                unit_vec(f, n, y)))
        # E <| b directly
        amb = T.section(B_space.basis[i])
        mat = None
        for idx, c in enumerate(amb):
            if c == 0:
                continue
            a_, b_ = divmod(idx, M.dim)
            term = mat_mul(f, M.lmul_mat(vec_scale(f, c, M.basis(a_))),
                           mat_mul(f, EM_mat, M.lmul_mat(M.basis(b_))))
            mat = term if mat is None else tuple(
                tuple(f.add(p, q) for p, q in zip(r1, r2))
                for r1, r2 in zip(mat, term))
        direct = A.coords_must(mat)
        assert acc == direct, "E <- b must equal E <| b"
        harpoon_rows.append(direct)
    assert len(rref(f, harpoon_rows, n)[1]) == n, \
        "b -> E <| b must be surjective onto A (nondegenerate left integral)"
    report["nondegenerate_integral"] = True

    # antipodes from the linear axioms, third axiom verified inside
    SA = solve_antipode(wA)
    SB = solve_antipode(wB)
    report["antipode_A"] = True
    report["antipode_B"] = True
    report["S2_identity_A"] = (mat_mul(f, SA, SA) == identity(f, n))

    # irreducible consistency: the closed-formula Hopf antipode agrees
    if is_irreducible(ext):
        hopf = hopf_from_irreducible(ext, seed=seed)
        assert hopf.antipode == SA, \
            "the weak and the closed-formula antipodes must agree when R = K"
        report["irreducible_consistency"] = True
    return wA, wB, report


def split_separable_criteria(ext, seed=0):
    """The quantum/classical separability biconditionals: the extension is
    split iff A is K-separable iff A has a normalized left integral, and
    separable iff B is K-separable iff B has a normalized right integral;
    in characteristic zero with trivial centralizer, split iff separable."""
    prof = classify(ext)
    chain = centralizer_chain(ext)
    wA, wB, _ = weak_hopf_verify(ext, seed=seed)
    f = ext.field
    A_sep = separability_idempotent(chain.A.algebra) is not None
    B_sep = separability_idempotent(chain.B) is not None
    left_norm = _normalized_left_integral(wA)
    right_norm = _normalized_right_integral(wB)
    report = {
        "split": prof.split, "separable": prof.separable,
        "A_separable": A_sep, "B_separable": B_sep,
        "normalized_left_integral_in_A": left_norm is not None,
        "normalized_right_integral_in_B": right_norm is not None,
    }
    assert prof.split == A_sep == (left_norm is not None), \
        "split <=> A separable <=> normalized left integral"
    assert prof.separable == B_sep == (right_norm is not None), \
        "separable <=> B separable <=> normalized right integral"
    if ext.field.characteristic == 0 and is_irreducible(ext):
        assert prof.split == prof.separable, \
            "char 0 irreducible: split <=> separable"
        report["char0_equivalence"] = True
    return report


def _normalized_left_integral(w):
    """l with a l = Pi^L(a) l for all a, normalized by Pi^L(l) = 1."""
    f = w.algebra.field
    A = w.algebra
    n = A.dim
    rows, rhs = [], []
    for t in range(n):
        La = A.lmul_mat(A.basis(t))
        Lp = A.lmul_mat(mat_vec(f, w.pi_L, unit_vec(f, n, t)))
        for coord in range(n):
            rows.append(tuple(f.sub(La[coord][k], Lp[coord][k]) for k in range(n)))
            rhs.append(f.zero())
    for coord in range(n):
        rows.append(tuple(w.pi_L[coord]))
        rhs.append(A.unit[coord])
    return solve(f, rows, tuple(rhs))


def _normalized_right_integral(w):
    """r with r a = r Pi^R(a) for all a, normalized by Pi^R(r) = 1."""
    f = w.algebra.field
    A = w.algebra
    n = A.dim
    rows, rhs = [], []
    for t in range(n):
        Ra = A.rmul_mat(A.basis(t))
        Rp = A.rmul_mat(mat_vec(f, w.pi_R, unit_vec(f, n, t)))
        for coord in range(n):
            rows.append(tuple(f.sub(Ra[coord][k], Rp[coord][k]) for k in range(n)))
            rhs.append(f.zero())
    for coord in range(n):
        rows.append(tuple(w.pi_R[coord]))
        rhs.append(A.unit[coord])
    return solve(f, rows, tuple(rhs))


def trivial_irreducible_extension(field=None):
    """The shipped trivial instance K | K (small nontrivial irreducible D2
    Frobenius examples are scarce; irreducibility excludes commutative and
    central-simple subrings at desk scale)."""
    from .algebra import AlgebraMap, base_field_algebra
    from .extension import RingExtension
    from .fields import Field
    K = base_field_algebra(field or Field("rational"))
    return RingExtension(K, K, AlgebraMap.identity(K), name="K|K")


def find_irreducible_d2_frobenius(candidates=None, seeds=range(40), field=None):
    """Search utility: the shipped trivial instance, the gallery, and seeded
    random extensions, filtered by the irreducible-D2-Frobenius classifier
    (trivial centralizer, two-sided quasibases, a Frobenius system)."""
    from .gallery import gallery_names, gallery_extension, random_extension
    found = []
    pool = []
    if candidates is None:
        pool.append(trivial_irreducible_extension(field))
        pool.extend(gallery_extension(nm) for nm in gallery_names())
        pool.extend(random_extension(s, field=field) for s in seeds)
    else:
        pool.extend(candidates)
    for ext in pool:
        try:
            if not is_irreducible(ext):
                continue
            if d2_quasibasis(ext, "left") is None or d2_quasibasis(ext, "right") is None:
                continue
            if find_frobenius_system(ext) is None:
                continue
            found.append(ext)
        except Exception:
            continue
    return found
