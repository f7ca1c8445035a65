"""Bimodules over pairs of algebras, their hom-spaces, and the
mutual-summand tests that drive every depth-style decision.

A Bimodule carries explicit action matrices per basis element of each acting
algebra.  hom_bimodule computes a canonical basis of the space of bimodule
maps; similar_summand(X, Y) decides Y (+) * ~ (+)^n X by testing whether
id_Y lies in the span of composites f o g with f in Hom(X, Y), g in
Hom(Y, X), returning the witness coefficients.
"""

from . import _verify
from .algebra import Algebra, AlgebraError, base_field_algebra
from .linalg import (
    Echelon, Subspace, coefficients_in, identity, kernel, mat_mul, mat_vec,
    solve, solve_many, unit_vec, vec_is_zero, vec_of_mat, zeros_vec,
)

# unknown-count threshold above which hom computation switches from the
# direct Sylvester kernel to module-generator reduction
_DIRECT_LIMIT = 600


def base_algebra(field):
    return base_field_algebra(field)


class Bimodule:
    """An L-R'-bimodule: a space of dimension dim with a left action matrix
    per basis element of L and a right action matrix per basis element of R'.
    """

    def __init__(self, left, right, dim, lact, ract, name="X", validate=True):
        self.left = left
        self.right = right
        self.dim = dim
        self.lact = tuple(tuple(tuple(r) for r in m) for m in lact)
        self.ract = tuple(tuple(tuple(r) for r in m) for m in ract)
        self.name = name
        if validate:
            self.validate()

    def validate(self):
        f = self.left.field
        if self.dim == 0:
            return
        I = identity(f, self.dim)
        if _combine(f, self.lact, self.left.unit, self.dim) != I:
            raise AlgebraError("%s: left action is not unital" % self.name)
        if _combine(f, self.ract, self.right.unit, self.dim) != I:
            raise AlgebraError("%s: right action is not unital" % self.name)
        bad = _verify.rep_violation(f, self.left.mult, self.lact, anti=False)
        if bad is not None:
            raise AlgebraError("%s: left action not associative at %r" % (self.name, bad))
        bad = _verify.rep_violation(f, self.right.mult, self.ract, anti=True)
        if bad is not None:
            raise AlgebraError("%s: right action not associative at %r" % (self.name, bad))
        bad = _verify.commute_violation(f, self.lact, self.ract)
        if bad is not None:
            raise AlgebraError("%s: left and right actions do not commute at %r"
                               % (self.name, bad))

    @property
    def field(self):
        return self.left.field

    def lact_of(self, x):
        return _combine(self.field, self.lact, x, self.dim)

    def ract_of(self, x):
        return _combine(self.field, self.ract, x, self.dim)

    def __repr__(self):
        return "Bimodule(%s: %s-%s, dim %d)" % (self.name, self.left.name,
                                                self.right.name, self.dim)

    @classmethod
    def regular(cls, A, name=None):
        return cls(A, A, A.dim, A.lmats, A.rmats, name=name or (A.name + "-reg"),
                   validate=False)

    @classmethod
    def left_module(cls, L, dim, lact, name="X"):
        K = base_field_algebra(L.field)
        return cls(L, K, dim, lact, (identity(L.field, dim),), name=name)

    @classmethod
    def right_module(cls, R, dim, ract, name="X"):
        K = base_field_algebra(R.field)
        return cls(K, R, dim, (identity(R.field, dim),), ract, name=name)


def _combine(field, mats, coeffs, dim):
    out = [[field.zero()] * dim for _ in range(dim)]
    for c, m in zip(coeffs, mats):
        if c == 0:
            continue
        for a in range(dim):
            row = m[a]
            for b in range(dim):
                if row[b] != 0:
                    out[a][b] = field.add(out[a][b], field.mul(c, row[b]))
    return tuple(tuple(r) for r in out)


def _gen_indices(A):
    g = A.generators()
    return g if g else tuple(range(A.dim))


# ---------------------------------------------------------------------------
# hom spaces
# ---------------------------------------------------------------------------

def hom_bimodule(X, Y):
    """Canonical basis of the bimodule maps X -> Y, as dim(Y) x dim(X)
    matrices.  Maps are verified to intertwine both actions."""
    if X.left is not Y.left and X.left.mult != Y.left.mult:
        raise AlgebraError("hom between bimodules over different left rings")
    if X.right is not Y.right and X.right.mult != Y.right.mult:
        raise AlgebraError("hom between bimodules over different right rings")
    if X.dim == 0 or Y.dim == 0:
        return []
    cache = getattr(X, "_hom_cache", None)
    if cache is None:
        cache = X._hom_cache = {}
    hit = cache.get(id(Y))
    if hit is not None and hit[0] is Y:
        return hit[1]
    if X.dim * Y.dim <= _DIRECT_LIMIT:
        basis = _hom_direct(X, Y)
    else:
        basis = _hom_by_generators(X, Y)
    f = X.field
    pairs = [(X.lact[i], Y.lact[i]) for i in _gen_indices(X.left)]
    pairs += [(X.ract[j], Y.ract[j]) for j in _gen_indices(X.right)]
    assert _verify.intertwine_many_ok(f, basis, pairs)
    cache[id(Y)] = (Y, basis)
    return basis


def _hom_direct(X, Y):
    f = X.field
    dx, dy = X.dim, Y.dim
    rows = []
    for mats_X, mats_Y, idxs in ((X.lact, Y.lact, _gen_indices(X.left)),
                                 (X.ract, Y.ract, _gen_indices(X.right))):
        for t in idxs:
            Ax, Ay = mats_X[t], mats_Y[t]
            # F @ Ax - Ay @ F = 0; unknowns F[a][b] indexed a*dx + b
            for a in range(dy):
                for b in range(dx):
                    row = {}
                    for u in range(dx):
                        if Ax[u][b] != 0:
                            row[a * dx + u] = f.add(row.get(a * dx + u, f.zero()), Ax[u][b])
                    for w in range(dy):
                        if Ay[a][w] != 0:
                            row[w * dx + b] = f.sub(row.get(w * dx + b, f.zero()), Ay[a][w])
                    if row:
                        rows.append(row)
    ker = kernel(f, rows, dy * dx) if rows else Subspace.full(f, dy * dx)
    return [tuple(tuple(v[a * dx + b] for b in range(dx)) for a in range(dy))
            for v in ker.basis]


def _orbit_grow(field, ech, v, act_gens):
    """Grow an Echelon by the module orbit of v under the action matrices."""
    if not ech.add(v):
        return
    work = [v]
    while work:
        w = work.pop()
        for m in act_gens:
            u = mat_vec(field, m, w)
            if ech.add(u):
                work.append(u)


def _module_generators(field, act_gens, dim):
    """Greedy small generating set (as coordinate vectors) of a module under
    the algebra generated by the given action matrices.

    Dense pseudo-random vectors are tried first: a generic vector sweeps out
    a larger cyclic submodule than a basis vector, keeping the set small."""
    import random as _random
    rng = _random.Random(10007 + dim)
    gens = []
    ech = Echelon(field, dim)
    candidates = [tuple(field.conv(rng.randint(-2, 2)) for _ in range(dim))
                  for _ in range(3)]
    candidates += [unit_vec(field, dim, c) for c in range(dim)]
    for v in candidates:
        if ech.is_full():
            break
        if ech.contains(v):
            continue
        gens.append(v)
        _orbit_grow(field, ech, v, act_gens)
    assert ech.is_full(), "candidate pool failed to generate the module"
    return gens


def _hom_by_generators(X, Y):
    """Hom via module generators over the bigger acting algebra: a map is
    determined by its values on generators; relations + the other action give
    the linear constraints."""
    f = X.field
    use_left = X.left.dim >= X.right.dim
    if use_left:
        big_mats_X, big_mats_Y = X.lact, Y.lact
        small_mats_X, small_mats_Y = X.ract, Y.ract
        big, small = X.left, X.right
    else:
        big_mats_X, big_mats_Y = X.ract, Y.ract
        small_mats_X, small_mats_Y = X.lact, Y.lact
        big, small = X.right, X.left
    nb = big.dim
    act_unit_gens = [big_mats_X[i] for i in _gen_indices(big)]
    gens = _module_generators(f, act_unit_gens + [identity(f, X.dim)], X.dim)
    k = len(gens)
    dx, dy = X.dim, Y.dim

    # Phi: big^k -> X, (a_j) -> sum_j a_j . g_j ; columns indexed (j, i)
    phi_cols = []
    for g in gens:
        for i in range(nb):
            phi_cols.append(mat_vec(f, big_mats_X[i], g))
    Phi = tuple(tuple(col[r] for col in phi_cols) for r in range(dx))  # dx x k*nb

    # sections for every ambient basis vector of X
    sections = solve_many(f, Phi, [unit_vec(f, dx, c) for c in range(dx)])
    assert all(s is not None for s in sections), "module generators must span X"

    relations = kernel(f, Phi, k * nb)

    # unknowns: F_j = F(g_j) in Y, coordinates (j, y) -> j*dy + y
    rows = []
    for rel in relations.basis:
        # sum_{j,i} rel[j*nb+i] * big_Y[i] @ F_j = 0
        for y in range(dy):
            row = [f.zero()] * (k * dy)
            for j in range(k):
                for i in range(nb):
                    c = rel[j * nb + i]
                    if c == 0:
                        continue
                    Ay = big_mats_Y[i]
                    for w in range(dy):
                        if Ay[y][w] != 0:
                            row[j * dy + w] = f.add(row[j * dy + w], f.mul(c, Ay[y][w]))
            rows.append(tuple(row))

    def expand_rows(target_coeffs, minus_mat, minus_j):
        # F(x) with x expressed by section coeffs, minus minus_mat @ F_{minus_j}
        for y in range(dy):
            row = [f.zero()] * (k * dy)
            for j in range(k):
                for i in range(nb):
                    c = target_coeffs[j * nb + i]
                    if c == 0:
                        continue
                    Ay = big_mats_Y[i]
                    for w in range(dy):
                        if Ay[y][w] != 0:
                            row[j * dy + w] = f.add(row[j * dy + w], f.mul(c, Ay[y][w]))
            if minus_mat is not None:
                for w in range(dy):
                    if minus_mat[y][w] != 0:
                        row[minus_j * dy + w] = f.sub(row[minus_j * dy + w], minus_mat[y][w])
            rows.append(tuple(row))

    # other-side linearity on generators: F(g_j . s) = F(g_j) . s
    for j, g in enumerate(gens):
        for t in _gen_indices(small):
            w = mat_vec(f, small_mats_X[t], g)
            coeffs = solve(f, Phi, w)
            assert coeffs is not None
            expand_rows(coeffs, small_mats_Y[t], j)

    ker = kernel(f, rows, k * dy) if rows else Subspace.full(f, k * dy)

    # reconstruct full matrices: F(e_c) = sum_{j,i} sec_c[j*nb+i] big_Y[i] @ F_j
    basis = []
    for sol in ker.basis:
        Fj = [tuple(sol[j * dy + y] for y in range(dy)) for j in range(k)]
        applied = [[mat_vec(f, big_mats_Y[i], Fj[j]) for i in range(nb)]
                   for j in range(k)]
        cols = []
        for c in range(dx):
            acc = list(zeros_vec(f, dy))
            sec = sections[c]
            for j in range(k):
                arow = applied[j]
                base = j * nb
                for i in range(nb):
                    cc = sec[base + i]
                    if cc == 0:
                        continue
                    v = arow[i]
                    for y in range(dy):
                        if v[y] != 0:
                            acc[y] = f.add(acc[y], f.mul(cc, v[y]))
            cols.append(tuple(acc))
        basis.append(tuple(tuple(col[y] for col in cols) for y in range(dy)))
    # canonicalize the basis
    flat = Subspace.from_vectors(f, dy * dx, [vec_of_mat(F) for F in basis])
    return [tuple(tuple(v[a * dx + b] for b in range(dx)) for a in range(dy))
            for v in flat.basis]


# ---------------------------------------------------------------------------
# mutual summand tests
# ---------------------------------------------------------------------------

def _bulk_products_on_columns(field, H1, H2cols):
    """Products a @ c for a in H1 (dy x dx matrices) and c in H2cols
    (dx x k column blocks), flattened; numpy int64 with a certified bound,
    exact fallback otherwise.  Returns (list of flat tuples, scale)."""
    import numpy as np

    from ._verify import _common_denominator, _to_int_array, _fits, _maxabs

    d = _common_denominator(field, (H1, H2cols))
    A = _to_int_array(field, H1, d)         # (a, dy, dx)
    B = _to_int_array(field, H2cols, d)     # (b, dx, k)
    if not _fits(A.shape[-1], _maxabs(A), _maxabs(B), 4):
        out = []
        for a in H1:
            for c in H2cols:
                out.append(vec_of_mat(mat_mul(field, a, c)))
        return out, 1
    P = np.einsum("iab,jbk->ijak", A, B)
    if field.p is not None:
        P %= field.p
    na, nb = P.shape[0], P.shape[1]
    flatlen = P.shape[2] * P.shape[3]
    P = P.reshape(na * nb, flatlen)
    return [tuple(int(x) for x in row) for row in P], d * d


def similar_summand(X, Y, homs_xy=None, homs_yx=None):
    """Witness for Y (+) * ~ (+)^n X (some n), or None (certified).

    The witness is a list of triples (c, f, g) with sum_i c_i f_i o g_i =
    id_Y, f_i in Hom(X, Y), g_i in Hom(Y, X).  The identity condition is
    tested on a generating set of Y over its two acting algebras: since all
    candidate maps are bimodule maps, equality on generators is equivalent
    to equality everywhere.
    """
    f = X.field
    if Y.dim == 0:
        return []
    H1 = hom_bimodule(X, Y) if homs_xy is None else homs_xy
    H2 = hom_bimodule(Y, X) if homs_yx is None else homs_yx
    if not H1 or not H2:
        return None
    act_gens = [Y.lact[i] for i in _gen_indices(Y.left)] + \
               [Y.ract[j] for j in _gen_indices(Y.right)]
    gens = _module_generators(f, act_gens, Y.dim)
    gcols = tuple(zip(*gens))  # Y.dim x k
    H2cols = [mat_mul(f, g, tuple(gcols)) for g in H2]  # restrict each g to gens
    prods, scale = _bulk_products_on_columns(f, H1, H2cols)
    target = vec_of_mat(tuple(gcols))  # identity restricted to generators
    coeffs = coefficients_in(f, prods, target)
    if coeffs is None:
        return None
    witness = []
    idx = 0
    for a in H1:
        for b in H2:
            if coeffs[idx] != 0:
                witness.append((f.mul(f.conv(scale), f.conv(coeffs[idx])), a, b))
            idx += 1
    return witness


def h_equivalent(X, Y):
    """X and Y mutually isomorphic to summands of finite direct sums of each
    other."""
    return similar_summand(X, Y) is not None and similar_summand(Y, X) is not None


def modules_isomorphic(X, Y):
    """Certified module isomorphism test: equal dimension plus the mutual
    summand relation, per the similar-summand machinery."""
    if X.dim != Y.dim:
        return False
    return h_equivalent(X, Y)
