"""Dense exact linear algebra over a Field.

Vectors are tuples of scalars, matrices are tuples of row tuples.  Row
reduction, kernels and linear solves go through sympy's DomainMatrix in its
sparse representation; everything returned here is canonical (reduced row
echelon form with monic pivots), so equal subspaces compare equal as plain
tuples.
"""

from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.sdm import SDM


class LinAlgError(ValueError):
    pass


# ---------------------------------------------------------------------------
# basic mat/vec helpers
# ---------------------------------------------------------------------------

def zeros_vec(field, n):
    z = field.zero()
    return (z,) * n


def unit_vec(field, n, i):
    z, o = field.zero(), field.one()
    return tuple(o if j == i else z for j in range(n))


def identity(field, n):
    return tuple(unit_vec(field, n, i) for i in range(n))


def zeros_mat(field, rows, cols):
    z = field.zero()
    row = (z,) * cols
    return (row,) * rows


def vec_add(field, u, v):
    if field.p is None:
        return tuple(a + b for a, b in zip(u, v))
    p = field.p
    return tuple((a + b) % p for a, b in zip(u, v))


def vec_sub(field, u, v):
    if field.p is None:
        return tuple(a - b for a, b in zip(u, v))
    p = field.p
    return tuple((a - b) % p for a, b in zip(u, v))


def vec_scale(field, c, v):
    if field.p is None:
        return tuple(c * a for a in v)
    p = field.p
    return tuple((c * a) % p for a in v)


def vec_is_zero(v):
    return all(a == 0 for a in v)


def mat_vec(field, A, x):
    """A @ x for A given as rows."""
    nz = [(j, c) for j, c in enumerate(x) if c != 0]
    z = field.zero()
    if field.p is None:
        out = []
        for r in A:
            acc = z
            for j, c in nz:
                a = r[j]
                if a != 0:
                    acc = acc + a * c
            out.append(acc)
        return tuple(out)
    p = field.p
    out = []
    for r in A:
        acc = 0
        for j, c in nz:
            acc += r[j] * c
        out.append(acc % p)
    return tuple(out)


def mat_mul(field, A, B):
    """Matrix product of row-major matrices (sparse-friendly ikj order)."""
    if not A:
        return ()
    if len(A[0]) != len(B):
        raise LinAlgError("shape mismatch in mat_mul: %dx%d by %dx%d"
                          % (len(A), len(A[0]), len(B), len(B[0]) if B else 0))
    cols = len(B[0]) if B else 0
    z = field.zero()
    p = field.p
    out = []
    for row in A:
        acc = [z] * cols
        for k, a in enumerate(row):
            if a == 0:
                continue
            brow = B[k]
            if p is None:
                for j, b in enumerate(brow):
                    if b != 0:
                        acc[j] = acc[j] + a * b
            else:
                for j, b in enumerate(brow):
                    if b != 0:
                        acc[j] = acc[j] + a * b
        if p is not None:
            acc = [x % p for x in acc]
        out.append(tuple(acc))
    return tuple(out)


def mat_add(field, A, B):
    return tuple(vec_add(field, r, s) for r, s in zip(A, B))


def mat_sub(field, A, B):
    return tuple(vec_sub(field, r, s) for r, s in zip(A, B))


def mat_scale(field, c, A):
    return tuple(vec_scale(field, c, r) for r in A)


def transpose(A):
    return tuple(zip(*A)) if A else ()


def kron(field, A, B):
    """Kronecker product; index convention (a,b) -> a*cols(B)+b."""
    if not A or not B:
        return ()
    out = []
    for ra in A:
        for rb in B:
            row = []
            for a in ra:
                if a == 0:
                    row.extend([field.zero()] * len(rb))
                else:
                    row.extend(field.mul(a, b) for b in rb)
            out.append(tuple(row))
    return tuple(out)


def vec_of_mat(A):
    """Row-major flattening."""
    return tuple(a for row in A for a in row)


def mat_of_vec(v, rows, cols):
    return tuple(tuple(v[i * cols + j] for j in range(cols)) for i in range(rows))


# ---------------------------------------------------------------------------
# sympy bridge: rref / kernel / solve
# ---------------------------------------------------------------------------

def _to_dm(field, rows, ncols):
    """rows: sequence of dense row sequences or of {col: value} dicts."""
    dom = field.domain()
    sdm = {}
    conv = field.to_domain
    for i, row in enumerate(rows):
        if isinstance(row, dict):
            r = {j: conv(a) for j, a in row.items() if a != 0}
        else:
            r = {j: conv(a) for j, a in enumerate(row) if a != 0}
        if r:
            sdm[i] = r
    return DomainMatrix.from_rep(SDM(sdm, (len(rows), ncols), dom))


def _rref_sparse(field, rows, ncols):
    """Reduced row echelon form as ({row: {col: scalar}}, pivots)."""
    if not rows:
        return {}, ()
    dm = _to_dm(field, rows, ncols)
    R, pivots = dm.rref()
    rep = R.rep.to_sdm()
    conv = field.from_domain
    out = {i: {j: conv(a) for j, a in r.items()} for i, r in rep.items()}
    return out, tuple(pivots)


def _ncols_of(rows, ncols):
    if ncols is None:
        if not rows:
            raise LinAlgError("empty matrix needs explicit column count")
        first = rows[0] if not isinstance(rows, dict) else None
        if isinstance(first, dict):
            raise LinAlgError("sparse rows need explicit column count")
        ncols = len(first)
    return ncols


def rref(field, rows, ncols=None):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    ncols = _ncols_of(rows, ncols)
    if not rows:
        return (), ()
    sp, pivots = _rref_sparse(field, rows, ncols)
    z = field.zero()
    dense = []
    for i in range(len(pivots)):
        r = sp.get(i, {})
        dense.append(tuple(r.get(j, z) for j in range(ncols)))
    return tuple(dense), tuple(pivots)


def solve(field, A, b, ncols=None):
    """One solution x of A x = b, or None when b is outside the column space.

    Free variables are set to zero, so the returned solution is canonical.
    Rows of A may be dense sequences or {col: value} dicts.
    """
    m = len(A)
    if len(b) != m:
        raise LinAlgError("solve: matrix has %d rows but rhs has %d entries" % (m, len(b)))
    n = _ncols_of(A, ncols)
    if m == 0:
        return zeros_vec(field, n)
    aug = []
    for i, row in enumerate(A):
        if isinstance(row, dict):
            r = dict(row)
            if b[i] != 0:
                r[n] = b[i]
            aug.append(r)
        else:
            aug.append(tuple(row) + (b[i],))
    sp, pivots = _rref_sparse(field, aug, n + 1)
    if pivots and pivots[-1] == n:
        return None
    x = list(zeros_vec(field, n))
    z = field.zero()
    for r, c in enumerate(pivots):
        x[c] = sp.get(r, {}).get(n, z)
    return tuple(x)


def solve_many(field, A, bs, ncols=None):
    """Solve A x = b for several right-hand sides at once; None where unsolvable."""
    m = len(A)
    n = _ncols_of(A, ncols)
    k = len(bs)
    if m == 0:
        return [zeros_vec(field, n)] * k
    aug = []
    for i, row in enumerate(A):
        if isinstance(row, dict):
            r = dict(row)
        else:
            r = {j: a for j, a in enumerate(row) if a != 0}
        for t, b in enumerate(bs):
            if b[i] != 0:
                r[n + t] = b[i]
        aug.append(r)
    sp, pivots = _rref_sparse(field, aug, n + k)
    z = field.zero()
    out = []
    for t in range(k):
        col = n + t
        # a nonzero rhs entry in a row whose pivot lies beyond the unknowns
        # marks an inconsistent system for this rhs
        ok = all(sp.get(r, {}).get(col, z) == 0
                 for r, c in enumerate(pivots) if c >= n)
        if not ok:
            out.append(None)
            continue
        x = list(zeros_vec(field, n))
        for r, c in enumerate(pivots):
            if c < n:
                x[c] = sp.get(r, {}).get(col, z)
        out.append(tuple(x))
    return out


def kernel(field, A, ncols=None):
    """Canonical Subspace {x : A x = 0}.  Rows may be dense or dicts."""
    ncols = _ncols_of(A, ncols)
    if not A:
        return Subspace.full(field, ncols)
    sp, pivots = _rref_sparse(field, A, ncols)
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    basis = []
    z = field.zero()
    for fcol in free:
        v = list(zeros_vec(field, ncols))
        v[fcol] = field.one()
        for r, c in enumerate(pivots):
            a = sp.get(r, {}).get(fcol, z)
            if a != 0:
                v[c] = field.neg(a)
        basis.append(tuple(v))
    return Subspace.from_vectors(field, ncols, basis)


def row_span_contains(field, rows, target, ncols=None):
    """Whether target lies in the row span, without materializing coefficients."""
    ncols = _ncols_of(rows, ncols)
    sp, pivots = _rref_sparse(field, rows, ncols)
    z = field.zero()
    t = list(target)
    for r, c in enumerate(pivots):
        coeff = t[c]
        if coeff != 0:
            for j, a in sp.get(r, {}).items():
                t[j] = field.sub(t[j], field.mul(coeff, a))
    return all(a == 0 for a in t)


def coefficients_in(field, vectors, v):
    """Coefficients of v as a combination of the given (possibly dependent)
    vectors, or None when v is outside their span."""
    vectors = list(vectors)
    n = len(v)
    if any(len(w) != n for w in vectors):
        raise LinAlgError("coefficients_in: ambient dimension mismatch")
    cols = tuple(zip(*vectors)) if vectors else ((),) * n
    A = tuple(tuple(col) for col in cols)  # n x k
    return solve(field, A, tuple(v)) if vectors else (None if not vec_is_zero(v) else ())


# ---------------------------------------------------------------------------
# Subspace
# ---------------------------------------------------------------------------

class Subspace:
    """A subspace of field^n stored by its reduced-row-echelon basis.

    The representation is canonical: two subspaces are equal iff their
    (basis, pivots) data are identical tuples.
    """

    __slots__ = ("field", "ambient", "basis", "pivots")

    def __init__(self, field, ambient, basis, pivots):
        self.field = field
        self.ambient = ambient
        self.basis = basis
        self.pivots = pivots

    @classmethod
    def from_vectors(cls, field, ambient, vectors):
        vectors = [tuple(v) for v in vectors if not vec_is_zero(v)]
        if not vectors:
            return cls(field, ambient, (), ())
        if any(len(v) != ambient for v in vectors):
            raise LinAlgError("vector does not live in the stated ambient space")
        R, pivots = rref(field, vectors, ambient)
        return cls(field, ambient, R, pivots)

    @classmethod
    def zero(cls, field, ambient):
        return cls(field, ambient, (), ())

    @classmethod
    def full(cls, field, ambient):
        return cls(field, ambient, identity(field, ambient), tuple(range(ambient)))

    @property
    def dim(self):
        return len(self.basis)

    def is_zero(self):
        return not self.basis

    def is_full(self):
        return self.dim == self.ambient

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.field == other.field
                and self.ambient == other.ambient and self.basis == other.basis)

    def __hash__(self):
        return hash((self.ambient, self.basis))

    def __repr__(self):
        return "Subspace(dim %d of %d over %r)" % (self.dim, self.ambient, self.field)

    def reduce(self, v):
        """Canonical representative of v modulo this subspace (pivot coords zeroed)."""
        if len(v) != self.ambient:
            raise LinAlgError("ambient dimension mismatch")
        f = self.field
        v = list(v)
        for row, c in zip(self.basis, self.pivots):
            coeff = v[c]
            if coeff != 0:
                for j in range(self.ambient):
                    if row[j] != 0:
                        v[j] = f.sub(v[j], f.mul(coeff, row[j]))
        return tuple(v)

    def member(self, v):
        """Coefficients of v in the echelon basis, or None if v is outside."""
        if len(v) != self.ambient:
            raise LinAlgError("ambient dimension mismatch")
        f = self.field
        v = list(v)
        coeffs = []
        for row, c in zip(self.basis, self.pivots):
            coeff = v[c]
            coeffs.append(coeff)
            if coeff != 0:
                for j in range(self.ambient):
                    if row[j] != 0:
                        v[j] = f.sub(v[j], f.mul(coeff, row[j]))
        if not vec_is_zero(v):
            return None
        return tuple(coeffs)

    def contains(self, v):
        return self.member(v) is not None

    def contains_space(self, other):
        return all(self.contains(v) for v in other.basis)

    def sum_with(self, other):
        if self.ambient != other.ambient:
            raise LinAlgError("ambient dimension mismatch")
        return Subspace.from_vectors(self.field, self.ambient, self.basis + other.basis)

    def intersect(self, other):
        """Zassenhaus-free intersection: kernel of stacked membership conditions."""
        if self.ambient != other.ambient:
            raise LinAlgError("ambient dimension mismatch")
        # x in both spans: x = B1^T a = B2^T b; solve [B1^T | -B2^T] null space.
        if self.is_zero() or other.is_zero():
            return Subspace.zero(self.field, self.ambient)
        f = self.field
        n = self.ambient
        rows = []
        for i in range(n):
            rows.append(tuple(b[i] for b in self.basis)
                        + tuple(f.neg(b[i]) for b in other.basis))
        ker = kernel(f, rows, self.dim + other.dim)
        vecs = []
        for k in ker.basis:
            a = k[:self.dim]
            vecs.append(tuple(
                sum((f.mul(a[t], self.basis[t][j]) for t in range(self.dim)
                     if a[t] != 0), f.zero()) for j in range(n)))
        return Subspace.from_vectors(f, n, vecs)


class Echelon:
    """Incremental reduced echelon structure kept fully reduced with monic
    pivots; its sorted rows coincide with the RREF of the inserted span."""

    __slots__ = ("field", "ambient", "rows")

    def __init__(self, field, ambient):
        self.field = field
        self.ambient = ambient
        self.rows = {}  # pivot column -> dense list row

    @property
    def rank(self):
        return len(self.rows)

    def reduce(self, v):
        f = self.field
        v = list(v)
        for p, row in self.rows.items():
            c = v[p]
            if c != 0:
                for j in range(p, self.ambient):
                    a = row[j]
                    if a != 0:
                        v[j] = f.sub(v[j], f.mul(c, a))
        return v

    def contains(self, v):
        return all(a == 0 for a in self.reduce(v))

    def add(self, v):
        """Insert v; returns True when it enlarged the span."""
        f = self.field
        w = self.reduce(v)
        piv = next((j for j, a in enumerate(w) if a != 0), None)
        if piv is None:
            return False
        inv = f.inv(w[piv])
        w = [f.mul(inv, a) for a in w]
        for p, row in self.rows.items():
            c = row[piv]
            if c != 0:
                for j in range(piv, self.ambient):
                    if w[j] != 0:
                        row[j] = f.sub(row[j], f.mul(c, w[j]))
        self.rows[piv] = w
        return True

    def is_full(self):
        return len(self.rows) == self.ambient

    def basis(self):
        return tuple(tuple(self.rows[p]) for p in sorted(self.rows))

    def to_subspace(self):
        return Subspace(self.field, self.ambient, self.basis(),
                        tuple(sorted(self.rows)))


def span_of_products(field, F, G):
    """Subspace spanned by all pairwise composites F_i @ G_j, flattened row-major.

    F and G are lists of matrices with composable shapes; the result lives in
    the space of (rows(F) x cols(G))-matrices.
    """
    F = [tuple(tuple(r) for r in A) for A in F]
    G = [tuple(tuple(r) for r in B) for B in G]
    if not F or not G:
        raise LinAlgError("span_of_products needs nonempty families")
    out_rows, inner = len(F[0]), len(F[0][0]) if F[0] else 0
    out_cols = len(G[0][0]) if G[0] else 0
    for A in F:
        if len(A) != out_rows or (A and len(A[0]) != inner):
            raise LinAlgError("inconsistent shapes in F")
    for B in G:
        if len(B) != inner or (B and len(B[0]) != out_cols):
            raise LinAlgError("inconsistent shapes in G (or F.G not composable)")
    vecs = [vec_of_mat(mat_mul(field, A, B)) for A in F for B in G]
    return Subspace.from_vectors(field, out_rows * out_cols, vecs)
