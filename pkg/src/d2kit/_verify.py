"""Exhaustive structural checks (all basis tuples), run as integer matrix
identities.

Rational data is cleared to integers by a common denominator and compared in
int64 numpy arrays; a proven magnitude bound guarantees no overflow, so the
comparison is exact.  When the bound cannot be certified we fall back to the
same sweep in exact scalar arithmetic.
"""

from math import lcm

import numpy as np

_INT64_LIMIT = 2 ** 62


def _common_denominator(field, tensors):
    if field.p is not None:
        return 1
    d = 1
    for t in tensors:
        stack = [t]
        while stack:
            x = stack.pop()
            if isinstance(x, tuple) or isinstance(x, list):
                stack.extend(x)
            else:
                d = lcm(d, int(x.denominator))
    return d


def _to_int_array(field, tensor, d):
    if field.p is not None:
        return np.array(tensor, dtype=np.int64)

    def conv(x):
        if isinstance(x, (tuple, list)):
            return [conv(y) for y in x]
        v = x * d
        assert v.denominator == 1
        return int(v)

    return np.array(conv(tensor), dtype=np.int64)


def _fits(*bounds):
    b = 1
    for x in bounds:
        b *= max(int(x), 1)
    return b < _INT64_LIMIT


def _maxabs(arr):
    return int(np.abs(arr).max()) if arr.size else 0


def first_mismatch(P, E):
    """Index tuple of the first differing entry of two equal-shaped arrays."""
    w = np.argwhere(P != E)
    return tuple(int(x) for x in w[0])


def rep_violation(field, mult, mats, anti=False):
    """First (i, j, coord-pair) where mats fails to represent the algebra with
    structure tensor mult, i.e. act(e_i e_j) != act(e_i)act(e_j) (or the
    reversed composite when anti=True, as for right actions).  None if OK.
    """
    n = len(mult)
    m = len(mats[0]) if mats else 0
    d = _common_denominator(field, (mult, mats))
    A = _to_int_array(field, mats, d)        # (n, m, m), scaled by d
    C = _to_int_array(field, mult, d)        # (n, n, n), scaled by d
    amax, cmax = _maxabs(A), _maxabs(C)
    p = field.p
    if not _fits(max(m, n), max(amax, cmax), max(amax, cmax), 2):
        return _rep_violation_exact(field, mult, mats, anti)
    for i in range(n):
        if anti:
            P = np.matmul(A, A[i])           # P[j] = act_j @ act_i
        else:
            P = np.matmul(A[i], A)           # P[j] = act_i @ act_j
        E = np.einsum("jt,tab->jab", C[i], A)
        if p is not None:
            P %= p
            E %= p
        if not np.array_equal(P, E):
            j, a, b = first_mismatch(P, E)
            return (i, j, (a, b))
    return None


def _rep_violation_exact(field, mult, mats, anti):
    from .linalg import mat_mul

    n = len(mult)
    for i in range(n):
        for j in range(n):
            comp = mat_mul(field, mats[j], mats[i]) if anti else mat_mul(field, mats[i], mats[j])
            m = len(comp)
            exp = [[field.zero()] * m for _ in range(m)]
            for t in range(n):
                c = mult[i][j][t]
                if c != 0:
                    for a in range(m):
                        row = mats[t][a]
                        for b in range(m):
                            if row[b] != 0:
                                exp[a][b] = field.add(exp[a][b], field.mul(c, row[b]))
            for a in range(m):
                for b in range(m):
                    if comp[a][b] != exp[a][b]:
                        return (i, j, (a, b))
    return None


def intertwine_many_ok(field, mats, pairs):
    """Whether F @ Ax == Ay @ F for every F in mats and (Ax, Ay) in pairs."""
    if not mats or not pairs:
        return True
    d = _common_denominator(field, (mats, [p[0] for p in pairs], [p[1] for p in pairs]))
    F = _to_int_array(field, mats, d)
    p = field.p
    ok_bound = True
    Fmax = _maxabs(F)
    converted = []
    for Ax, Ay in pairs:
        X = _to_int_array(field, Ax, d)
        Y = _to_int_array(field, Ay, d)
        converted.append((X, Y))
        if not _fits(max(F.shape[-1], F.shape[-2]), Fmax, max(_maxabs(X), _maxabs(Y)), 2):
            ok_bound = False
    if not ok_bound:
        from .linalg import mat_mul
        return all(mat_mul(field, m, Ax) == mat_mul(field, Ay, m)
                   for m in mats for Ax, Ay in pairs)
    for X, Y in converted:
        P = np.matmul(F, X)
        E = np.matmul(Y, F)
        if p is not None:
            P %= p
            E %= p
        if not np.array_equal(P, E):
            return False
    return True


def intertwine_ok(field, mats, Ax, Ay):
    return intertwine_many_ok(field, mats, [(Ax, Ay)])


def commute_violation(field, lmats, rmats):
    """First (i, j) with lmats[i] @ rmats[j] != rmats[j] @ lmats[i], else None."""
    d = _common_denominator(field, (lmats, rmats))
    L = _to_int_array(field, lmats, d)
    R = _to_int_array(field, rmats, d)
    m = L.shape[-1] if L.size else 0
    p = field.p
    if not _fits(m, _maxabs(L), _maxabs(R), 2):
        from .linalg import mat_mul
        for i, li in enumerate(lmats):
            for j, rj in enumerate(rmats):
                if mat_mul(field, li, rj) != mat_mul(field, rj, li):
                    return (i, j)
        return None
    for i in range(L.shape[0]):
        P = np.matmul(L[i], R)
        E = np.matmul(R, L[i])
        if p is not None:
            P %= p
            E %= p
        if not np.array_equal(P, E):
            return (i, first_mismatch(P, E)[0])
    return None


def map_mult_violation(field, fmat, mult_dom, mult_cod):
    """First (i, j) where f(e_i e_j) != f(e_i) f(e_j), else None."""
    d = _common_denominator(field, (fmat, mult_dom, mult_cod))
    F = _to_int_array(field, fmat, d)            # (m, n) scaled d
    CD = _to_int_array(field, mult_dom, d)       # (n, n, n)
    CC = _to_int_array(field, mult_cod, d)       # (m, m, m)
    n = CD.shape[0]
    m = F.shape[0]
    p = field.p
    mx = max(_maxabs(F), _maxabs(CD), _maxabs(CC), int(d))
    # T1 = f(e_i e_j) scaled d^2 (then rescaled by d); T2 scaled d^3.
    if not _fits(max(n, m) ** 2, mx, mx, mx):
        return _map_mult_exact(field, fmat, mult_dom, mult_cod)
    T1 = np.einsum("kt,ijt->ijk", F, CD) * d if p is None else np.einsum("kt,ijt->ijk", F, CD) % p
    T2 = np.einsum("ai,abk->ibk", F, CC)
    T2 = np.einsum("bj,ibk->ijk", F, T2)
    if p is not None:
        T2 %= p
    if not np.array_equal(T1, T2):
        i, j, _ = first_mismatch(T1, T2)
        return (i, j)
    return None


def _map_mult_exact(field, fmat, mult_dom, mult_cod):
    from .linalg import mat_vec

    n = len(mult_dom)
    cols = list(zip(*fmat))

    def cod_mul(x, y):
        m = len(mult_cod)
        out = [field.zero()] * m
        for a in range(m):
            if x[a] == 0:
                continue
            for b in range(m):
                if y[b] == 0:
                    continue
                c = field.mul(x[a], y[b])
                row = mult_cod[a][b]
                for k in range(m):
                    if row[k] != 0:
                        out[k] = field.add(out[k], field.mul(c, row[k]))
        return tuple(out)

    for i in range(n):
        for j in range(n):
            if mat_vec(field, fmat, mult_dom[i][j]) != cod_mul(cols[i], cols[j]):
                return (i, j)
    return None
