"""Exact rational and integer linear algebra.

All computations run over Q via `fractions.Fraction`; no floating point
anywhere.  Matrices are sparse (only nonzero entries stored) and every
routine is deterministic: pivots are chosen by fixed tie-breaking rules
and results iterate in sorted order, so identical inputs give bit-exact
identical outputs across runs.

Vectors are plain dicts {index: Fraction} holding only nonzero entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

Scalar = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def vec_add(u, v):
    out = dict(u)
    for k, x in v.items():
        s = out.get(k, ZERO) + x
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def vec_scale(c, u):
    if not c:
        return {}
    return {k: c * x for k, x in u.items()}


def vec_axpy(out, c, u):
    """out += c*u in place."""
    if not c:
        return out
    for k, x in u.items():
        s = out.get(k, ZERO) + c * x
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


class RatMatrix:
    """Sparse rows x cols matrix over Q.

    Invariants: stored entries are nonzero and indices lie within
    bounds; iteration over entries is sorted by (row, col).
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries=None):
        assert rows >= 0 and cols >= 0
        self.rows = rows
        self.cols = cols
        ent = {}
        if entries:
            items = entries.items() if isinstance(entries, dict) else entries
            for (r, c), x in items:
                assert 0 <= r < rows and 0 <= c < cols, (r, c, rows, cols)
                x = Fraction(x)
                if x:
                    ent[(r, c)] = x
        self.entries = dict(sorted(ent.items()))

    def __eq__(self, other):
        return (isinstance(other, RatMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __repr__(self):
        return "RatMatrix(%d, %d, %r)" % (self.rows, self.cols, self.entries)

    @classmethod
    def from_rows(cls, rows_list, cols):
        ent = {}
        for r, row in enumerate(rows_list):
            for c, x in row.items():
                ent[(r, c)] = x
        return cls(len(rows_list), cols, ent)

    @classmethod
    def from_columns(cls, cols_list, rows):
        ent = {}
        for c, col in enumerate(cols_list):
            for r, x in col.items():
                ent[(r, c)] = x
        return cls(rows, len(cols_list), ent)

    def row_dicts(self):
        rows = [dict() for _ in range(self.rows)]
        for (r, c), x in self.entries.items():
            rows[r][c] = x
        return rows

    def column(self, c):
        return {r: x for (r, cc), x in self.entries.items() if cc == c}

    def transpose(self):
        return RatMatrix(self.cols, self.rows,
                         {(c, r): x for (r, c), x in self.entries.items()})

    def apply(self, vec):
        """Matrix times sparse column vector."""
        out = {}
        rows = self.row_dicts()
        for r, row in enumerate(rows):
            s = ZERO
            for c, x in row.items():
                v = vec.get(c)
                if v is not None:
                    s += x * v
            if s:
                out[r] = s
        return out

    def mul(self, other):
        assert self.cols == other.rows
        orows = other.row_dicts()
        ent = {}
        srows = self.row_dicts()
        for r, row in enumerate(srows):
            acc = {}
            for k, x in sorted(row.items()):
                vec_axpy(acc, x, orows[k])
            for c, x in acc.items():
                ent[(r, c)] = x
        return RatMatrix(self.rows, other.cols, ent)

    def add(self, other):
        assert (self.rows, self.cols) == (other.rows, other.cols)
        ent = dict(self.entries)
        for k, x in other.entries.items():
            s = ent.get(k, ZERO) + x
            if s:
                ent[k] = s
            else:
                ent.pop(k, None)
        return RatMatrix(self.rows, self.cols, ent)

    def scale(self, c):
        return RatMatrix(self.rows, self.cols,
                         {k: c * x for k, x in self.entries.items()})

    def is_zero(self):
        return not self.entries


class Echelon:
    """Incremental row echelon structure over Q.

    Maintains reduced rows keyed by pivot column.  `reduce` returns the
    residual of a vector modulo the current span; `add` inserts the
    residual if nonzero.  Pivot of a vector is its smallest index.
    """

    def __init__(self):
        self.pivots = {}  # pivot col -> normalized row (dict)

    @property
    def dim(self):
        return len(self.pivots)

    def reduce(self, vec):
        res = dict(vec)
        while res:
            p = min(res)
            row = self.pivots.get(p)
            if row is None:
                return res
            vec_axpy(res, -res[p], row)
        return res

    def add(self, vec):
        """Insert vec; return True if it enlarged the span."""
        res = self.reduce(vec)
        if not res:
            return False
        p = min(res)
        inv = ONE / res[p]
        self.pivots[p] = {k: inv * x for k, x in res.items()}
        return True

    def contains(self, vec):
        return not self.reduce(vec)


class TrackedEchelon:
    """Echelon structure that remembers how each reduced row was formed,
    so membership comes with explicit coordinates over tagged inserts.

    Vectors inserted without a tag enlarge the span anonymously (used
    for quotients: reduce modulo boundaries, coordinates over chosen
    representatives only).
    """

    def __init__(self):
        self.pivots = {}  # pivot col -> (row, combo)  combo: {tag: coeff}

    @property
    def dim(self):
        return len(self.pivots)

    def reduce(self, vec):
        res = dict(vec)
        combo = {}
        while res:
            p = min(res)
            hit = self.pivots.get(p)
            if hit is None:
                return res, combo
            row, rcombo = hit
            c = res[p]
            vec_axpy(res, -c, row)
            vec_axpy(combo, -c, rcombo)
        return res, combo

    def add(self, vec, tag=None):
        res, combo = self.reduce(vec)
        if not res:
            return False
        if tag is not None:
            combo = vec_add(combo, {tag: ONE})
        p = min(res)
        inv = ONE / res[p]
        row = {k: inv * x for k, x in res.items()}
        self.pivots[p] = (row, {t: inv * c for t, c in combo.items()})
        return True

    def coordinates(self, vec):
        """Express vec over the tagged inserts; None if not in span."""
        res, combo = self.reduce(vec)
        if res:
            return None
        return {t: -c for t, c in combo.items() if c}


def kernel_basis(m: RatMatrix):
    """Basis of {x : m x = 0}, deterministic.

    Gaussian elimination with pivot columns processed in increasing
    order (reduced echelon); among candidate pivot rows the sparsest
    wins, ties by lowest row index.  Kernel vectors are emitted in
    increasing order of their free column.
    """
    rows = [r for r in m.row_dicts() if r]
    pivots = {}  # col -> reduced row
    for col in range(m.cols):
        cand = [(len(r), i) for i, r in enumerate(rows) if col in r]
        if not cand:
            continue
        _, idx = min(cand)
        row = rows.pop(idx)
        inv = ONE / row[col]
        row = {k: inv * x for k, x in row.items()}
        for r in rows:
            if col in r:
                vec_axpy(r, -r[col], row)
        for p, prow in pivots.items():
            if col in prow:
                vec_axpy(prow, -prow[col], row)
        pivots[col] = row
        rows = [r for r in rows if r]
    basis = []
    pivot_cols = set(pivots)
    for free in range(m.cols):
        if free in pivot_cols:
            continue
        v = {free: ONE}
        for p, prow in pivots.items():
            c = prow.get(free)
            if c:
                v[p] = -c
        lead = ONE / v[min(v)]  # lowest-index entry normalized to +1
        basis.append({k: lead * x for k, x in sorted(v.items())})
    return basis


def rank(m: RatMatrix):
    e = Echelon()
    for row in m.row_dicts():
        if row:
            e.add(row)
    return e.dim


def cokernel_dims(m: RatMatrix):
    """dim coker = rows - rank."""
    return m.rows - rank(m)


def solve(m: RatMatrix, b):
    """One solution x of m x = b (sparse dicts), or None.

    Free variables are set to zero; deterministic.
    """
    te = TrackedEchelon()
    for c in range(m.cols):
        te.add(m.column(c), tag=c)
    coords = te.coordinates(b)
    return coords


def column_space_dim(columns):
    e = Echelon()
    for col in columns:
        if col:
            e.add(col)
    return e.dim


@dataclass(frozen=True)
class SmithForm:
    """U * A * V = diag(diagonal), U and V unimodular (|det| = 1).

    `diagonal` is the full min(rows, cols) diagonal, nonnegative, with
    the divisibility chain d1 | d2 | ... (zeros trail).
    """

    diagonal: tuple
    left: tuple      # rows x rows, tuple of row-tuples of ints
    right: tuple     # cols x cols

    def nonzero(self):
        return [d for d in self.diagonal if d]

    def free_rank_of_cokernel(self, ncols):
        """Rank of Z^ncols / row lattice for the matrix this form came
        from (cols - number of nonzero invariants)."""
        return ncols - len(self.nonzero())

    def torsion(self):
        return [d for d in self.diagonal if d > 1]


def _mat_identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(matrix):
    """Smith normal form of an integer matrix (list of rows).

    Elementary gcd-step elimination; no modular tricks.  Returns a
    SmithForm whose invariants are asserted before returning.
    """
    A = [[int(x) for x in row] for row in matrix]
    m = len(A)
    n = len(A[0]) if m else 0
    U = _mat_identity(m)
    V = _mat_identity(n)

    def row_op(i, j, q):  # row_i -= q * row_j
        A[i] = [a - q * b for a, b in zip(A[i], A[j])]
        U[i] = [a - q * b for a, b in zip(U[i], U[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for r in range(m):
            A[r][i] -= q * A[r][j]
        for r in range(n):
            V[r][i] -= q * V[r][j]

    def row_swap(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def col_swap(i, j):
        for r in range(m):
            A[r][i], A[r][j] = A[r][j], A[r][i]
        for r in range(n):
            V[r][i], V[r][j] = V[r][j], V[r][i]

    def negate_row(i):
        A[i] = [-a for a in A[i]]
        U[i] = [-a for a in U[i]]

    size = min(m, n)
    for s in range(size):
        while True:
            # find entry of least |value| in the block from (s, s)
            best = None
            for i in range(s, m):
                for j in range(s, n):
                    a = abs(A[i][j])
                    if a and (best is None or a < best[0]):
                        best = (a, i, j)
            if best is None:
                break
            _, bi, bj = best
            if bi != s:
                row_swap(s, bi)
            if bj != s:
                col_swap(s, bj)
            if A[s][s] < 0:
                negate_row(s)
            piv = A[s][s]
            dirty = False
            for i in range(s + 1, m):
                if A[i][s]:
                    row_op(i, s, A[i][s] // piv)
                    if A[i][s]:
                        dirty = True
            for j in range(s + 1, n):
                if A[s][j]:
                    col_op(j, s, A[s][j] // piv)
                    if A[s][j]:
                        dirty = True
            if dirty:
                continue
            # pivot must divide the remaining block
            offender = None
            for i in range(s + 1, m):
                for j in range(s + 1, n):
                    if A[i][j] % piv:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_op(s, offender, -1)  # adds offending row, restart step

    # enforce the divisibility chain on the diagonal
    for i in range(size):
        for j in range(i + 1, size):
            a, b = A[i][i], A[j][j]
            if a and b % a == 0:
                continue
            if a == 0 and b != 0:
                row_swap(i, j)
                col_swap(i, j)
                continue
            if b == 0:
                continue
            # mix the two diagonal positions and re-clean the 2x2 block
            col_op(i, j, -1)        # col_i += col_j -> A[j][i] = b
            g = gcd(a, b)
            while A[j][i]:
                q = A[i][i] // A[j][i]
                row_op(i, j, q)
                row_swap(i, j)
            # now A[i][i] = +-g, clear fill-in at (i, j)
            if A[i][i] < 0:
                negate_row(i)
            col_op(j, i, A[i][j] // A[i][i])
            assert A[i][j] == 0 and A[j][i] == 0
            assert A[i][i] == g and abs(A[j][j]) == abs(a * b) // g
            if A[j][j] < 0:
                negate_row(j)

    diag = tuple(abs(A[i][i]) for i in range(size))
    for i in range(size):
        if A[i][i] < 0:
            negate_row(i)
    form = SmithForm(diag, tuple(map(tuple, U)), tuple(map(tuple, V)))
    _assert_smith(matrix, form, m, n)
    return form


def _int_matmul(X, Y):
    if not X or not Y:
        return [[0] * (len(Y[0]) if Y else 0) for _ in X]
    p, q, r = len(X), len(Y), len(Y[0])
    out = [[0] * r for _ in range(p)]
    for i in range(p):
        Xi = X[i]
        for k in range(q):
            x = Xi[k]
            if x:
                Yk = Y[k]
                row = out[i]
                for j in range(r):
                    row[j] += x * Yk[j]
    return out


def _int_det(M):
    """Determinant by fraction-free elimination (small matrices)."""
    n = len(M)
    if n == 0:
        return 1
    A = [[Fraction(x) for x in row] for row in M]
    det = ONE
    for c in range(n):
        piv = None
        for r in range(c, n):
            if A[r][c]:
                piv = r
                break
        if piv is None:
            return 0
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det *= A[c][c]
        inv = ONE / A[c][c]
        for r in range(c + 1, n):
            if A[r][c]:
                f = A[r][c] * inv
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    assert det.denominator == 1
    return int(det)


def _assert_smith(original, form, m, n):
    A = [[int(x) for x in row] for row in original]
    prod = _int_matmul(_int_matmul(list(map(list, form.left)), A),
                       list(map(list, form.right)))
    for i in range(m):
        for j in range(n):
            want = form.diagonal[i] if i == j and i < len(form.diagonal) else 0
            assert prod[i][j] == want, "SNF reconstruction failed"
    nz = form.nonzero()
    for a, b in zip(nz, nz[1:]):
        assert b % a == 0, "divisibility chain broken"
    assert abs(_int_det(list(map(list, form.left)))) == 1
    assert abs(_int_det(list(map(list, form.right)))) == 1


def integer_row_space_contains(rows, ncols, target):
    """Is `target` (length-ncols int vector) in the Z-span of `rows`?"""
    rows = [list(r) for r in rows]
    if not rows:
        return all(t == 0 for t in target)
    form = smith_normal_form(rows)
    # rowspace(A) = rowspace(U A) = rowspace(D V^{-1}); t in rowspace
    # iff (t V) is componentwise divisible by the diagonal of D.
    V = list(map(list, form.right))
    tv = [sum(target[i] * V[i][j] for i in range(ncols)) for j in range(ncols)]
    for j in range(ncols):
        d = form.diagonal[j] if j < len(form.diagonal) else 0
        if d == 0:
            if tv[j] != 0:
                return False
        elif tv[j] % d:
            return False
    return True
