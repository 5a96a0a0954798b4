"""Smith normal form of integer matrices with unimodular transforms.

Matrices are plain lists of rows of Python ints.
"""

from __future__ import annotations

from dataclasses import dataclass

IntMatrix = list[list[int]]


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(r: int, c: int) -> IntMatrix:
    return [[0] * c for _ in range(r)]


def matmul(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    out = []
    for row in A:
        out.append([sum(row[k] * B[k][j] for k in range(inner) if row[k])
                    for j in range(cols)])
    return out


def matvec(A: IntMatrix, x: list[int]) -> list[int]:
    return [sum(a * b for a, b in zip(row, x)) for row in A]


def transpose(A: IntMatrix, cols: int | None = None) -> IntMatrix:
    if not A:
        return [[] for _ in range(cols or 0)]
    return [list(col) for col in zip(*A)]


def det(A: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [row[:] for row in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


@dataclass
class SnfDecomposition:
    """A = U S V with U, V unimodular and S diagonal, s_1 | s_2 | ...

    ``U_inv`` and ``V_inv`` are kept because solving needs them:
    U_inv A V_inv = S.
    """

    U: IntMatrix | None
    S: IntMatrix
    V: IntMatrix | None
    U_inv: IntMatrix
    V_inv: IntMatrix
    ncols: int

    @property
    def diagonal(self) -> list[int]:
        return [self.S[i][i] for i in range(min(len(self.S), self.ncols))]

    @property
    def rank(self) -> int:
        return sum(1 for s in self.diagonal if s)


def smith_normal_form(A: IntMatrix, ncols: int | None = None, *, want_U: bool = True,
                      want_V: bool = True, v_inv_rows: int | None = None) -> SnfDecomposition:
    """Smith normal form by smallest-pivot Euclidean reduction.

    ``ncols`` is only needed for matrices with zero rows.  Solvers only use
    U_inv and V_inv; ``want_U=False`` / ``want_V=False`` skip tracking U or V
    (left as None), which saves a third of the work on wide systems.
    ``v_inv_rows`` keeps only that many leading rows of V_inv (requires
    ``want_V=False``).
    """
    r = len(A)
    c = len(A[0]) if r else (ncols or 0)
    S = [[int(x) for x in row] for row in A]
    if v_inv_rows is not None and want_V:
        raise ValueError("truncating V_inv needs want_V=False")
    L = identity(r)
    R = identity(c)[:v_inv_rows]   # L A R = S
    Linv = identity(r) if want_U else []   # empty: row loops become no-ops
    Rinv = identity(c) if want_V else None

    def row_swap(i, j):
        if i == j:
            return
        S[i], S[j] = S[j], S[i]
        L[i], L[j] = L[j], L[i]
        for row in Linv:
            row[i], row[j] = row[j], row[i]

    def col_swap(i, j):
        if i == j:
            return
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in R:
            row[i], row[j] = row[j], row[i]
        if Rinv is not None:
            Rinv[i], Rinv[j] = Rinv[j], Rinv[i]

    def row_addmul(dst, src, q):
        # row_dst += q * row_src
        if not q:
            return
        Sd, Ss = S[dst], S[src]
        for k in range(c):
            if Ss[k]:
                Sd[k] += q * Ss[k]
        Ld, Ls = L[dst], L[src]
        for k in range(r):
            if Ls[k]:
                Ld[k] += q * Ls[k]
        for row in Linv:
            if row[dst]:
                row[src] -= q * row[dst]

    def col_addmul(dst, src, q):
        # col_dst += q * col_src
        if not q:
            return
        for row in S:
            if row[src]:
                row[dst] += q * row[src]
        for row in R:
            if row[src]:
                row[dst] += q * row[src]
        if Rinv is not None:
            Rd, Rs = Rinv[dst], Rinv[src]
            for k in range(c):
                if Rd[k]:
                    Rs[k] -= q * Rd[k]

    def row_negate(i):
        S[i] = [-x for x in S[i]]
        L[i] = [-x for x in L[i]]
        for row in Linv:
            row[i] = -row[i]

    for t in range(min(r, c)):
        while True:
            best = None
            for i in range(t, r):
                Si = S[i]
                for j in range(t, c):
                    x = Si[j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
                        if best[0] == 1:
                            break
                if best is not None and best[0] == 1:
                    break
            if best is None:
                return SnfDecomposition(Linv if want_U else None, S, Rinv, L, R, c)
            _, i, j = best
            row_swap(t, i)
            col_swap(t, j)
            if S[t][t] < 0:
                row_negate(t)
            p = S[t][t]
            dirty = False
            for i in range(t + 1, r):
                if S[i][t]:
                    row_addmul(i, t, -(S[i][t] // p))
                    dirty = dirty or S[i][t] != 0
            for j in range(t + 1, c):
                if S[t][j]:
                    col_addmul(j, t, -(S[t][j] // p))
                    dirty = dirty or S[t][j] != 0
            if dirty:
                continue
            bad = None
            for i in range(t + 1, r):
                for j in range(t + 1, c):
                    if S[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_addmul(t, bad, 1)
    return SnfDecomposition(Linv if want_U else None, S, Rinv, L, R, c)

