"""Exact linear algebra over Z/p and over the chain rings Z/q^e.

Entries are int64; moduli are assumed small enough (< 2**31) that a product of
two reduced entries never overflows.
"""
from __future__ import annotations

import numpy as np


def rref_mod_p(A, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of A over F_p.  Returns (R, pivot_columns)."""
    A = np.array(A, dtype=np.int64) % p
    if A.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    m, n = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        col = A[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            A[rows] = (A[rows] - np.outer(col[rows], A[r])) % p
        pivots.append(c)
        r += 1
    return A, pivots


def rank_mod_p(A, p: int) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    # elimination loops over columns, so put the short side there
    if A.shape[1] > A.shape[0]:
        A = A.T
    return len(rref_mod_p(A, p)[1])


def in_column_span_mod_p(M, v, p: int) -> bool:
    """Is the vector v a linear combination of the columns of M over F_p?"""
    M = np.asarray(M, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64).reshape(-1, 1)
    if M.size == 0:
        return not np.any(v % p)
    aug = np.hstack([M, v])
    return rank_mod_p(aug, p) == rank_mod_p(M, p)


def solve_mod_p(A, b, p: int) -> np.ndarray | None:
    """One solution x of A x = b over F_p, or None if the system is inconsistent."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    m, n = A.shape
    R, pivots = rref_mod_p(np.hstack([A, b]), p)
    if pivots and pivots[-1] == n:
        return None
    x = np.zeros(n, dtype=np.int64)
    for row, c in enumerate(pivots):
        x[c] = R[row, n]
    return x


def _valuation(x: np.ndarray, q: int, e: int) -> np.ndarray:
    """q-adic valuation of entries of Z/q^e; zero entries get e (i.e. 'infinite')."""
    v = np.zeros(x.shape, dtype=np.int64)
    y = x.copy()
    for _ in range(e):
        divisible = (y % q == 0)
        v += divisible
        y = np.where(divisible, y // q, y)
    return v


def solvable_mod_prime_power(A, b, q: int, e: int) -> bool:
    """Does A x = b have a solution over the ring Z/q^e?

    Z/q^e is a chain ring: an entry of minimal q-valuation divides every other
    entry, so full-pivoting elimination reaches a diagonal (Smith) form.
    """
    mod = q**e
    A = np.array(A, dtype=np.int64) % mod
    b = np.array(b, dtype=np.int64).reshape(-1) % mod
    m, n = A.shape
    r = 0
    diag = []
    while r < min(m, n):
        sub = A[r:, r:]
        vals = _valuation(sub, q, e)
        k = int(np.argmin(vals))
        i, j = divmod(k, sub.shape[1])
        v = int(vals[i, j])
        if v >= e:
            break
        i += r
        j += r
        if i != r:
            A[[r, i]] = A[[i, r]]
            b[[r, i]] = b[[i, r]]
        if j != r:
            A[:, [r, j]] = A[:, [j, r]]
        unit = int(A[r, r]) // q**v
        inv = pow(unit, -1, mod)
        A[r] = (A[r] * inv) % mod
        b[r] = (b[r] * inv) % mod
        qv = q**v
        # every other entry in the pivot column / row has valuation >= v
        col = A[:, r].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            t = col[rows] // qv
            A[rows] = (A[rows] - np.outer(t, A[r])) % mod
            b[rows] = (b[rows] - t * b[r]) % mod
        row = A[r].copy()
        row[r] = 0
        cols = np.flatnonzero(row)
        if cols.size:
            t = row[cols] // qv
            A[:, cols] = (A[:, cols] - np.outer(A[:, r], t)) % mod
        diag.append(v)
        r += 1
    for i, v in enumerate(diag):
        if int(_valuation(b[i : i + 1], q, e)[0]) < v:
            return False
    return not np.any(b[r:])


def inverse_mod_p(A, p: int) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    m = A.shape[0]
    if A.shape != (m, m):
        raise ValueError("expected a square matrix")
    R, pivots = rref_mod_p(np.hstack([A, np.eye(m, dtype=np.int64)]), p)
    if pivots[:m] != list(range(m)):
        raise ValueError("matrix is singular mod p")
    return R[:, m:]


def independent_rows(M, p: int, chunk: int = 4096) -> np.ndarray:
    """Indices of rows of M spanning its row space over F_p.

    Rows are scanned in order, a chunk at a time, against an echelon basis kept
    fully reduced, so tall matrices cost one pass of matrix products.
    """
    M = np.asarray(M, dtype=np.int64) % p
    m, n = M.shape
    basis = np.zeros((0, n), dtype=np.int64)  # reduced rows
    pivots: list[int] = []
    chosen: list[int] = []
    for start in range(0, m, chunk):
        if len(pivots) == n:
            break
        block = M[start : start + chunk]
        if pivots:
            block = (block - block[:, pivots] @ basis) % p
        for local in np.flatnonzero(block.any(axis=1)):
            row = block[local].copy()
            if pivots:
                row = (row - row[pivots] @ basis) % p
            nz = np.flatnonzero(row)
            if nz.size == 0:
                continue
            c = int(nz[0])
            row = (row * pow(int(row[c]), -1, p)) % p
            if basis.size:
                basis = (basis - np.outer(basis[:, c], row)) % p
            basis = np.vstack([basis, row])
            pivots.append(c)
            chosen.append(start + int(local))
            if len(pivots) == n:
                break
    return np.asarray(chosen, dtype=np.int64)


def tall_in_column_span_mod_p(M, v, p: int) -> bool:
    """Column-span membership for matrices with many more rows than columns.

    If rows R span the row space, ker M[R] = ker M, so any solution of the
    R-subsystem solves the whole system; a final product confirms it.
    """
    M = np.asarray(M, dtype=np.int64) % p
    v = np.asarray(v, dtype=np.int64).reshape(-1) % p
    if M.shape[1] == 0:
        return not v.any()
    rows = independent_rows(M, p)
    if rows.size == 0:
        return not v.any()
    x = solve_mod_p(M[rows], v[rows], p)
    if x is None:
        return False
    return bool(np.array_equal((M @ x) % p, v))


def nullspace_mod_p(A, p: int) -> np.ndarray:
    """Rows form a basis of {x : A x = 0} over F_p."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[1]
    R, pivots = rref_mod_p(A, p)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for k, c in enumerate(free):
        basis[k, c] = 1
        for row, pc in enumerate(pivots):
            basis[k, pc] = (-R[row, c]) % p
    return basis
