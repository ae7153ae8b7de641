"""Dense mod-p linear algebra kernels on int64 arrays.

Two interchangeable backends:

* numba ``@njit`` loops (default) -- the hot paths of subspace enumeration,
  invariant filtering and GIT weight sweeps spend their time here;
* pure numpy (set ``PARASTAB_BACKEND=numpy``) -- vectorised fallback for
  environments without a working JIT, and the baseline for the benchmark in
  ``benchmarks/bench_backends.py``.

Both backends produce bit-identical results; reports downstream are
byte-deterministic either way.  All matrices are C-contiguous ``int64`` with
entries already reduced into ``[0, p)``; p is a prime <= 31 so no intermediate
product can overflow.
"""

import os

import numpy as np

BACKEND = os.environ.get("PARASTAB_BACKEND", "numba").strip().lower()
if BACKEND not in ("numba", "numpy"):
    raise RuntimeError(f"PARASTAB_BACKEND must be 'numba' or 'numpy', got {BACKEND!r}")

USING_NUMBA = False
if BACKEND == "numba":
    try:
        from numba import njit

        USING_NUMBA = True
    except ImportError:  # pragma: no cover - mirror unavailable
        BACKEND = "numpy"


if USING_NUMBA:

    @njit(cache=True)
    def inv_mod(a, p):
        # Fermat: a^(p-2) mod p.  a must be nonzero mod p.
        a = a % p
        result = 1
        e = p - 2
        while e > 0:
            if e & 1:
                result = (result * a) % p
            a = (a * a) % p
            e >>= 1
        return result

    @njit(cache=True)
    def matmul_mod(a, b, p):
        n, k = a.shape
        k2, m = b.shape
        out = np.zeros((n, m), dtype=np.int64)
        for i in range(n):
            for j in range(k):
                aij = a[i, j]
                if aij == 0:
                    continue
                for l in range(m):
                    out[i, l] = (out[i, l] + aij * b[j, l]) % p
        return out

    @njit(cache=True)
    def rref_mod(mat, p):
        """Reduced row echelon form. Returns (rref matrix, rank)."""
        m = mat % p
        rows, cols = m.shape
        piv = 0
        for col in range(cols):
            if piv >= rows:
                break
            sel = -1
            for r in range(piv, rows):
                if m[r, col] != 0:
                    sel = r
                    break
            if sel < 0:
                continue
            if sel != piv:
                for c in range(cols):
                    tmp = m[piv, c]
                    m[piv, c] = m[sel, c]
                    m[sel, c] = tmp
            inv = inv_mod(m[piv, col], p)
            for c in range(cols):
                m[piv, c] = (m[piv, c] * inv) % p
            for r in range(rows):
                if r != piv and m[r, col] != 0:
                    f = m[r, col]
                    for c in range(cols):
                        m[r, c] = (m[r, c] - f * m[piv, c]) % p
            piv += 1
        return m, piv

    @njit(cache=True)
    def rank_mod(mat, p):
        _, rk = rref_mod(mat, p)
        return rk

    @njit(cache=True)
    def rows_in_span_mod(span_rref, rows, p):
        """True iff every row of `rows` lies in the row space of RREF `span_rref`."""
        k, n = span_rref.shape
        for i in range(rows.shape[0]):
            v = rows[i] % p
            red = v.copy()
            for r in range(k):
                c = -1
                for j in range(n):
                    if span_rref[r, j] != 0:
                        c = j
                        break
                if c >= 0 and red[c] != 0:
                    f = red[c]
                    for j in range(n):
                        red[j] = (red[j] - f * span_rref[r, j]) % p
            for j in range(n):
                if red[j] != 0:
                    return False
        return True

    @njit(cache=True)
    def invariant_mask_mod(stack, mats, p):
        """stack: (N, d, n) RREF bases; mats: (k, n, n). mask[i] = all mats map
        row space i into itself."""
        nsub = stack.shape[0]
        nmat = mats.shape[0]
        mask = np.empty(nsub, dtype=np.bool_)
        for i in range(nsub):
            basis = stack[i]
            ok = True
            for a in range(nmat):
                img = matmul_mod(basis, mats[a].T.copy(), p)
                if not rows_in_span_mod(basis, img, p):
                    ok = False
                    break
            mask[i] = ok
        return mask

    @njit(cache=True)
    def suffix_ranks_mod(basis, block, p):
        """rank(basis[:, j*block:]) for j = 1..n-1 where n = cols // block."""
        cols = basis.shape[1]
        n = cols // block
        out = np.zeros(n - 1, dtype=np.int64)
        for j in range(1, n):
            sub = basis[:, j * block:].copy()
            _, rk = rref_mod(sub, p)
            out[j - 1] = rk
        return out

    @njit(cache=True)
    def inv_matrix_mod(a, p):
        """Inverse of a square matrix mod p. Returns (inv, ok)."""
        n = a.shape[0]
        aug = np.zeros((n, 2 * n), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                aug[i, j] = a[i, j] % p
            aug[i, n + i] = 1
        red, rk = rref_mod(aug, p)
        if rk < n:
            return np.zeros((n, n), dtype=np.int64), False
        # rank n on the left block means the left block reduced to the identity
        for i in range(n):
            for j in range(n):
                if red[i, j] != (1 if i == j else 0):
                    return np.zeros((n, n), dtype=np.int64), False
        return red[:, n:].copy(), True

else:

    def inv_mod(a, p):
        return pow(int(a) % p, p - 2, p)

    def matmul_mod(a, b, p):
        return (a @ b) % p

    def rref_mod(mat, p):
        m = (mat % p).astype(np.int64)
        rows, cols = m.shape
        piv = 0
        for col in range(cols):
            if piv >= rows:
                break
            nz = np.nonzero(m[piv:, col])[0]
            if nz.size == 0:
                continue
            sel = piv + int(nz[0])
            if sel != piv:
                m[[piv, sel]] = m[[sel, piv]]
            m[piv] = (m[piv] * inv_mod(m[piv, col], p)) % p
            others = np.nonzero(m[:, col])[0]
            others = others[others != piv]
            if others.size:
                m[others] = (m[others] - np.outer(m[others, col], m[piv])) % p
            piv += 1
        return m, piv

    def rank_mod(mat, p):
        return rref_mod(mat, p)[1]

    def rows_in_span_mod(span_rref, rows, p):
        k = span_rref.shape[0]
        red = (rows % p).astype(np.int64)
        if k:
            pivots = np.argmax(span_rref != 0, axis=1)
            for r in range(k):
                c = pivots[r]
                red = (red - np.outer(red[:, c], span_rref[r])) % p
        return not red.any()

    def invariant_mask_mod(stack, mats, p):
        nsub = stack.shape[0]
        mask = np.empty(nsub, dtype=bool)
        for i in range(nsub):
            basis = stack[i]
            mask[i] = all(
                rows_in_span_mod(basis, matmul_mod(basis, m.T, p), p) for m in mats
            )
        return mask

    def suffix_ranks_mod(basis, block, p):
        cols = basis.shape[1]
        n = cols // block
        return np.array(
            [rank_mod(basis[:, j * block:], p) for j in range(1, n)], dtype=np.int64
        )

    def inv_matrix_mod(a, p):
        n = a.shape[0]
        aug = np.concatenate([(a % p).astype(np.int64), np.eye(n, dtype=np.int64)], axis=1)
        red, rk = rref_mod(aug, p)
        if rk < n or not np.array_equal(red[:, :n], np.eye(n, dtype=np.int64)):
            return np.zeros((n, n), dtype=np.int64), False
        return red[:, n:].copy(), True


def warmup():
    """Force JIT compilation of every kernel (no-op on the numpy backend)."""
    p = 3
    a = np.array([[1, 2], [0, 1]], dtype=np.int64)
    b = np.array([[2, 1], [1, 1]], dtype=np.int64)
    inv_mod(2, p)
    matmul_mod(a, b, p)
    rref_mod(a, p)
    rank_mod(a, p)
    rows_in_span_mod(a, b, p)
    invariant_mask_mod(a[None, :, :], b[None, :, :], p)
    suffix_ranks_mod(np.array([[1, 0, 1, 2]], dtype=np.int64), 2, p)
    inv_matrix_mod(a, p)
