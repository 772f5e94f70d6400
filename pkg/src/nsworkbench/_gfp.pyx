# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Gauss-Jordan elimination over GF(p) on a dense int64 matrix."""

cdef long long _inv(long long a, long long p) nogil:
    cdef long long t = 0, nt = 1, r = p, nr = a % p, q, tmp
    while nr != 0:
        q = r // nr
        tmp = t - q * nt
        t = nt
        nt = tmp
        tmp = r - q * nr
        r = nr
        nr = tmp
    if t < 0:
        t += p
    return t


def rref_inplace(long long[:, ::1] M, long long p, Py_ssize_t ncols):
    """Reduce the first ``ncols`` columns of M to reduced row echelon form
    mod p, applying the same row operations to the trailing columns.
    Entries must already lie in [0, p).  Returns the pivot columns."""
    cdef Py_ssize_t nrows = M.shape[0], width = M.shape[1]
    cdef Py_ssize_t rank = 0, col, r, k, piv
    cdef long long inv, f, v
    pivots = []
    with nogil:
        for col in range(ncols):
            if rank == nrows:
                break
            piv = -1
            for r in range(rank, nrows):
                if M[r, col] != 0:
                    piv = r
                    break
            if piv < 0:
                continue
            if piv != rank:
                for k in range(col, width):
                    v = M[piv, k]
                    M[piv, k] = M[rank, k]
                    M[rank, k] = v
            inv = _inv(M[rank, col], p)
            if inv != 1:
                for k in range(col, width):
                    M[rank, k] = (M[rank, k] * inv) % p
            for r in range(nrows):
                if r == rank:
                    continue
                f = M[r, col]
                if f == 0:
                    continue
                f = p - f
                for k in range(col, width):
                    if M[rank, k] != 0:
                        M[r, k] = (M[r, k] + f * M[rank, k]) % p
            with gil:
                pivots.append(col)
            rank += 1
    return pivots
