"""Numpy Gauss-Jordan elimination over GF(p); fallback for the compiled kernel."""

import numpy as np


def rref_inplace(M: np.ndarray, p: int, ncols: int) -> list:
    nrows = M.shape[0]
    rank = 0
    pivots = []
    for col in range(ncols):
        if rank == nrows:
            break
        nz = np.nonzero(M[rank:, col])[0]
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            M[[rank, piv]] = M[[piv, rank]]
        inv = pow(int(M[rank, col]), -1, p)
        if inv != 1:
            M[rank, col:] = (M[rank, col:] * inv) % p
        others = np.nonzero(M[:, col])[0]
        others = others[others != rank]
        if others.size:
            f = M[others, col].copy()
            M[others, col:] = (M[others, col:] - np.outer(f, M[rank, col:])) % p
        pivots.append(col)
        rank += 1
    return pivots
