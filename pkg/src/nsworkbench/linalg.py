"""Exact linear algebra over GF(p).

The elimination kernel is the compiled ``_gfp`` extension when it is
built, and the numpy implementation in ``_gfp_py`` otherwise.
"""

import numpy as np

from . import _gfp_py

try:
    from . import _gfp as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _gfp_py.rref_inplace}
if _compiled is not None:
    BACKENDS["cython"] = _compiled.rref_inplace

BACKEND = "cython" if _compiled is not None else "python"


def set_backend(name: str) -> None:
    global BACKEND
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}")
    BACKEND = name


def rref(M: np.ndarray, p: int, ncols: int | None = None, backend: str | None = None) -> list:
    """In-place reduced row echelon form of the first ``ncols`` columns."""
    M_ = np.ascontiguousarray(M, dtype=np.int64)
    if M_ is not M:
        raise ValueError("rref needs a C-contiguous int64 array")
    ncols = M.shape[1] if ncols is None else ncols
    return BACKENDS[backend or BACKEND](M, int(p), int(ncols))


def solve_augmented(A: np.ndarray, p: int, backend: str | None = None):
    """Solve [A | b] mod p (b is the last column).

    Returns one solution (free variables set to 0) as an int64 vector, or
    None when the system is inconsistent.
    """
    M = np.ascontiguousarray(A % p, dtype=np.int64)
    ncols = M.shape[1] - 1
    pivots = rref(M, p, ncols, backend)
    rank = len(pivots)
    if rank < M.shape[0] and np.any(M[rank:, -1]):
        return None
    x = np.zeros(ncols, dtype=np.int64)
    for r, c in enumerate(pivots):
        x[c] = M[r, -1]
    return x


def rank_mod_p(A: np.ndarray, p: int, backend: str | None = None) -> int:
    M = np.ascontiguousarray(A % p, dtype=np.int64)
    return len(rref(M, p, M.shape[1], backend))
