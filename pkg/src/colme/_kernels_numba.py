"""Numba-compiled twins of the kernels in ``_kernels_numpy``.

Same signatures and semantics; plain loops over the CSR arrays so the
division/multiplication structure of each update is explicit. Compiled
lazily on first call, cached on disk.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def metropolis_build(indptr, indices, degrees):
    n = indptr.shape[0] - 1
    wdata = np.empty(indices.shape[0], dtype=np.float64)
    wdiag = np.empty(n, dtype=np.float64)
    ndiv = 0
    for i in range(n):
        di = degrees[i]
        s = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            dj = degrees[indices[k]]
            dm = di if di > dj else dj
            w = 1.0 / (dm + 1.0)
            ndiv += 1
            wdata[k] = w
            s += w
        wdiag[i] = 1.0 - s
    return wdata, wdiag, ndiv


@njit(cache=True, nogil=True)
def consensus_step_weighted(indptr, indices, wdata, wdiag, x, mu, alpha):
    # neighbors first, diagonal last: mirrors the construction's row sum so a
    # constant mu is preserved exactly, not just to rounding
    n = x.shape[0]
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        s = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            s += wdata[k] * mu[indices[k]]
        s += wdiag[i] * mu[i]
        out[i] = (1.0 - alpha) * x[i] + alpha * s
    return out


@njit(cache=True, nogil=True)
def consensus_step_laplacian(indptr, indices, degrees, x, mu, alpha, beta):
    # add/multiply only: no division may appear in this loop
    n = x.shape[0]
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        s = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            s += mu[indices[k]]
        y = mu[i] - beta * (degrees[i] * mu[i] - s)
        out[i] = (1.0 - alpha) * x[i] + alpha * y
    return out


@njit(cache=True, nogil=True)
def laplacian_matvec(indptr, indices, degrees, x):
    n = x.shape[0]
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        s = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            s += x[indices[k]]
        out[i] = degrees[i] * x[i] - s
    return out
