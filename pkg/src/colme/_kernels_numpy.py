"""Pure-numpy implementations of the per-step kernels.

Reference path for the numba kernels in ``_kernels_numba``; selected at
runtime via the COLME_BACKEND environment variable (see ``kernels``).
All functions take the CSR arrays of the symmetric adjacency structure
(indptr, indices) plus per-node data, and return fresh arrays.
"""

import numpy as np


def _row_ids(indptr):
    n = indptr.shape[0] - 1
    return np.repeat(np.arange(n), np.diff(indptr))


def metropolis_build(indptr, indices, degrees):
    """Edge weights 1/(max(deg_i, deg_j)+1) with diagonal completing rows to 1.

    Returns (wdata, wdiag, ndiv) where ndiv counts the division operations
    actually performed (one per stored off-diagonal entry).
    """
    n = indptr.shape[0] - 1
    rows = _row_ids(indptr)
    wdata = 1.0 / (np.maximum(degrees[rows], degrees[indices]) + 1.0)
    ndiv = int(wdata.shape[0])
    wdiag = 1.0 - np.bincount(rows, weights=wdata, minlength=n)
    return wdata, wdiag, ndiv


def consensus_step_weighted(indptr, indices, wdata, wdiag, x, mu, alpha):
    """(1-alpha)*x + alpha*(W @ mu) with W = diag(wdiag) + weighted adjacency.

    Neighbor sum first, diagonal added last, mirroring the construction's
    row sums so constant vectors are preserved exactly.
    """
    n = x.shape[0]
    s = np.bincount(_row_ids(indptr), weights=wdata * mu[indices], minlength=n)
    return (1.0 - alpha) * x + alpha * (s + wdiag * mu)


def consensus_step_laplacian(indptr, indices, degrees, x, mu, alpha, beta):
    """(1-alpha)*x + alpha*(mu - beta*(L @ mu)) with L = D - A.

    Additions and multiplications only; no divisions anywhere on this path.
    """
    n = x.shape[0]
    s = np.bincount(_row_ids(indptr), weights=mu[indices], minlength=n)
    y = mu - beta * (degrees * mu - s)
    return (1.0 - alpha) * x + alpha * y


def laplacian_matvec(indptr, indices, degrees, x):
    """(D - A) @ x over the CSR adjacency."""
    n = x.shape[0]
    s = np.bincount(_row_ids(indptr), weights=x[indices], minlength=n)
    return degrees * x - s
