"""Spectral verification of the Laplacian consensus mechanics.

Checks, at small n only, that powers of (I - beta*L) contract onto the
per-component averaging operator when beta * lambda_max < 1, and supply a
cheap degree-based bound for choosing beta. The simulation hot path never
eigendecomposes; these are verification tools.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Graph, LaplacianOperator, connected_components

DEFAULT_CAP = 500


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues and orthonormal eigenvectors (columns) of L."""

    eigenvalues: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.vectors @ np.diag(self.eigenvalues) @ self.vectors.T

    def near_zero_count(self, tol: float = 1e-8) -> int:
        return int(np.count_nonzero(self.eigenvalues < tol))


def eigendecompose_laplacian(lap: LaplacianOperator,
                             cap: int = DEFAULT_CAP) -> EigenDecomposition:
    """Symmetric eigendecomposition of the dense L; refuses n beyond cap."""
    if lap.n > cap:
        raise ValueError(f"n={lap.n} exceeds spectral cap {cap}")
    vals, vecs = np.linalg.eigh(lap.to_dense())
    return EigenDecomposition(eigenvalues=vals, vectors=vecs)


def lambda_max_bound(g: Graph) -> float:
    """Upper bound on the largest Laplacian eigenvalue: twice the max degree."""
    return 2.0 * g.max_degree


def select_beta(g: Graph, safety: float, default_beta: float = 0.1) -> float:
    """Step size safety / (2 * max_degree), guaranteeing beta * lambda_max < 1.

    An edgeless graph has no spectral constraint; returns default_beta.
    """
    if not 0.0 < safety < 1.0:
        raise ValueError(f"safety must be in (0, 1), got {safety}")
    bound = lambda_max_bound(g)
    if bound == 0.0:
        return default_beta
    return safety / bound


def consensus_limit_check(lap: LaplacianOperator, beta: float, n_iters: int,
                          enforce_stability: bool = True,
                          cap: int = DEFAULT_CAP) -> tuple[np.ndarray, float]:
    """Compare (I - beta*L)^n_iters against the block averaging operator.

    The reference matrix holds 1/N_k inside each connected component of
    size N_k and 0 across components. Returns the computed power and its
    elementwise max deviation from that reference. With
    ``enforce_stability`` (default) the call refuses beta * lambda_max >= 1;
    disable it to run divergent powers as a negative control.
    """
    if n_iters < 0:
        raise ValueError(f"n_iters must be >= 0, got {n_iters}")
    if lap.n > cap:
        raise ValueError(f"n={lap.n} exceeds spectral cap {cap}")
    eig = eigendecompose_laplacian(lap, cap=cap)
    lam_max = float(eig.eigenvalues[-1])
    if enforce_stability and beta * lam_max >= 1.0:
        raise ValueError(
            f"unstable step size: beta*lambda_max = {beta * lam_max:.6g} >= 1")

    m = np.linalg.matrix_power(np.eye(lap.n) - beta * lap.to_dense(), n_iters)
    parts = connected_components(lap.graph)
    block = np.zeros((lap.n, lap.n))
    for comp in parts.components:
        block[np.ix_(comp, comp)] = 1.0 / comp.size
    deviation = float(np.max(np.abs(m - block)))
    return m, deviation
