"""Estimation logic: local means, confidence intervals, consensus updates.

Two collaborative update rules share one shape, a convex combination of
fresh local means with a neighborhood-averaged previous estimate:

  c-colme   mu(t) = (1-a) X(t) + a * W mu(t-1),   W doubly stochastic
            with Metropolis weights 1/(max(deg_i, deg_j)+1) on edges;
  cl-colme  mu(t) = (1-a) X(t) + a * (I - beta*L) mu(t-1),  L = D - A,
            a gradient step on the quadratic disagreement x' L x that
            needs no per-edge normalization (no divisions at all).

Both preserve the all-ones vector, so constant-per-component estimates
are fixed points and the updates stay unbiased. An agent isolated by
pruning degenerates to mu_a = (1-a) X_a + a * mu_a in either rule and
keeps tracking its own local mean; no special casing exists or is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .graphs import Graph, LaplacianOperator
from .sampling import ClassConfig, ObservationVector


@dataclass
class LocalMeanState:
    """Running per-agent empirical means plus the equivalent running sums.

    ``msum`` is redundant with ``t * xbar`` and is kept as the local-sum
    formulation used by distributed implementations; the pair must agree
    to rounding, which tests enforce.
    """

    t: int
    xbar: np.ndarray
    msum: np.ndarray

    @classmethod
    def zeros(cls, n: int) -> "LocalMeanState":
        return cls(t=0, xbar=np.zeros(n), msum=np.zeros(n))

    @property
    def n(self) -> int:
        return int(self.xbar.shape[0])

    def update(self, x: ObservationVector) -> "LocalMeanState":
        """Fold in the round-t observations: xbar <- x/t + xbar*(t-1)/t."""
        if x.t != self.t + 1:
            raise ValueError(f"expected observations for round {self.t + 1}, got {x.t}")
        t = self.t + 1
        self.xbar *= (t - 1.0) / t
        self.xbar += x.values * (1.0 / t)
        self.msum += x.values
        self.t = t
        return self


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"lower {self.lower} > upper {self.upper}")

    @property
    def width(self) -> float:
        return self.upper - self.lower


def confidence_radius(t: int, sigma: float, delta: float) -> float:
    """Half-width of the level-(1-delta) interval around a t-sample mean.

    sigma * sqrt((2/t) (1 + 1/t) ln(sqrt(t+1) / (delta/2))), the
    Laplace-type bound for sigma-sub-Gaussian noise. Strictly decreasing
    in t with limit 0.
    """
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    t = float(t)
    return sigma * math.sqrt((2.0 / t) * (1.0 + 1.0 / t)
                             * math.log(math.sqrt(t + 1.0) / (delta / 2.0)))


def intervals_intersect(i1: ConfidenceInterval, i2: ConfidenceInterval) -> bool:
    """Closed-interval overlap; touching endpoints count as intersecting."""
    return max(i1.lower, i2.lower) <= min(i1.upper, i2.upper)


@dataclass(frozen=True)
class ConsensusWeights:
    """Symmetric doubly stochastic weight matrix, sparse on the graph edges.

    ``ndiv`` records how many division operations the construction
    performed (one per stored off-diagonal weight).
    """

    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray    # off-diagonal weights, aligned with indices
    diag: np.ndarray
    ndiv: int

    @property
    def n(self) -> int:
        return int(self.diag.shape[0])

    def matvec(self, mu: np.ndarray) -> np.ndarray:
        mu = np.asarray(mu, dtype=np.float64)
        # alpha=1 reduces the consensus step to the plain product W @ mu
        return kernels.consensus_step_weighted(self.indptr, self.indices,
                                               self.data, self.diag, mu, mu, 1.0)

    def to_dense(self) -> np.ndarray:
        n = self.n
        w = np.zeros((n, n))
        for i in range(n):
            w[i, self.indices[self.indptr[i]:self.indptr[i + 1]]] = \
                self.data[self.indptr[i]:self.indptr[i + 1]]
        w[np.arange(n), np.arange(n)] = self.diag
        return w


def metropolis_weights(g: Graph) -> ConsensusWeights:
    """Doubly stochastic weights: 1/(max(deg_i, deg_j)+1) on edges, diagonal
    completing each row to exactly 1."""
    wdata, wdiag, ndiv = kernels.metropolis_build(g.indptr, g.indices, g.degrees)
    return ConsensusWeights(indptr=g.indptr, indices=g.indices,
                            data=wdata, diag=wdiag, ndiv=int(ndiv))


def _check_alpha(alpha: float) -> float:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    return float(alpha)


def c_colme_step(x: np.ndarray, mu_prev: np.ndarray, w: ConsensusWeights,
                 alpha: float) -> np.ndarray:
    """(1-alpha) * x + alpha * (W @ mu_prev) using the sparse weight product."""
    alpha = _check_alpha(alpha)
    x = np.asarray(x, dtype=np.float64)
    mu_prev = np.asarray(mu_prev, dtype=np.float64)
    return kernels.consensus_step_weighted(w.indptr, w.indices, w.data, w.diag,
                                           x, mu_prev, alpha)


def cl_colme_step(x: np.ndarray, mu_prev: np.ndarray, lap: LaplacianOperator,
                  alpha: float, beta: float) -> np.ndarray:
    """(1-alpha) * x + alpha * (mu_prev - beta * (L @ mu_prev)).

    The smoothing term uses only additions and multiplications on edges;
    the whole per-step arithmetic path is division-free.
    """
    alpha = _check_alpha(alpha)
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    x = np.asarray(x, dtype=np.float64)
    mu_prev = np.asarray(mu_prev, dtype=np.float64)
    g = lap.graph
    return kernels.consensus_step_laplacian(g.indptr, g.indices, g.degrees,
                                            x, mu_prev, alpha, float(beta))


def alpha_schedule(t: int, t_ramp: int) -> float:
    """Mixing weight t / (t + t_ramp): below 1, nondecreasing, limit 1."""
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    if t_ramp < 1:
        raise ValueError(f"t_ramp must be >= 1, got {t_ramp}")
    return t / (t + float(t_ramp))


def oracle_estimate(cfg: ClassConfig, x: np.ndarray) -> np.ndarray:
    """Benchmark that averages local means over each agent's true class."""
    x = np.asarray(x, dtype=np.float64)
    sums = np.bincount(cfg.assignment, weights=x, minlength=cfg.n_classes)
    counts = np.bincount(cfg.assignment, minlength=cfg.n_classes)
    return (sums / counts)[cfg.assignment]


def separation_time(delta_gap: float, sigma: float, delta: float,
                    max_t: int = 10**9) -> int:
    """Smallest integer t with 2 * confidence_radius(t) <= delta_gap.

    Exponential search for a bracket, then bisection; valid because the
    radius decreases strictly in t. Raises if no t <= max_t qualifies.
    """
    if delta_gap <= 0:
        raise ValueError(f"delta_gap must be > 0, got {delta_gap}")

    def ok(t: int) -> bool:
        return 2.0 * confidence_radius(t, sigma, delta) <= delta_gap

    if ok(1):
        return 1
    lo, hi = 1, 2
    while not ok(hi):
        lo = hi
        hi *= 2
        if hi > max_t:
            if ok(max_t):
                hi = max_t
                break
            raise ValueError(f"separation time exceeds cap {max_t}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class EstimatorRun:
    """Evolving estimate vector of one variant plus its update parameters."""

    tag: str
    mu: np.ndarray
    beta: float | None = None
