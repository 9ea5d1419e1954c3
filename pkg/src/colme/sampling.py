"""Ground-truth similarity classes and per-agent observation streams.

Each agent draws x_a(t) = mu_class(a) + sigma * z with independent standard
normal z across agents and time. Replications get independent streams from
a counter-based (Philox) split of the master seed, so results do not depend
on scheduling order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

# sub-stream tags under a (master_seed, replication) key
STREAM_OBSERVATIONS = 0
STREAM_GRAPH = 1


@dataclass(frozen=True)
class ClassConfig:
    """Per-class true means, shared noise scale, and the agent->class map."""

    class_means: np.ndarray   # (C,) float64
    sigma: float
    assignment: np.ndarray    # (n,) int64

    def __post_init__(self):
        object.__setattr__(self, "class_means",
                           np.asarray(self.class_means, dtype=np.float64))
        object.__setattr__(self, "assignment",
                           np.asarray(self.assignment, dtype=np.int64))
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.class_means.ndim != 1 or self.class_means.size == 0:
            raise ValueError("class_means must be a non-empty 1-d sequence")
        c = self.class_means.size
        if self.assignment.size == 0:
            raise ValueError("assignment must cover at least one agent")
        if self.assignment.min() < 0 or self.assignment.max() >= c:
            raise ValueError("assignment references an unknown class index")
        if c > 1 and np.unique(self.class_means).size != c:
            raise ValueError("class means must be pairwise distinct")

    @classmethod
    def equal_blocks(cls, n: int, class_means, sigma: float) -> "ClassConfig":
        """Split agents 0..n-1 into contiguous near-equal blocks, one per class."""
        means = np.asarray(class_means, dtype=np.float64)
        bounds = np.linspace(0, n, means.size + 1).astype(np.int64)
        assignment = np.zeros(n, dtype=np.int64)
        for c in range(means.size):
            assignment[bounds[c]:bounds[c + 1]] = c
        return cls(class_means=means, sigma=float(sigma), assignment=assignment)

    @property
    def n(self) -> int:
        return int(self.assignment.size)

    @property
    def n_classes(self) -> int:
        return int(self.class_means.size)

    @cached_property
    def agent_means(self) -> np.ndarray:
        """True mean per agent."""
        return self.class_means[self.assignment]

    def min_gap(self) -> float:
        """Smallest gap |mu_c - mu_c'| across distinct classes; inf if one class."""
        if self.n_classes < 2:
            return float("inf")
        m = np.sort(self.class_means)
        return float(np.min(np.diff(m)))


@dataclass(frozen=True)
class ObservationVector:
    """One synchronous round of observations, one value per agent."""

    t: int
    values: np.ndarray


def make_rng(master_seed: int, *tags: int) -> np.random.Generator:
    """Independent generator for a (seed, tag...) key via Philox counter keying."""
    seq = np.random.SeedSequence([int(master_seed), *map(int, tags)])
    return np.random.Generator(np.random.Philox(seed=seq))


def sample_step(cfg: ClassConfig, t: int, rng: np.random.Generator) -> ObservationVector:
    """Draw the round-t observation vector; rng must be positioned at round t."""
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    values = cfg.agent_means + cfg.sigma * rng.standard_normal(cfg.n)
    return ObservationVector(t=t, values=values)


class ObservationStream:
    """Stateful per-replication stream that enforces deterministic positioning."""

    def __init__(self, cfg: ClassConfig, master_seed: int, replication: int):
        self.cfg = cfg
        self.rng = make_rng(master_seed, replication, STREAM_OBSERVATIONS)
        self.t = 0

    def next(self) -> ObservationVector:
        self.t += 1
        return sample_step(self.cfg, self.t, self.rng)
