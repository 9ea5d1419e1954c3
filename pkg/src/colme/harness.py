"""Synchronous simulation loop over time and replications.

One replication owns a graph, an observation stream, and the estimator
states for every requested variant; all variants inside a replication see
identical observations and identical pruning decisions, which makes the
per-variant cost comparison fair. Replications are independent and may run
concurrently; aggregation is a fixed-order reduction so results do not
depend on scheduling.

Per round t: observe x(t), fold into the local means X(t), compute the
shared confidence radius, prune edges with disjoint intervals (permanent),
rebuild the affected consensus operators, then advance each variant:

  local    mu = X(t)
  oracle   mu = class-average of X(t) using the true classes
  c-colme  mu = (1-a) X(t) + a * W mu_prev      (Metropolis weights)
  cl-colme mu = (1-a) X(t) + a * (I - beta*L) mu_prev

Wall time and division counts are recorded per variant around the
consensus step plus any operator rebuild; sampling, local means, and
pruning are shared costs timed separately.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .estimators import (LocalMeanState, alpha_schedule, c_colme_step,
                         cl_colme_step, confidence_radius, metropolis_weights,
                         oracle_estimate, separation_time)
from .graphs import Graph, build_random_graph, laplacian, prune_edges
from .sampling import STREAM_GRAPH, ClassConfig, ObservationStream, make_rng
from .spectral import select_beta

VARIANT_LOCAL = "local"
VARIANT_ORACLE = "oracle"
VARIANT_C = "c-colme"
VARIANT_CL = "cl-colme"
ALL_VARIANTS = (VARIANT_LOCAL, VARIANT_ORACLE, VARIANT_C, VARIANT_CL)

THREADS_ENV = "COLME_THREADS"


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved parameters of one experiment."""

    n: int
    class_means: tuple
    sigma: float
    max_degree: int
    horizon: int
    replications: int = 1
    seed: int = 0
    variants: tuple = ALL_VARIANTS
    delta: float = 0.01
    beta: float | str = 0.1          # numeric, or "auto" for the spectral bound
    beta_safety: float = 0.9
    t_ramp: int = 50
    prune_every: int = 1
    separation_cap: int = 10**9

    def validate(self) -> "ExperimentConfig":
        def need(cond, msg):
            if not cond:
                raise ValueError(msg)

        need(self.n >= 1, f"n must be >= 1, got {self.n}")
        need(len(self.class_means) >= 1, "class_means must be non-empty")
        need(len(set(self.class_means)) == len(self.class_means),
             "class_means must be pairwise distinct")
        need(self.sigma >= 0, f"sigma must be >= 0, got {self.sigma}")
        need(self.max_degree >= 0, f"max_degree must be >= 0, got {self.max_degree}")
        need(self.horizon >= 1, f"horizon must be >= 1, got {self.horizon}")
        need(self.replications >= 1,
             f"replications must be >= 1, got {self.replications}")
        need(self.seed >= 0, f"seed must be >= 0, got {self.seed}")
        need(len(self.variants) >= 1, "variants must be non-empty")
        for v in self.variants:
            need(v in ALL_VARIANTS, f"variants: unknown variant {v!r}")
        need(0.0 < self.delta < 1.0, f"delta must be in (0, 1), got {self.delta}")
        if isinstance(self.beta, str):
            need(self.beta == "auto", f"beta must be a number or 'auto', got {self.beta!r}")
        else:
            need(self.beta > 0, f"beta must be > 0, got {self.beta}")
        need(0.0 < self.beta_safety < 1.0,
             f"beta_safety must be in (0, 1), got {self.beta_safety}")
        need(self.t_ramp >= 1, f"t_ramp must be >= 1, got {self.t_ramp}")
        need(self.prune_every >= 1, f"prune_every must be >= 1, got {self.prune_every}")
        return self

    def class_config(self) -> ClassConfig:
        return ClassConfig.equal_blocks(self.n, self.class_means, self.sigma)

    def resolve_beta(self, g: Graph) -> float:
        if self.beta == "auto":
            return select_beta(g, self.beta_safety)
        return float(self.beta)

    def predicted_separation_time(self):
        """Predicted round at which the smallest inter-class gap separates."""
        gap = self.class_config().min_gap()
        if not np.isfinite(gap):
            return None
        return separation_time(gap, self.sigma, self.delta, max_t=self.separation_cap)


@dataclass
class ReplicationResult:
    """Everything one replication produced, keyed by variant where relevant."""

    replication: int
    beta_used: float
    mse: dict                      # tag -> (T,) float64
    step_ns: dict                  # tag -> (T,) int64, c/cl only
    divisions: dict                # tag -> (T,) int64, c/cl only
    edges_removed: np.ndarray      # (T,) int64
    rebuild_mask: np.ndarray       # (T,) bool, operator rebuilt that round
    shared_ns_total: int
    final_mu: dict                 # tag -> (n,) float64
    n_edges_initial: int
    n_edges_final: int
    cross_edges_initial: int
    cross_edges_final: int
    first_cross_free_step: int | None
    last_prune_step: int


@dataclass
class MseTrace:
    """Per-round records averaged over replications, plus the raw results."""

    config: ExperimentConfig
    t: np.ndarray
    mse: dict                      # tag -> (T,) float64 mean over replications
    edges_removed: np.ndarray      # (T,) float64 mean over replications
    step_us: dict                  # tag -> (T,) float64 mean over replications
    predicted_separation: int | None
    reps: list = field(default_factory=list)


def count_cross_class_edges(g: Graph, assignment: np.ndarray) -> int:
    """Surviving edges whose endpoints belong to different true classes."""
    if g.n_edges == 0:
        return 0
    u, v = g.edge_array[:, 0], g.edge_array[:, 1]
    return int(np.count_nonzero(assignment[u] != assignment[v]))


def run_replication(cfg: ExperimentConfig, replication: int) -> ReplicationResult:
    """One deterministic replication; same (cfg, replication) gives identical output."""
    cfg.validate()
    class_cfg = cfg.class_config()
    truth = class_cfg.agent_means
    assignment = class_cfg.assignment

    g = build_random_graph(cfg.n, cfg.max_degree,
                           make_rng(cfg.seed, replication, STREAM_GRAPH))
    beta = cfg.resolve_beta(g)
    stream = ObservationStream(class_cfg, cfg.seed, replication)
    state = LocalMeanState.zeros(cfg.n)

    T = cfg.horizon
    run_c = VARIANT_C in cfg.variants
    run_cl = VARIANT_CL in cfg.variants
    mse = {tag: np.zeros(T) for tag in cfg.variants}
    step_ns = {tag: np.zeros(T, dtype=np.int64)
               for tag in (VARIANT_C, VARIANT_CL) if tag in cfg.variants}
    divisions = {tag: np.zeros(T, dtype=np.int64)
                 for tag in (VARIANT_C, VARIANT_CL) if tag in cfg.variants}
    edges_removed = np.zeros(T, dtype=np.int64)
    rebuild_mask = np.zeros(T, dtype=bool)

    weights = None
    lap = None
    mu_c = None
    mu_cl = None
    estimates = {}

    n_edges_initial = g.n_edges
    cross_initial = count_cross_class_edges(g, assignment)
    cross_current = cross_initial
    first_cross_free = 0 if cross_initial == 0 else None
    last_prune_step = 0
    shared_ns = 0

    for t in range(1, T + 1):
        t0 = time.perf_counter_ns()
        obs = stream.next()
        state.update(obs)
        xbar = state.xbar

        operators_stale = t == 1
        if t % cfg.prune_every == 0 and g.n_edges > 0:
            radius = confidence_radius(t, cfg.sigma, cfg.delta)
            g, removed = prune_edges(g, xbar - radius, xbar + radius)
            if removed:
                edges_removed[t - 1] = removed
                last_prune_step = t
                operators_stale = True
                cross_current = count_cross_class_edges(g, assignment)
                if cross_current == 0 and first_cross_free is None:
                    first_cross_free = t
        alpha = alpha_schedule(t, cfg.t_ramp)
        shared_ns += time.perf_counter_ns() - t0
        rebuild_mask[t - 1] = operators_stale

        if run_c:
            t0 = time.perf_counter_ns()
            if operators_stale:
                weights = metropolis_weights(g)
                divisions[VARIANT_C][t - 1] = weights.ndiv
            if mu_c is None:
                mu_c = xbar.copy()
            mu_c = c_colme_step(xbar, mu_c, weights, alpha)
            step_ns[VARIANT_C][t - 1] = time.perf_counter_ns() - t0
            estimates[VARIANT_C] = mu_c
        if run_cl:
            t0 = time.perf_counter_ns()
            if operators_stale:
                lap = laplacian(g)
            if mu_cl is None:
                mu_cl = xbar.copy()
            mu_cl = cl_colme_step(xbar, mu_cl, lap, alpha, beta)
            step_ns[VARIANT_CL][t - 1] = time.perf_counter_ns() - t0
            estimates[VARIANT_CL] = mu_cl
        if VARIANT_LOCAL in mse:
            estimates[VARIANT_LOCAL] = xbar
        if VARIANT_ORACLE in mse:
            estimates[VARIANT_ORACLE] = oracle_estimate(class_cfg, xbar)

        for tag in cfg.variants:
            err = estimates[tag] - truth
            mse[tag][t - 1] = np.mean(err * err)

    final_mu = {tag: np.array(estimates[tag], copy=True) for tag in cfg.variants}
    return ReplicationResult(
        replication=replication,
        beta_used=beta,
        mse=mse,
        step_ns=step_ns,
        divisions=divisions,
        edges_removed=edges_removed,
        rebuild_mask=rebuild_mask,
        shared_ns_total=shared_ns,
        final_mu=final_mu,
        n_edges_initial=n_edges_initial,
        n_edges_final=g.n_edges,
        cross_edges_initial=cross_initial,
        cross_edges_final=cross_current,
        first_cross_free_step=first_cross_free,
        last_prune_step=last_prune_step,
    )


def _max_workers(replications: int) -> int:
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}")
    if cap < 0:
        raise ValueError(f"{THREADS_ENV} must be >= 0, got {cap}")
    if cap == 0:
        cap = os.cpu_count() or 1
    return max(1, min(cap, replications))


def run_experiment(cfg: ExperimentConfig) -> MseTrace:
    """Average run_replication over cfg.replications; scheduling-independent."""
    cfg.validate()
    workers = _max_workers(cfg.replications)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reps = list(pool.map(lambda r: run_replication(cfg, r),
                                 range(cfg.replications)))
    else:
        reps = [run_replication(cfg, r) for r in range(cfg.replications)]

    # fixed-order reduction: stack by replication index, then mean
    mse = {tag: np.stack([r.mse[tag] for r in reps]).mean(axis=0)
           for tag in cfg.variants}
    step_us = {tag: np.stack([r.step_ns[tag] for r in reps]).mean(axis=0) / 1e3
               for tag in reps[0].step_ns}
    edges_removed = np.stack([r.edges_removed for r in reps]).mean(axis=0)
    return MseTrace(
        config=cfg,
        t=np.arange(1, cfg.horizon + 1, dtype=np.int64),
        mse=mse,
        edges_removed=edges_removed,
        step_us=step_us,
        predicted_separation=cfg.predicted_separation_time(),
        reps=reps,
    )


@dataclass
class VariantBench:
    """Consensus-path cost of one variant, aggregated over replications."""

    tag: str
    steps_measured: int
    total_s: float
    mean_us: float
    median_us: float
    divisions_total: int
    rebuild_steps: int
    rebuild_div_min: int            # fewest divisions on any rebuild round
    steady_div_per_step: int        # max divisions on rounds with no rebuild
    whole_run_s: float              # shared pipeline + this variant's path


@dataclass
class BenchReport:
    """Per-iteration cost comparison between the consensus variants."""

    config: ExperimentConfig
    backend: str
    n_edges_initial: int
    n_edges_final: int
    shared_s: float
    variants: dict                  # tag -> VariantBench
    time_ratio_cl_over_c: float | None

    def to_text(self) -> str:
        lines = [
            "colme bench report",
            f"backend: {self.backend}",
            f"n: {self.config.n}  initial_edges: {self.n_edges_initial}  "
            f"final_edges: {self.n_edges_final}  "
            f"horizon: {self.config.horizon}  replications: {self.config.replications}",
            f"shared_pipeline_s: {self.shared_s:.6f}  "
            "(sampling + local means + pruning, measured once)",
            "",
            "variant      total_s     mean_us   median_us  divisions  "
            "rebuilds  steady_div/step  whole_run_s",
        ]
        for tag in (VARIANT_C, VARIANT_CL):
            if tag not in self.variants:
                continue
            b = self.variants[tag]
            lines.append(
                f"{tag:<12} {b.total_s:>9.6f} {b.mean_us:>10.3f} {b.median_us:>10.3f} "
                f"{b.divisions_total:>10d} {b.rebuild_steps:>9d} {b.steady_div_per_step:>16d} "
                f"{b.whole_run_s:>12.6f}")
        if self.time_ratio_cl_over_c is not None:
            lines.append("")
            lines.append(
                f"consensus-path wall time ratio cl-colme/c-colme: "
                f"{self.time_ratio_cl_over_c:.4f}")
        return "\n".join(lines) + "\n"


def benchmark_variants(cfg: ExperimentConfig) -> BenchReport:
    """Time the consensus paths of c-colme and cl-colme on identical streams.

    Both variants run inside the same replication loop, so they see the
    same observations and the same pruning sequence. Replications run
    serially to keep timings clean.
    """
    cfg.validate()
    tags = tuple(v for v in cfg.variants if v in (VARIANT_C, VARIANT_CL))
    if not tags:
        raise ValueError("variants must include c-colme or cl-colme to benchmark")
    bench_cfg = replace(cfg, variants=tags)
    kernels.warmup()
    reps = [run_replication(bench_cfg, r) for r in range(cfg.replications)]

    shared_s = sum(r.shared_ns_total for r in reps) / 1e9
    variants = {}
    for tag in tags:
        all_ns = np.concatenate([r.step_ns[tag] for r in reps])
        all_div = np.concatenate([r.divisions[tag] for r in reps])
        rebuild = np.concatenate([r.rebuild_mask for r in reps])
        total_s = float(all_ns.sum()) / 1e9
        steady = ~rebuild
        variants[tag] = VariantBench(
            tag=tag,
            steps_measured=int(all_ns.size),
            total_s=total_s,
            mean_us=float(all_ns.mean()) / 1e3,
            median_us=float(np.median(all_ns)) / 1e3,
            divisions_total=int(all_div.sum()),
            rebuild_steps=int(np.count_nonzero(rebuild)),
            rebuild_div_min=int(all_div[rebuild].min()) if rebuild.any() else 0,
            steady_div_per_step=int(all_div[steady].max()) if steady.any() else 0,
            whole_run_s=shared_s + total_s,
        )
    ratio = None
    if VARIANT_C in variants and VARIANT_CL in variants:
        c_total = variants[VARIANT_C].total_s
        ratio = variants[VARIANT_CL].total_s / c_total if c_total > 0 else float("nan")
    return BenchReport(
        config=bench_cfg,
        backend=kernels.backend(),
        n_edges_initial=reps[0].n_edges_initial,
        n_edges_final=min(r.n_edges_final for r in reps),
        shared_s=shared_s,
        variants=variants,
        time_ratio_cl_over_c=ratio,
    )
