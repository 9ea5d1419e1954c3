"""Command line interface: run experiments, benchmark variants, spectral checks.

    colme run --config exp.ini --out results/
    colme bench --config exp.ini --out results/
    colme spectral-check --path-graph 3 --beta 0.25

COLME_THREADS caps concurrent replications (0 or unset = auto);
COLME_BACKEND selects the kernel implementation (numba/numpy/auto).
"""

from __future__ import annotations

import json
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import click
import numpy as np

from . import __version__, kernels
from .config import ConfigError, load_experiment_config, render_config
from .graphs import Graph, build_random_graph, connected_components, laplacian
from .harness import (VARIANT_C, VARIANT_CL, VARIANT_LOCAL, VARIANT_ORACLE,
                      MseTrace, benchmark_variants, run_experiment)
from .spectral import DEFAULT_CAP, consensus_limit_check, eigendecompose_laplacian

CSV_HEADER = ("t,mse_local,mse_oracle,mse_c,mse_cl,"
              "edges_removed,step_time_c_us,step_time_cl_us")
_CSV_VARIANT_ORDER = (VARIANT_LOCAL, VARIANT_ORACLE, VARIANT_C, VARIANT_CL)


def trace_to_csv(trace: MseTrace, include_timings: bool = False) -> str:
    """Fixed-column CSV; unrun variants leave their fields empty.

    Timing columns are empty unless requested: they vary run to run and
    would break the byte-identical reproducibility of `colme run` output.
    """
    lines = [CSV_HEADER]
    horizon = trace.t.size
    cols = []
    for tag in _CSV_VARIANT_ORDER:
        arr = trace.mse.get(tag)
        cols.append([repr(float(v)) for v in arr] if arr is not None else [""] * horizon)
    cols.append([repr(float(v)) for v in trace.edges_removed])
    for tag in (VARIANT_C, VARIANT_CL):
        arr = trace.step_us.get(tag) if include_timings else None
        cols.append([repr(float(v)) for v in arr] if arr is not None else [""] * horizon)
    for i in range(horizon):
        lines.append(",".join([str(int(trace.t[i]))] + [c[i] for c in cols]))
    return "\n".join(lines) + "\n"


def trace_summary(trace: MseTrace) -> str:
    cfg = trace.config
    lines = [f"colme run summary (T={cfg.horizon}, replications={cfg.replications})"]
    for tag in _CSV_VARIANT_ORDER:
        if tag in trace.mse:
            lines.append(f"final mse {tag}: {trace.mse[tag][-1]:.6e}")
    pred = trace.predicted_separation
    lines.append(f"predicted separation time: "
                 f"{pred if pred is not None else 'n/a (single class)'}")
    last_prunes = [r.last_prune_step for r in trace.reps]
    lines.append(f"observed last prune step: mean={np.mean(last_prunes):.1f} "
                 f"max={max(last_prunes)}")
    cross = [r.cross_edges_final for r in trace.reps]
    lines.append(f"surviving inter-class edges at T: {cross}")
    return "\n".join(lines) + "\n"


def _write_manifest(out: Path, cfg, command: str, outputs: list) -> None:
    manifest = {
        "tool": "colme",
        "version": __version__,
        "command": command,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "seed": cfg.seed,
        "backend": kernels.backend(),
        "config": render_config(cfg),
        "outputs": outputs,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _load_config(config_path, seed, replications):
    cfg = load_experiment_config(config_path)
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    if replications is not None:
        cfg = replace(cfg, replications=replications)
    return cfg.validate()


@click.group()
@click.version_option(version=__version__, prog_name="colme")
def main():
    """Decentralized collaborative mean estimation simulator."""


@main.command("run")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Config file.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Output directory (created if missing).")
@click.option("--seed", type=click.IntRange(min=0), default=None,
              help="Override the master seed.")
@click.option("--replications", type=click.IntRange(min=1), default=None,
              help="Override the replication count.")
def cmd_run(config_path, out_dir, seed, replications):
    """Run the experiment and write mse_trace.csv, summary.txt, manifest.json."""
    try:
        cfg = _load_config(config_path, seed, replications)
        trace = run_experiment(cfg)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "mse_trace.csv").write_text(trace_to_csv(trace))
        summary = trace_summary(trace)
        (out / "summary.txt").write_text(summary)
        _write_manifest(out, cfg, "run",
                        ["mse_trace.csv", "summary.txt"])
        click.echo(summary, nl=False)
    except (ConfigError, OSError) as exc:
        raise click.ClickException(str(exc))


@main.command("bench")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Config file.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Output directory (created if missing).")
@click.option("--seed", type=click.IntRange(min=0), default=None,
              help="Override the master seed.")
@click.option("--replications", type=click.IntRange(min=1), default=None,
              help="Override the replication count.")
def cmd_bench(config_path, out_dir, seed, replications):
    """Benchmark the per-iteration cost of c-colme vs cl-colme."""
    try:
        cfg = _load_config(config_path, seed, replications)
        report = benchmark_variants(cfg)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        text = report.to_text()
        (out / "bench_report.txt").write_text(text)
        _write_manifest(out, report.config, "bench", ["bench_report.txt"])
        click.echo(text, nl=False)
    except (ConfigError, ValueError, OSError) as exc:
        raise click.ClickException(str(exc))


def _path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


@main.command("spectral-check")
@click.option("--edges", "edges_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Edge-list file, one 'i j' pair per line.")
@click.option("--path-graph", "path_n", type=click.IntRange(min=1), default=None,
              help="Use the path graph on N vertices.")
@click.option("--random", "random_n", type=click.IntRange(min=1), default=None,
              help="Use a random graph on N vertices (see --max-degree, --seed).")
@click.option("--max-degree", type=click.IntRange(min=0), default=10,
              help="Degree cap for --random.")
@click.option("--seed", type=click.IntRange(min=0), default=0,
              help="Seed for --random.")
@click.option("--beta", required=True, type=float, help="Smoothing step size.")
@click.option("--iters", default="10,50,200,500", show_default=True,
              help="Comma-separated iteration counts to evaluate.")
def cmd_spectral_check(edges_path, path_n, random_n, max_degree, seed, beta, iters):
    """Eigenvalue summary and deviation of (I-beta*L)^k from block averaging."""
    sources = [s for s in (edges_path, path_n, random_n) if s is not None]
    if len(sources) != 1:
        raise click.ClickException(
            "choose exactly one of --edges, --path-graph, --random")
    try:
        iter_counts = [int(p) for p in iters.replace(",", " ").split()]
        if any(k < 0 for k in iter_counts):
            raise ValueError
    except ValueError:
        raise click.ClickException(f"--iters must be non-negative integers, got {iters!r}")

    try:
        if edges_path is not None:
            g = Graph.from_edge_list(Path(edges_path).read_text())
        elif path_n is not None:
            g = _path_graph(path_n)
        else:
            g = build_random_graph(random_n, max_degree, seed)
        lap = laplacian(g)
        eig = eigendecompose_laplacian(lap)
    except (ValueError, OSError) as exc:
        raise click.ClickException(str(exc))

    parts = connected_components(g)
    lam_max = float(eig.eigenvalues[-1])
    click.echo(f"nodes: {g.n}  edges: {g.n_edges}  components: {parts.n_components}")
    click.echo(f"eigenvalues: min={eig.eigenvalues[0]:.3e} max={lam_max:.6g} "
               f"near_zero={eig.near_zero_count()}")
    stable = beta * lam_max < 1.0
    click.echo(f"beta: {beta}  beta*lambda_max: {beta * lam_max:.6g}  "
               f"stable: {'yes' if stable else 'no'}")
    if not stable:
        click.echo("warning: beta*lambda_max >= 1, powers may diverge "
                   "(running as negative control)")
    for k in iter_counts:
        if g.n > DEFAULT_CAP:
            raise click.ClickException(f"n={g.n} exceeds spectral cap {DEFAULT_CAP}")
        _, dev = consensus_limit_check(lap, beta, k, enforce_stability=False)
        click.echo(f"iters={k:<6d} deviation_from_block_averaging={dev:.6e}")


if __name__ == "__main__":
    sys.exit(main())
