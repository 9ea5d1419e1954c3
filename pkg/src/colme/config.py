"""Experiment config files: flat INI-style key/value text with sections.

Example::

    [experiment]
    n = 200
    class_means = 1.2, 2.0
    sigma = 2.0
    horizon = 5000
    replications = 10
    seed = 42
    variants = local, oracle, c-colme, cl-colme
    prune_every = 1

    [graph]
    max_degree = 10

    [estimators]
    delta = 0.01
    beta = 0.1          # a number, or "auto" for the spectral bound
    beta_safety = 0.9
    t_ramp = 50

Only [experiment] n/class_means/sigma/horizon and [graph] max_degree are
required; everything else has the defaults shown by ``render_config``.
"""

from __future__ import annotations

import configparser
from pathlib import Path

from .harness import ALL_VARIANTS, ExperimentConfig


class ConfigError(ValueError):
    """Invalid or missing configuration; message names the offending field."""


def _get(parser, section, key, convert, default=...):
    if not parser.has_option(section, key):
        if default is ...:
            raise ConfigError(f"missing required field {section}.{key}")
        return default
    raw = parser.get(section, key).strip()
    try:
        return convert(raw)
    except (ValueError, TypeError):
        raise ConfigError(f"field {section}.{key} has invalid value {raw!r}")


def _float_list(raw: str) -> tuple:
    vals = tuple(float(p) for p in raw.replace(",", " ").split())
    if not vals:
        raise ValueError("empty list")
    return vals


def _str_list(raw: str) -> tuple:
    vals = tuple(p.strip() for p in raw.split(",") if p.strip())
    if not vals:
        raise ValueError("empty list")
    return vals


def _beta(raw: str):
    return raw if raw == "auto" else float(raw)


def load_experiment_config(path) -> ExperimentConfig:
    """Parse and validate a config file; raises ConfigError naming the field."""
    path = Path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}")

    cfg = ExperimentConfig(
        n=_get(parser, "experiment", "n", int),
        class_means=_get(parser, "experiment", "class_means", _float_list),
        sigma=_get(parser, "experiment", "sigma", float),
        horizon=_get(parser, "experiment", "horizon", int),
        replications=_get(parser, "experiment", "replications", int, 1),
        seed=_get(parser, "experiment", "seed", int, 0),
        variants=_get(parser, "experiment", "variants", _str_list, ALL_VARIANTS),
        prune_every=_get(parser, "experiment", "prune_every", int, 1),
        max_degree=_get(parser, "graph", "max_degree", int),
        delta=_get(parser, "estimators", "delta", float, 0.01),
        beta=_get(parser, "estimators", "beta", _beta, 0.1),
        beta_safety=_get(parser, "estimators", "beta_safety", float, 0.9),
        t_ramp=_get(parser, "estimators", "t_ramp", int, 50),
    )
    try:
        return cfg.validate()
    except ValueError as exc:
        raise ConfigError(str(exc))


def render_config(cfg: ExperimentConfig) -> str:
    """Config file text that reproduces ``cfg`` through load_experiment_config."""
    means = ", ".join(repr(m) for m in cfg.class_means)
    variants = ", ".join(cfg.variants)
    return (
        "[experiment]\n"
        f"n = {cfg.n}\n"
        f"class_means = {means}\n"
        f"sigma = {cfg.sigma!r}\n"
        f"horizon = {cfg.horizon}\n"
        f"replications = {cfg.replications}\n"
        f"seed = {cfg.seed}\n"
        f"variants = {variants}\n"
        f"prune_every = {cfg.prune_every}\n"
        "\n[graph]\n"
        f"max_degree = {cfg.max_degree}\n"
        "\n[estimators]\n"
        f"delta = {cfg.delta!r}\n"
        f"beta = {cfg.beta if isinstance(cfg.beta, str) else repr(cfg.beta)}\n"
        f"beta_safety = {cfg.beta_safety!r}\n"
        f"t_ramp = {cfg.t_ramp}\n"
    )
