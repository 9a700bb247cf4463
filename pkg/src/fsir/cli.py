"""Command line entry point: configuration loading with CLI overrides,
experiment runs, benchmark-table reproduction, the tracing-attack demo,
screening, and CSV ingestion.

Exit codes: 0 success, 2 configuration error, 3 run error.
"""

from __future__ import annotations

import configparser
import dataclasses
import os
import sys

import click
import numpy as np
import pandas as pd

from . import report
from .errors import ConfigError, FsirError
from .experiments import (
    ExperimentConfig,
    estimate_from_csv,
    reproduce_tables,
    run_attack_demo,
    run_experiment,
    run_screening,
)

_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}

_BOOL_FIELDS = {"center", "cov_rescale"}
_OPT_BOOL_FIELDS = {"sparse", "high_dim"}
_INT_FIELDS = {"p", "n", "k", "h", "replications", "seed", "threads"}
_OPT_INT_FIELDS = {"d"}
_FLOAT_FIELDS = {"epsilon", "r", "sigma0", "gamma"}
_OPT_FLOAT_FIELDS = {"epsilon_x", "delta", "threshold"}


def _coerce(name: str, raw: str):
    value = raw.strip()
    if name == "csv":
        return tuple(s.strip() for s in value.split(",") if s.strip())
    if value.lower() in ("none", ""):
        if name in _OPT_BOOL_FIELDS | _OPT_INT_FIELDS | _OPT_FLOAT_FIELDS:
            return None
        raise ConfigError(f"field {name!r} cannot be empty")
    if name in _BOOL_FIELDS | _OPT_BOOL_FIELDS:
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"field {name!r} expects a boolean, got {raw!r}")
    try:
        if name in _INT_FIELDS | _OPT_INT_FIELDS:
            return int(value)
        if name in _FLOAT_FIELDS | _OPT_FLOAT_FIELDS:
            return float(value)
    except ValueError as exc:
        raise ConfigError(f"field {name!r}: {exc}") from exc
    return value


def load_config_file(path: str) -> dict:
    """Key = value file, optionally grouped under a [run] section."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    with open(path) as fh:
        text = fh.read()
    if not text.lstrip().startswith("["):
        text = "[run]\n" + text
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config file: {exc}") from exc
    values = {}
    for section in parser.sections():
        for key, raw in parser[section].items():
            name = key.replace("-", "_")
            if name not in _FIELDS:
                raise ConfigError(f"unknown config field {key!r}")
            values[name] = _coerce(name, raw)
    return values


def build_config(config_path: str | None, overrides: dict) -> ExperimentConfig:
    """Precedence: command line > config file > defaults."""
    values = load_config_file(config_path) if config_path else {}
    for name, value in overrides.items():
        if value is not None:
            values[name] = value
    try:
        config = ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    config.validate()
    return config


def common_options(fn):
    decorators = [
        click.option("--config", "config_path", type=str, default=None, help="Config file."),
        click.option("--seed", type=int, default=None, help="Base seed."),
        click.option("--threads", type=int, default=None, help="Worker threads."),
        click.option("--out", type=str, default="fsir-out", help="Output directory."),
        click.option("--model", type=str, default=None),
        click.option("--p", type=int, default=None),
        click.option("--n", type=int, default=None),
        click.option("--k", type=int, default=None),
        click.option("--h", type=int, default=None),
        click.option("--epsilon", type=float, default=None),
        click.option("--epsilon-x", "epsilon_x", type=float, default=None),
        click.option("--delta", type=float, default=None),
        click.option("--r", type=float, default=None),
        click.option("--sigma0", type=float, default=None),
        click.option("--mechanism", type=click.Choice(["iid", "vgm", "none"]), default=None),
        click.option("--d", type=int, default=None),
        click.option("--sparse/--no-sparse", default=None),
        click.option("--high-dim/--no-high-dim", "high_dim", default=None),
        click.option("--threshold", type=float, default=None),
        click.option("--gamma", type=float, default=None),
        click.option("--vote-unit", "vote_unit", type=click.Choice(["client", "slice"]), default=None),
        click.option("--vgm-bound", "vgm_bound", type=click.Choice(["approx", "exact"]), default=None),
        click.option("--cov-rescale/--no-cov-rescale", "cov_rescale", default=None),
        click.option("--model1", type=click.Choice(["bernoulli", "threshold"]), default=None),
        click.option("--replications", type=int, default=None),
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


def _gather(kwargs) -> tuple[str | None, str, dict]:
    config_path = kwargs.pop("config_path")
    out = kwargs.pop("out")
    return config_path, out, kwargs


@click.group()
def cli():
    """Federated sliced inverse regression with differential privacy."""


@cli.command()
@common_options
def simulate(**kwargs):
    """Run one replicated synthetic experiment and persist the results."""
    config_path, out, overrides = _gather(kwargs)
    config = build_config(config_path, overrides)
    record = run_experiment(config)
    report.write_run_record(record, out)
    click.echo(
        f"model={config.model} n={config.n} K={config.k} mechanism={config.mechanism} "
        f"mean_loss={record.mean:.6f} se={record.se:.6f} "
        f"failed={record.failed} excluded={record.excluded} out={out}"
    )


@cli.command()
@click.option("--table", type=click.IntRange(1, 4), required=True)
@click.option("--models", type=str, default=None, help="Comma-separated model filter.")
@click.option("--sizes", type=str, default=None, help="Comma-separated n (or p) filter.")
@click.option("--ks", type=str, default=None, help="Comma-separated K filter.")
@click.option("--mechanisms", type=str, default=None, help="Comma-separated mechanism filter.")
@click.option("--replications", type=int, default=100)
@click.option("--seed", type=int, default=0)
@click.option("--threads", type=int, default=1)
@click.option("--out", type=str, default="fsir-out")
def tables(table, models, sizes, ks, mechanisms, replications, seed, threads, out):
    """Reproduce one benchmark table and diff against the reported values."""
    frame = reproduce_tables(
        table,
        replications=replications,
        seed=seed,
        threads=threads,
        models=models.split(",") if models else None,
        sizes=[int(s) for s in sizes.split(",")] if sizes else None,
        ks=[int(s) for s in ks.split(",")] if ks else None,
        mechanisms=mechanisms.split(",") if mechanisms else None,
    )
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, f"table{table}.csv")
    report.write_frame(frame, path)
    if not frame.empty:
        report.plot_table(frame, os.path.join(out, f"table{table}.png"))
    click.echo(frame.to_string(index=False))
    click.echo(f"wrote {path}")


@cli.command()
@click.option("--p", type=int, default=13)
@click.option("--n", type=int, default=250)
@click.option("--replications", type=int, default=100)
@click.option("--epsilon", type=float, default=1.0)
@click.option("--r", type=float, default=3.0)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=str, default="fsir-out")
def attack(p, n, replications, epsilon, r, seed, out):
    """Tracing-attack demo: ROC curves for raw, iid, and vgm releases."""
    results = run_attack_demo(
        p=p, n=n, replications=replications, epsilon=epsilon, r=r, seed=seed
    )
    os.makedirs(out, exist_ok=True)
    curves = {}
    for name, res in results.items():
        report.write_roc(res["curve"], os.path.join(out, f"roc_{name}.csv"))
        curves[name] = res["curve"]
    report.plot_roc(curves, os.path.join(out, "roc.png"))
    summary = pd.DataFrame(
        [{"estimator": k, "mean_auc": v["mean_auc"]} for k, v in results.items()]
    )
    report.write_frame(summary, os.path.join(out, "auc_summary.csv"))
    click.echo(
        "AUC " + " ".join(f"{k}={v['mean_auc']:.4f}" for k, v in results.items())
    )


@cli.command()
@common_options
def screen(**kwargs):
    """Run collaborative screening only and emit the active set."""
    config_path, out, overrides = _gather(kwargs)
    config = build_config(config_path, overrides)
    active, votes = run_screening(config)
    os.makedirs(out, exist_ok=True)
    report.write_frame(
        pd.DataFrame({"index": list(active.indices)}), os.path.join(out, "active_set.csv")
    )
    vote_rows = [
        {"client": i, "index": j, "multiplicity": m}
        for i, v in enumerate(votes)
        for j, m in sorted(v.counts.items())
    ]
    report.write_frame(pd.DataFrame(vote_rows), os.path.join(out, "votes.csv"))
    click.echo("active set: " + ",".join(str(j) for j in active.indices))


@cli.command()
@click.option("--csv", "csv_paths", type=str, multiple=True, required=True,
              help="Client dataset CSV; repeat per client.")
@click.option("--response", type=str, default="y")
@click.option("--center/--no-center", default=False)
@click.option("--trace/--no-trace", default=False, help="Write a protocol trace.")
@common_options
def estimate(csv_paths, response, center, trace, **kwargs):
    """Estimate the dimension-reduction subspace from client CSV files."""
    config_path, out, overrides = _gather(kwargs)
    overrides.update(csv=tuple(csv_paths), response=response, center=center)
    config = build_config(config_path, overrides)
    os.makedirs(out, exist_ok=True)
    trace_fh = open(os.path.join(out, "trace.log"), "w") if trace else None
    try:
        est = estimate_from_csv(config, trace=trace_fh)
    finally:
        if trace_fh:
            trace_fh.close()
    frame = pd.DataFrame(
        est.beta, columns=[f"beta{j + 1}" for j in range(est.beta.shape[1])]
    )
    report.write_frame(frame, os.path.join(out, "beta.csv"))
    click.echo(f"estimated dimension d={est.d}; wrote {os.path.join(out, 'beta.csv')}")


def main():
    try:
        cli.main(standalone_mode=False)
    except click.exceptions.Abort:
        sys.exit(130)
    except click.ClickException as exc:
        exc.show()
        sys.exit(2)
    except ConfigError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(2)
    except FsirError as exc:
        click.echo(f"run error: {exc}", err=True)
        sys.exit(3)
    sys.exit(0)


if __name__ == "__main__":
    main()
