"""Command-line entry point: `cdss synth|ingest|train|rank|hybridize|evaluate|
pipeline|serve`. Exit codes: 0 success, 2 validation failure, 1 otherwise."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import pipeline as pl
from .errors import (
    CdssError,
    ConfigError,
    DuplicateIdError,
    FieldValidationError,
    InvalidRecordError,
    MissingColumnError,
    TypeMismatchError,
)

_VALIDATION_ERRORS = (
    ConfigError,
    FieldValidationError,
    MissingColumnError,
    TypeMismatchError,
    DuplicateIdError,
    InvalidRecordError,
)


def _load_cfg(config: str | None, seed: int | None) -> pl.PipelineConfig:
    if config:
        cfg = pl.load_config(config)
    else:
        cfg = pl.parse_config(pl.default_config_doc())
    if seed is not None:
        cfg = pl.PipelineConfig(**{**cfg.__dict__, "seed": seed})
    return cfg


def _run(stage_name: str, fn):
    try:
        return fn()
    except _VALIDATION_ERRORS as e:
        click.echo(f"error ({stage_name}): {e}", err=True)
        sys.exit(2)
    except CdssError as e:
        click.echo(f"error ({stage_name}): {e}", err=True)
        sys.exit(1)


config_opt = click.option("--config", type=click.Path(), default=None, help="pipeline config JSON")
seed_opt = click.option("--seed", type=int, default=None, help="override the config seed")
out_opt = click.option("--out", type=click.Path(), default="artifacts", help="artifact directory")


@click.group()
def main():
    """White-box hybrid diabetes staging: pipeline stages and serving."""


@main.command()
@config_opt
@seed_opt
@out_opt
def synth(config, seed, out):
    """Generate a synthetic cohort CSV from population statistics."""

    def go():
        cfg = _load_cfg(config, seed)
        Path(out).mkdir(parents=True, exist_ok=True)
        pl.stage_synth(cfg, Path(out))

    _run("synth", go)
    click.echo(f"wrote {Path(out) / 'cohort.csv'}")


@main.command()
@config_opt
@seed_opt
@out_opt
@click.option("--csv", "csv_path", type=click.Path(exists=True), required=True)
def ingest(config, seed, out, csv_path):
    """Validate and canonicalize an external cohort CSV."""

    def go():
        cfg = _load_cfg(config, seed)
        cfg = pl.PipelineConfig(**{**cfg.__dict__, "cohort_source": "csv", "csv_path": csv_path})
        Path(out).mkdir(parents=True, exist_ok=True)
        pl.stage_ingest(cfg, Path(out))

    _run("ingest", go)
    click.echo(f"wrote {Path(out) / 'cohort.csv'}")


@main.command()
@config_opt
@seed_opt
@out_opt
def train(config, seed, out):
    """Split the cohort, fit preprocessing, and train one tree per criterion."""
    _run("train", lambda: pl.stage_train(_load_cfg(config, seed), Path(out)))
    click.echo(f"trained candidate models in {out}")


@main.command()
@config_opt
@seed_opt
@out_opt
def rank(config, seed, out):
    """Rank criteria on a validation fold and select the final model."""
    result = _run("rank", lambda: pl.stage_rank(_load_cfg(config, seed), Path(out)))
    click.echo(f"selected {result.get('selected')}")


@main.command()
@config_opt
@seed_opt
@out_opt
def hybridize(config, seed, out):
    """Merge the expert model with the selected learned model."""
    _run("hybridize", lambda: pl.stage_hybridize(_load_cfg(config, seed), Path(out)))
    click.echo(f"wrote {Path(out) / 'rckm.json'}")


@main.command()
@config_opt
@seed_opt
@out_opt
def evaluate(config, seed, out):
    """Evaluate every model on the held-out split and write report.json."""
    _run("evaluate", lambda: pl.stage_evaluate(_load_cfg(config, seed), Path(out)))
    click.echo(f"wrote {Path(out) / 'report.json'}")


@main.command(name="pipeline")
@config_opt
@seed_opt
@out_opt
def pipeline_cmd(config, seed, out):
    """Run every stage end to end."""
    _run("pipeline", lambda: pl.run_pipeline(_load_cfg(config, seed), out))
    click.echo(f"pipeline complete; artifacts in {out}")


@main.command()
@click.option("--model", "model_path", type=click.Path(), default=None,
              help="model file (default: $CDSS_MODEL_PATH)")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(model_path, host, port):
    """Serve the diagnosis HTTP API."""
    from .service import ModelHost, create_app, default_host

    def boot():
        model_host = ModelHost.from_path(model_path) if model_path else default_host()
        app = create_app(model_host)
        import uvicorn

        uvicorn.run(app, host=host, port=port, log_level="info")

    _run("serve", boot)


@main.command(name="init-config")
@click.option("--out", type=click.Path(), default="cdss.config.json")
@seed_opt
def init_config(out, seed):
    """Write a default pipeline config file."""
    doc = pl.default_config_doc(seed=seed if seed is not None else 14)
    Path(out).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    click.echo(f"wrote {out}")


if __name__ == "__main__":
    main()
