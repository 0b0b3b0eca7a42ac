"""Command line entry points.

    reqrank prioritize DIR            rank a dataset bundle
    reqrank similarity DIR            requirement-requirement similarity (CSV)
    reqrank incorporate DIR ...       absorb new requirements, predict, re-rank
    reqrank evaluate DIR ...          repeated hold-out experiment on a
                                      generated dataset
    reqrank generate DIR ...          write a synthetic dataset bundle
    reqrank serve                     run the HTTP service

Exit codes: 0 success, 1 validation error (bad input data or parameters),
2 runtime error (divergence, storage or I/O failure). All outputs are
deterministic for a fixed seed: running the same command twice produces
byte-identical files and stdout.
"""

from __future__ import annotations

import csv
import functools
import io
import sys
from pathlib import Path

import click
import yaml

from . import bundles
from .domain import RatingCell, RatingMatrix, Status, build_relation_matrix
from .errors import BindError, Divergence, ReqRankError, StorageError
from .evaluation import (
    ExperimentReport,
    ExperimentSetting,
    generate_synthetic_dataset,
    run_experiment,
)
from .factors import TrainConfig
from .influence import RankedList, prioritize
from .pipeline import IncorporateResult, incorporate_new_requirements, initial_prioritization
from .similarity import Method, similarity_matrix

_RUNTIME_ERRORS = (Divergence, StorageError, BindError)


def _fail(exc: Exception, exit_code: int) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(exit_code)


def catch_errors(fn):
    """Map errors onto the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _RUNTIME_ERRORS as exc:
            _fail(exc, 2)
        except ReqRankError as exc:
            _fail(exc, 1)
        except OSError as exc:
            _fail(exc, 2)

    return wrapper


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _yaml(data) -> str:
    return yaml.safe_dump(data, sort_keys=False)


def _ranking_rows(ranking: RankedList, titles: dict[str, str]) -> list[dict]:
    return [{"rank": item.rank, "requirement_id": item.requirement_id,
             "title": titles.get(item.requirement_id, ""),
             "importance": float(item.importance)}
            for item in ranking.items]


def train_options(fn):
    options = [
        click.option("--n-features", type=int, default=TrainConfig.n_features,
                     show_default=True, help="Latent factors per side."),
        click.option("--learning-rate", type=float,
                     default=TrainConfig.learning_rate, show_default=True),
        click.option("--regularization", type=float,
                     default=TrainConfig.regularization, show_default=True),
        click.option("--max-iterations", type=int,
                     default=TrainConfig.max_iterations, show_default=True),
        click.option("--convergence-tol", type=float,
                     default=TrainConfig.convergence_tol, show_default=True),
        click.option("--init-half-width", type=float,
                     default=TrainConfig.init_half_width, show_default=True),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _train_config(n_features, learning_rate, regularization, max_iterations,
                  convergence_tol, init_half_width, seed) -> TrainConfig:
    return TrainConfig(n_features=n_features, learning_rate=learning_rate,
                       regularization=regularization,
                       max_iterations=max_iterations,
                       convergence_tol=convergence_tol,
                       init_half_width=init_half_width, rng_seed=seed)


@click.group()
@click.version_option(package_name="reqrank")
def main():
    """Stakeholder-weighted requirements prioritization."""


@main.command("prioritize")
@click.argument("bundle_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--output", type=click.Path(dir_okay=False), default=None,
              help="Write YAML here instead of stdout.")
@catch_errors
def cmd_prioritize(bundle_dir, output):
    """Rank the elicited requirements of a dataset bundle."""
    bundle = bundles.load_dataset(bundle_dir)
    elicited = tuple(r for r in bundle.requirements
                     if r.status is Status.ELICITED)
    ranking = prioritize(
        bundle.ratings.restrict(requirement_ids=[r.id for r in elicited]),
        bundle.roles, bundle.stakeholders)
    titles = {r.id: r.title for r in bundle.requirements}
    _emit(_yaml({"dataset": bundle.name or str(bundle_dir),
                 "ranking": _ranking_rows(ranking, titles)}), output)


@main.command("similarity")
@click.argument("bundle_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--method", type=click.Choice([m.value for m in Method]),
              default=Method.PEARSON_BINARY.value, show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), default=None)
@catch_errors
def cmd_similarity(bundle_dir, method, output):
    """Requirement-requirement similarity matrix as CSV."""
    bundle = bundles.load_dataset(bundle_dir)
    sim = similarity_matrix(bundle.ratings, build_relation_matrix(bundle.ratings),
                            Method(method))
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["requirement_id", *sim.requirement_ids])
    for i, rid in enumerate(sim.requirement_ids):
        writer.writerow([rid, *(repr(float(v)) for v in sim.values[i])])
    _emit(buffer.getvalue(), output)


@main.command("incorporate")
@click.argument("bundle_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--new-requirements", "new_requirements_file", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="CSV (requirement_id,title,status) with status 'new'.")
@click.option("--partial-ratings", "partial_ratings_file", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="CSV (stakeholder_id,requirement_id,rating) on the new "
                   "requirements.")
@click.option("--fraction", type=float, default=0.25, show_default=True,
              help="Fraction of missing new-requirement cells to predict.")
@click.option("--method", type=click.Choice([m.value for m in Method]),
              default=Method.PEARSON_BINARY.value, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for the factor initialization.")
@train_options
@click.option("--output", type=click.Path(dir_okay=False), default=None)
@click.option("--output-dir", type=click.Path(file_okay=False), default=None,
              help="Also write the augmented bundle here.")
@catch_errors
def cmd_incorporate(bundle_dir, new_requirements_file, partial_ratings_file,
                    fraction, method, seed, n_features, learning_rate,
                    regularization, max_iterations, convergence_tol,
                    init_half_width, output, output_dir):
    """Merge new requirements, predict likely ratings, re-prioritize."""
    bundle = bundles.load_dataset(bundle_dir)
    state = initial_prioritization(bundle.roles, bundle.stakeholders,
                                   bundle.requirements, bundle.ratings)
    new_reqs = bundles.load_requirements(
        Path(new_requirements_file).parent, Path(new_requirements_file).name)
    cells = bundles.load_rating_cells(Path(partial_ratings_file))
    partial = RatingMatrix(bundle.ratings.stakeholder_ids,
                           tuple(r.id for r in new_reqs),
                           {key: RatingCell(v) for key, v in cells.items()},
                           bundle.ratings.scale_min, bundle.ratings.scale_max)
    config = _train_config(n_features, learning_rate, regularization,
                           max_iterations, convergence_tol, init_half_width,
                           seed)
    result = incorporate_new_requirements(state, new_reqs, partial, fraction,
                                          config, Method(method))
    titles = {r.id: r.title for r in result.state.requirements}
    report = {
        "dataset": bundle.name or str(bundle_dir),
        "fraction": fraction,
        "interactions": result.interactions,
        "predicted_count": result.predicted_count,
        "training": None if result.cost_report is None else {
            "converged": result.cost_report.converged,
            "iterations": result.cost_report.iterations_used,
            "final_cost": float(result.cost_report.final_cost)},
        "plan": [{"stakeholder_id": sid, "requirement_id": rid}
                 for sid, rid in result.plan.cells],
        "ranking": _ranking_rows(result.ranking, titles),
    }
    _emit(_yaml(report), output)
    if output_dir:
        _save_state(result, output_dir, bundle.name)


def _save_state(result: IncorporateResult, output_dir: str,
                name: str | None) -> None:
    state = result.state
    augmented = bundles.DatasetBundle(state.roles, state.stakeholders,
                                      state.requirements, state.ratings,
                                      name=name)
    bundles.save_dataset(augmented, output_dir)
    bundles.save_rating_cells(Path(output_dir) / bundles.PREDICTED_FILE,
                              state.ratings.predicted_cells())


@main.command("evaluate")
@click.argument("dataset_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--train-requirements", type=int, required=True,
              help="Requirements treated as already elicited.")
@click.option("--manual-users", type=int, required=True,
              help="Stakeholders who rate the held-out requirements by hand.")
@click.option("--new-requirements", "n_new", type=int, required=True,
              help="Requirements held out and re-introduced as new.")
@click.option("--fraction", type=float, default=0.25, show_default=True)
@click.option("--repeats", type=int, default=30, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@train_options
@click.option("--output", type=click.Path(dir_okay=False), default=None)
@catch_errors
def cmd_evaluate(dataset_dir, train_requirements, manual_users, n_new,
                 fraction, repeats, seed, n_features, learning_rate,
                 regularization, max_iterations, convergence_tol,
                 init_half_width, output):
    """Hold-out experiment against a generated dataset's ground truth."""
    dataset = bundles.load_synthetic_dataset(dataset_dir)
    setting = ExperimentSetting(
        n_train_requirements=train_requirements, n_manual_users=manual_users,
        n_new_requirements=n_new, prediction_fraction=fraction,
        repeats=repeats, rng_seed=seed,
        train=_train_config(n_features, learning_rate, regularization,
                            max_iterations, convergence_tol, init_half_width,
                            seed))
    report = run_experiment(dataset, setting)
    _emit(_yaml(_report_dict(report)), output)


def _report_dict(report: ExperimentReport) -> dict:
    setting = report.setting
    return {
        "setting": {
            "train_requirements": setting.n_train_requirements,
            "manual_users": setting.n_manual_users,
            "new_requirements": setting.n_new_requirements,
            "fraction": setting.prediction_fraction,
            "repeats": setting.repeats,
            "seed": setting.rng_seed,
        },
        "mean_correlation": float(report.mean_correlation),
        "correlation_variance": float(report.correlation_variance),
        "mean_baseline_correlation": float(report.mean_baseline_correlation),
        "mean_rmse": float(report.mean_rmse),
        "mean_reduction": float(report.mean_reduction),
        "repeats": [{
            "correlation": float(o.correlation),
            "baseline_correlation": float(o.baseline_correlation),
            "rmse": float(o.rmse),
            "predicted_cells": o.predicted_cells,
            "users_queried": o.users_queried,
            "users_baseline": o.users_baseline,
            "reduction": float(o.reduction),
        } for o in report.outcomes],
    }


@main.command("generate")
@click.argument("output_dir", type=click.Path(file_okay=False))
@click.option("--stakeholders", type=int, default=62, show_default=True)
@click.option("--requirements", type=int, default=82, show_default=True)
@click.option("--roles", type=int, default=5, show_default=True)
@click.option("--planted-rank", type=int, default=3, show_default=True)
@click.option("--noise-std", type=float, default=0.5, show_default=True)
@click.option("--density", type=float, default=0.6, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--scale-min", type=float, default=0.0, show_default=True)
@click.option("--scale-max", type=float, default=5.0, show_default=True)
@catch_errors
def cmd_generate(output_dir, stakeholders, requirements, roles, planted_rank,
                 noise_std, density, seed, scale_min, scale_max):
    """Write a synthetic dataset with known complete ratings."""
    dataset = generate_synthetic_dataset(
        n_stakeholders=stakeholders, n_requirements=requirements,
        n_roles=roles, planted_rank=planted_rank, noise_std=noise_std,
        density=density, seed=seed, scale_min=scale_min, scale_max=scale_max)
    bundles.save_synthetic_dataset(dataset, output_dir)
    click.echo(f"wrote {stakeholders} stakeholders x {requirements} "
               f"requirements to {output_dir}")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--storage", envvar="REQRANK_STORAGE",
              type=click.Path(file_okay=False), default="reqrank_projects",
              show_default=True,
              help="Project storage root (env: REQRANK_STORAGE).")
@catch_errors
def cmd_serve(host, port, storage):
    """Run the HTTP service."""
    import uvicorn

    from .server import create_app
    from .store import ProjectStore

    app = create_app(ProjectStore(storage))
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as exc:
        raise BindError(f"cannot bind {host}:{port}: {exc}") from None


if __name__ == "__main__":
    main()
