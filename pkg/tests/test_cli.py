"""Command line behaviour: reproducibility, exit codes, HTTP parity."""

from pathlib import Path

import pytest
import yaml
from click.testing import CliRunner
from fastapi.testclient import TestClient

from reqrank import bundles, generate_synthetic_dataset, prioritize
from reqrank.cli import main
from reqrank.server import create_app
from reqrank.store import ProjectStore


@pytest.fixture()
def runner():
    return CliRunner()


def run_ok(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


@pytest.fixture()
def dataset_dir(tmp_path, runner):
    directory = tmp_path / "ds"
    run_ok(runner, ["generate", str(directory), "--stakeholders", "14",
                    "--requirements", "10", "--roles", "3",
                    "--planted-rank", "2", "--noise-std", "0.2",
                    "--density", "0.8", "--seed", "5"])
    return directory


def carve_incorporate_inputs(tmp_path, dataset_dir):
    """Split the generated dataset into a train bundle plus new-requirement
    files rated by the first six stakeholders."""
    ds = bundles.load_synthetic_dataset(dataset_dir)
    new_ids = ["q009", "q010"]
    train_reqs = tuple(r for r in ds.requirements if r.id not in new_ids)
    bundle = bundles.DatasetBundle(
        ds.roles, ds.stakeholders, train_reqs,
        ds.observed.restrict(requirement_ids=[r.id for r in train_reqs]),
        name="carved")
    project = tmp_path / "proj"
    bundles.save_dataset(bundle, project)
    new_file = tmp_path / "new_reqs.csv"
    new_file.write_text("requirement_id,title,status\n" + "".join(
        f"{rid},Held out {rid},new\n" for rid in new_ids), encoding="utf-8")
    partial = tmp_path / "partial.csv"
    lines = ["stakeholder_id,requirement_id,rating"]
    for s in ds.stakeholders[:6]:
        for rid in new_ids:
            if ds.observed.has(s.id, rid):
                lines.append(f"{s.id},{rid},{ds.observed.value(s.id, rid)}")
    partial.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return project, new_file, partial


INCORPORATE_FLAGS = ["--fraction", "0.5", "--seed", "3", "--n-features", "2",
                     "--learning-rate", "0.02", "--regularization", "0.0",
                     "--max-iterations", "2000", "--convergence-tol", "0"]


# --- generate ---------------------------------------------------------------

def test_generate_writes_complete_dataset(dataset_dir):
    for filename in ["roles.csv", "stakeholders.csv", "requirements.csv",
                     "ratings.csv", "full_ratings.csv", "manifest.yaml"]:
        assert (dataset_dir / filename).is_file()
    ds = bundles.load_synthetic_dataset(dataset_dir)
    assert len(ds.stakeholders) == 14
    assert len(ds.requirements) == 10


def test_generate_same_seed_byte_identical(tmp_path, runner):
    args = ["--stakeholders", "9", "--requirements", "7", "--roles", "2",
            "--seed", "2"]
    run_ok(runner, ["generate", str(tmp_path / "a"), *args])
    run_ok(runner, ["generate", str(tmp_path / "b"), *args])
    for path in sorted((tmp_path / "a").iterdir()):
        assert path.read_bytes() == (tmp_path / "b" / path.name).read_bytes()


def test_generate_bad_params_exit_1(tmp_path, runner):
    result = runner.invoke(main, ["generate", str(tmp_path / "x"),
                                  "--density", "0"])
    assert result.exit_code == 1
    assert "error:" in result.stderr


# --- prioritize -------------------------------------------------------------

def test_prioritize_matches_direct_computation(dataset_dir, runner):
    result = run_ok(runner, ["prioritize", str(dataset_dir)])
    payload = yaml.safe_load(result.stdout)
    bundle = bundles.load_dataset(dataset_dir)
    expected = prioritize(bundle.ratings, bundle.roles, bundle.stakeholders)
    assert [row["requirement_id"] for row in payload["ranking"]] == \
        expected.order()
    for row in payload["ranking"]:
        assert row["importance"] == expected.importances()[row["requirement_id"]]


def test_prioritize_stdout_equals_file_output(dataset_dir, tmp_path, runner):
    result = run_ok(runner, ["prioritize", str(dataset_dir)])
    out_file = tmp_path / "ranking.yaml"
    run_ok(runner, ["prioritize", str(dataset_dir), "--output", str(out_file)])
    assert out_file.read_text(encoding="utf-8") == result.stdout


def test_prioritize_repeat_runs_byte_identical(dataset_dir, runner):
    first = run_ok(runner, ["prioritize", str(dataset_dir)])
    second = run_ok(runner, ["prioritize", str(dataset_dir)])
    assert first.stdout_bytes == second.stdout_bytes


def test_prioritize_broken_bundle_exit_1(tmp_path, runner):
    directory = tmp_path / "broken"
    directory.mkdir()
    (directory / "roles.csv").write_text("role_id,name,rank\nr1,A,1\nr2,B,1\n")
    (directory / "stakeholders.csv").write_text(
        "stakeholder_id,name,role_id,within_role_rank\ns1,A,r1,1\ns2,B,r2,1\n")
    (directory / "requirements.csv").write_text(
        "requirement_id,title,status\nq1,T,elicited\n")
    (directory / "ratings.csv").write_text(
        "stakeholder_id,requirement_id,rating\n")
    result = runner.invoke(main, ["prioritize", str(directory)])
    assert result.exit_code == 1
    assert "not a permutation" in result.stderr


# --- similarity -------------------------------------------------------------

def test_similarity_csv_matches_library(dataset_dir, runner):
    from reqrank import Method, build_relation_matrix, similarity_matrix

    result = run_ok(runner, ["similarity", str(dataset_dir),
                             "--method", "jaccard"])
    lines = result.stdout.strip().splitlines()
    bundle = bundles.load_dataset(dataset_dir)
    sim = similarity_matrix(bundle.ratings,
                            build_relation_matrix(bundle.ratings),
                            Method.JACCARD)
    assert lines[0].split(",")[1:] == list(sim.requirement_ids)
    for i, line in enumerate(lines[1:]):
        fields = line.split(",")
        assert fields[0] == sim.requirement_ids[i]
        assert [float(f) for f in fields[1:]] == list(map(float, sim.values[i]))


def test_similarity_diagonal_is_one(dataset_dir, runner):
    result = run_ok(runner, ["similarity", str(dataset_dir)])
    lines = result.stdout.strip().splitlines()
    for i, line in enumerate(lines[1:]):
        assert float(line.split(",")[i + 1]) == 1.0


# --- incorporate ------------------------------------------------------------

def test_incorporate_reports_and_writes_augmented_bundle(tmp_path, dataset_dir,
                                                         runner):
    project, new_file, partial = carve_incorporate_inputs(tmp_path, dataset_dir)
    out_dir = tmp_path / "augmented"
    result = run_ok(runner, [
        "incorporate", str(project), "--new-requirements", str(new_file),
        "--partial-ratings", str(partial), *INCORPORATE_FLAGS,
        "--output-dir", str(out_dir)])
    payload = yaml.safe_load(result.stdout)
    assert payload["interactions"] == 6
    assert payload["predicted_count"] == len(payload["plan"])
    assert payload["predicted_count"] > 0
    ranked_ids = {row["requirement_id"] for row in payload["ranking"]}
    assert {"q009", "q010"} <= ranked_ids
    saved = bundles.load_dataset(out_dir)
    assert {r.id for r in saved.requirements} == ranked_ids
    predicted = bundles.load_rating_cells(out_dir / bundles.PREDICTED_FILE)
    assert len(predicted) == payload["predicted_count"]
    assert {rid for _, rid in predicted} <= {"q009", "q010"}


def test_incorporate_same_seed_byte_identical(tmp_path, dataset_dir, runner):
    project, new_file, partial = carve_incorporate_inputs(tmp_path, dataset_dir)
    args = ["incorporate", str(project), "--new-requirements", str(new_file),
            "--partial-ratings", str(partial), *INCORPORATE_FLAGS]
    assert run_ok(runner, args).stdout_bytes == run_ok(runner, args).stdout_bytes


def test_incorporate_divergent_learning_rate_exit_2(tmp_path, dataset_dir,
                                                    runner):
    project, new_file, partial = carve_incorporate_inputs(tmp_path, dataset_dir)
    result = runner.invoke(main, [
        "incorporate", str(project), "--new-requirements", str(new_file),
        "--partial-ratings", str(partial), "--learning-rate", "50.0",
        "--regularization", "0.0"])
    assert result.exit_code == 2
    assert "error:" in result.stderr


def test_incorporate_bad_fraction_exit_1(tmp_path, dataset_dir, runner):
    project, new_file, partial = carve_incorporate_inputs(tmp_path, dataset_dir)
    result = runner.invoke(main, [
        "incorporate", str(project), "--new-requirements", str(new_file),
        "--partial-ratings", str(partial), "--fraction", "1.5"])
    assert result.exit_code == 1


# --- evaluate ---------------------------------------------------------------

EVALUATE_FLAGS = ["--train-requirements", "6", "--manual-users", "7",
                  "--new-requirements", "3", "--repeats", "2", "--seed", "9",
                  "--n-features", "2", "--learning-rate", "0.02",
                  "--regularization", "0.0", "--max-iterations", "800",
                  "--convergence-tol", "0"]


def test_evaluate_reports_all_repeats(dataset_dir, runner):
    result = run_ok(runner, ["evaluate", str(dataset_dir), *EVALUATE_FLAGS])
    payload = yaml.safe_load(result.stdout)
    assert payload["setting"]["repeats"] == 2
    assert len(payload["repeats"]) == 2
    assert -1.0 <= payload["mean_correlation"] <= 1.0
    for row in payload["repeats"]:
        assert set(row) == {"correlation", "baseline_correlation", "rmse",
                            "predicted_cells", "users_queried",
                            "users_baseline", "reduction"}


def test_evaluate_same_seed_byte_identical(dataset_dir, runner):
    args = ["evaluate", str(dataset_dir), *EVALUATE_FLAGS]
    assert run_ok(runner, args).stdout_bytes == run_ok(runner, args).stdout_bytes


def test_evaluate_oversized_split_exit_1(dataset_dir, runner):
    result = runner.invoke(main, [
        "evaluate", str(dataset_dir), "--train-requirements", "9",
        "--manual-users", "7", "--new-requirements", "9"])
    assert result.exit_code == 1
    assert "error:" in result.stderr


# --- parity with the HTTP service ------------------------------------------

def test_cli_and_http_rankings_identical(tmp_path, dataset_dir, runner):
    cli_payload = yaml.safe_load(
        run_ok(runner, ["prioritize", str(dataset_dir)]).stdout)
    bundle = bundles.load_dataset(dataset_dir)
    body = {
        "id": "parity",
        "roles": [{"id": r.id, "name": r.display_name, "rank": r.rank}
                  for r in bundle.roles],
        "stakeholders": [{"id": s.id, "name": s.display_name,
                          "role_id": s.role_id,
                          "within_role_rank": s.within_role_rank}
                         for s in bundle.stakeholders],
        "requirements": [{"id": r.id, "title": r.title}
                         for r in bundle.requirements],
        "ratings": [{"stakeholder_id": sid, "requirement_id": rid,
                     "rating": value}
                    for (sid, rid), value in
                    bundle.ratings.elicited_cells().items()],
    }
    with TestClient(create_app(ProjectStore(tmp_path / "store"))) as client:
        response = client.post("/projects", json=body)
        assert response.status_code == 201
        http_ranking = response.json()["ranking"]
    assert [(row["rank"], row["requirement_id"], row["importance"])
            for row in cli_payload["ranking"]] == \
        [(row["rank"], row["requirement_id"], row["importance"])
         for row in http_ranking]


def test_serve_help_mentions_storage_env(runner):
    result = run_ok(runner, ["serve", "--help"])
    assert "REQRANK_STORAGE" in result.output
