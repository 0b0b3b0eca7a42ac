"""Orchestration flow: initial ranking, absorbing new requirements,
prediction-augmented re-prioritization."""

import numpy as np
import pytest

from helpers import make_matrix, make_roles
from reqrank.domain import (
    Provenance,
    RatingCell,
    RatingMatrix,
    Requirement,
    Role,
    Stakeholder,
    Status,
    build_relation_matrix,
    merge_rating_matrices,
)
from reqrank.errors import IntegrityError, NoElicitedData, UnknownStakeholder
from reqrank.evaluation import generate_synthetic_dataset
from reqrank.factors import TrainConfig
from reqrank.influence import prioritize
from reqrank.pipeline import (
    incorporate_new_requirements,
    initial_prioritization,
    interaction_count,
    reprioritize_with_predictions,
)

TIGHT = TrainConfig(n_features=2, learning_rate=0.02, regularization=0.0,
                    max_iterations=4000, convergence_tol=0.0, rng_seed=5)


def requirements(ids, status=Status.ELICITED):
    return [Requirement(rid, rid.upper(), status) for rid in ids]


def two_role_project(n_stake):
    roles = (Role("r1", "R1", 1), Role("r2", "R2", 2))
    stakeholders = tuple(
        Stakeholder(f"s{i + 1:02d}", f"S{i + 1}", "r1" if i % 2 == 0 else "r2",
                    i // 2 + 1)
        for i in range(n_stake))
    return roles, stakeholders


def test_initial_state_with_no_ratings():
    roles, stakeholders = two_role_project(4)
    sids = tuple(s.id for s in stakeholders)
    state = initial_prioritization(
        roles, stakeholders, requirements(["qb", "qa"]),
        make_matrix(sids, ["qb", "qa"], {}))
    assert state.revision == 1
    assert state.ranking.order() == ["qa", "qb"]
    assert all(item.importance == 0.0 for item in state.ranking.items)


def test_single_requirement_always_rank_one():
    roles, stakeholders = two_role_project(2)
    sids = tuple(s.id for s in stakeholders)
    state = initial_prioritization(
        roles, stakeholders, requirements(["q1"]),
        make_matrix(sids, ["q1"], {("s01", "q1"): 5}))
    assert state.ranking.rank_of("q1") == 1


def test_initial_ranking_matches_direct_prioritization():
    ds = generate_synthetic_dataset(40, 50, n_roles=5, seed=2)
    state = initial_prioritization(ds.roles, ds.stakeholders, ds.requirements,
                                   ds.observed)
    direct = prioritize(ds.observed, ds.roles, ds.stakeholders)
    assert state.ranking.order() == direct.order()


def test_initial_rejects_new_requirements():
    roles, stakeholders = two_role_project(2)
    sids = tuple(s.id for s in stakeholders)
    with pytest.raises(IntegrityError):
        initial_prioritization(roles, stakeholders,
                               requirements(["q1"], Status.NEW),
                               make_matrix(sids, ["q1"], {}))


def test_initial_rejects_universe_mismatch():
    roles, stakeholders = two_role_project(2)
    with pytest.raises(IntegrityError):
        initial_prioritization(roles, stakeholders, requirements(["q1"]),
                               make_matrix(["s99"], ["q1"], {}))


def seeded_project():
    """Small elicited project plus one incoming requirement."""
    roles, stakeholders = two_role_project(6)
    sids = tuple(s.id for s in stakeholders)
    cells = {(sid, rid): 1 + (i + j) % 5
             for i, sid in enumerate(sids) for j, rid in enumerate(["q1", "q2", "q3"])
             if (i + j) % 4 != 0}
    state = initial_prioritization(roles, stakeholders,
                                   requirements(["q1", "q2", "q3"]),
                                   make_matrix(sids, ["q1", "q2", "q3"], cells))
    return state, sids


def test_incorporate_validates_inputs():
    state, sids = seeded_project()
    partial = make_matrix(sids[:2], ["qn"], {(sids[0], "qn"): 3})
    with pytest.raises(IntegrityError):  # status must be new
        incorporate_new_requirements(state, requirements(["qn"]), partial, 0.5, TIGHT)
    with pytest.raises(IntegrityError):  # columns must equal the new set
        incorporate_new_requirements(state, requirements(["qx"], Status.NEW),
                                     partial, 0.5, TIGHT)
    stranger = make_matrix(["s99"], ["qn"], {("s99", "qn"): 3})
    with pytest.raises(UnknownStakeholder):
        incorporate_new_requirements(state, requirements(["qn"], Status.NEW),
                                     stranger, 0.5, TIGHT)


def test_incorporate_without_missing_cells_skips_prediction():
    state, sids = seeded_project()
    full_column = make_matrix(sids, ["qn"], {(sid, "qn"): 4 for sid in sids})
    result = incorporate_new_requirements(state, requirements(["qn"], Status.NEW),
                                          full_column, 1.0, TIGHT)
    assert result.predicted_count == 0
    assert result.cost_report is None
    expected = prioritize(merge_rating_matrices(state.ratings, full_column),
                          state.roles, state.stakeholders)
    assert result.ranking.order() == expected.order()


def test_incorporate_fills_only_planned_cells():
    state, sids = seeded_project()
    partial = make_matrix(sids[:3], ["qn"], {(sid, "qn"): 4 for sid in sids[:3]})
    result = incorporate_new_requirements(state, requirements(["qn"], Status.NEW),
                                          partial, 0.5, TIGHT)
    ratings = result.state.ratings
    predicted = set(ratings.predicted_cells())
    assert predicted == set(result.plan.cells)
    # the three elicited ratings survive untouched
    for sid in sids[:3]:
        assert ratings.provenance(sid, "qn") is Provenance.ELICITED
        assert ratings.value(sid, "qn") == 4.0
    # plan covers half of the six missing cells, rounded up
    assert result.predicted_count == 2  # ceil(0.5 * 3) of the remaining 3
    assert result.interactions == 3


def test_incorporate_flips_status_and_bumps_revision():
    state, sids = seeded_project()
    partial = make_matrix(sids[:2], ["qn"], {(sids[0], "qn"): 2})
    result = incorporate_new_requirements(state, requirements(["qn"], Status.NEW),
                                          partial, 0.25, TIGHT)
    assert result.state.revision == state.revision + 1
    assert result.state.new_requirement_ids() == ()
    assert {r.id for r in result.state.requirements} == {"q1", "q2", "q3", "qn"}
    assert len(result.ranking) == 4


def test_likelihoods_cover_all_missing_new_cells():
    state, sids = seeded_project()
    partial = make_matrix(sids[:2], ["qn"], {(sids[0], "qn"): 2})
    result = incorporate_new_requirements(state, requirements(["qn"], Status.NEW),
                                          partial, 0.25, TIGHT)
    missing = {(sid, "qn") for sid in sids} - {(sids[0], "qn")}
    assert {(ls.stakeholder_id, ls.requirement_id)
            for ls in result.likelihoods} == missing
    scores = [ls.score for ls in result.likelihoods]
    assert scores == sorted(scores, reverse=True)


def test_relation_stays_consistent_after_incorporate():
    state, sids = seeded_project()
    partial = make_matrix(sids[:2], ["qn"], {(sids[0], "qn"): 2})
    result = incorporate_new_requirements(state, requirements(["qn"], Status.NEW),
                                          partial, 1.0, TIGHT)
    after = result.state
    assert after.relation.pairs == build_relation_matrix(after.ratings).pairs


def test_no_elicited_data_is_rejected():
    roles, stakeholders = two_role_project(4)
    sids = tuple(s.id for s in stakeholders)
    state = initial_prioritization(roles, stakeholders, requirements(["q1", "q2"]),
                                   make_matrix(sids, ["q1", "q2"], {}))
    empty_partial = make_matrix(sids, ["qn"], {})
    with pytest.raises(NoElicitedData):
        incorporate_new_requirements(state, requirements(["qn"], Status.NEW),
                                     empty_partial, 0.5, TIGHT)


def test_interaction_count_rules():
    ratings = make_matrix(["s1", "s2", "s3"], ["n1", "n2"],
                          {("s1", "n1"): 1, ("s2", "n1"): 2, ("s1", "n2"): 3})
    assert interaction_count(ratings, ["n1", "n2"]) == 2
    assert interaction_count(ratings, ["n2"]) == 1
    assert interaction_count(make_matrix(["s1"], ["n1"], {}), ["n1"]) == 0
    predicted = make_matrix(["s1"], ["n1"], {}).with_predicted({("s1", "n1"): 1.0})
    assert interaction_count(predicted, ["n1"]) == 0


def test_thirty_five_raters_count_as_thirty_five():
    sids = [f"s{i:02d}" for i in range(40)]
    cells = {(sid, "n1"): 3 for sid in sids[:35]}
    assert interaction_count(make_matrix(sids, ["n1"], cells), ["n1"]) == 35


def test_interactions_bounded_by_subset_and_universe():
    ds = generate_synthetic_dataset(20, 14, n_roles=3, density=0.7, seed=9)
    sids = tuple(s.id for s in ds.stakeholders)
    rids = tuple(r.id for r in ds.requirements)
    req = {r.id: r for r in ds.requirements}
    train_ids, new_ids = rids[:10], rids[10:]
    state = initial_prioritization(ds.roles, ds.stakeholders,
                                   [req[r] for r in train_ids],
                                   ds.observed.restrict(sids, train_ids))
    manual = sids[:7]
    partial = ds.observed.restrict(manual, new_ids)
    result = incorporate_new_requirements(
        state, [Requirement(r, r, Status.NEW) for r in new_ids], partial, 0.5,
        TIGHT)
    full_raters = interaction_count(ds.observed, new_ids)
    assert result.interactions <= len(manual)
    assert result.interactions <= full_raters


def test_reprioritizing_unchanged_matrix_is_idempotent():
    state, sids = seeded_project()
    partial = make_matrix(sids[:2], ["qn"], {(sids[0], "qn"): 2})
    result = incorporate_new_requirements(state, requirements(["qn"], Status.NEW),
                                          partial, 1.0, TIGHT)
    again = prioritize(result.state.ratings, state.roles, state.stakeholders)
    assert again.order() == result.ranking.order()
    assert again.importances() == result.ranking.importances()


def test_full_fraction_perfect_model_matches_full_elicitation():
    """With every missing cell predicted by a model that reproduces the
    noise-free planted matrix, the augmented ranking equals the ranking that
    full elicitation of the new requirements would have produced."""
    ds = generate_synthetic_dataset(20, 16, n_roles=4, planted_rank=2,
                                    noise_std=0.0, density=0.8, seed=3)
    sids = tuple(s.id for s in ds.stakeholders)
    rids = tuple(r.id for r in ds.requirements)
    req = {r.id: r for r in ds.requirements}
    train_ids, new_ids = rids[:12], rids[12:]
    state = initial_prioritization(ds.roles, ds.stakeholders,
                                   [req[r] for r in train_ids],
                                   ds.observed.restrict(sids, train_ids))
    partial = ds.observed.restrict(sids[:8], new_ids)
    result = incorporate_new_requirements(
        state, [Requirement(r, req[r].title, Status.NEW) for r in new_ids],
        partial, 1.0, TIGHT)
    fully_elicited = merge_rating_matrices(state.ratings,
                                           ds.full.restrict(sids, new_ids))
    expected = prioritize(fully_elicited, ds.roles, ds.stakeholders)
    assert result.ranking.order() == expected.order()


def test_duplicated_column_lands_adjacent():
    """A new requirement rated exactly like an elicited one ends up next to it."""
    rng = np.random.default_rng(11)
    n_stake, n_req, rank = 18, 12, 2
    grid = rng.uniform(0, 1, (n_stake, rank)) @ rng.uniform(0, 1, (n_req, rank)).T
    grid = 5.0 * (grid / grid.max())
    grid[:, -1] = grid[:, 3]
    roles, stakeholders = two_role_project(n_stake)
    sids = tuple(s.id for s in stakeholders)
    rids = tuple(f"q{j + 1:02d}" for j in range(n_req))
    train_ids, new_id = rids[:-1], rids[-1]
    cells = {(sids[i], train_ids[j]): RatingCell(float(grid[i, j]))
             for i in range(n_stake) for j in range(len(train_ids))}
    state = initial_prioritization(
        roles, stakeholders, requirements(train_ids),
        RatingMatrix(sids, train_ids, cells))
    manual = sids[:6]
    partial = RatingMatrix(manual, (new_id,),
                           {(sid, new_id): RatingCell(float(grid[sids.index(sid), -1]))
                            for sid in manual})
    result = incorporate_new_requirements(
        state, [Requirement(new_id, "copycat", Status.NEW)], partial, 1.0, TIGHT)
    assert abs(result.ranking.rank_of(new_id) - result.ranking.rank_of("q04")) == 1


def test_reprioritize_accepts_premerged_state():
    state, sids = seeded_project()
    partial = make_matrix(sids[:2], ["qn"], {(sids[0], "qn"): 2})
    merged = merge_rating_matrices(state.ratings, partial)
    from reqrank.pipeline import ProjectState
    premerged = ProjectState(state.roles, state.stakeholders,
                             state.requirements + tuple(requirements(["qn"], Status.NEW)),
                             merged, build_relation_matrix(merged),
                             state.ranking, state.revision)
    direct = incorporate_new_requirements(state, requirements(["qn"], Status.NEW),
                                          partial, 0.5, TIGHT)
    staged = reprioritize_with_predictions(premerged, 0.5, TIGHT)
    assert staged.ranking.order() == direct.ranking.order()
    assert staged.plan.cells == direct.plan.cells
