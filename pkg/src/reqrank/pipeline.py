"""Project-level flow: prioritize, absorb new requirements, re-prioritize.

When new requirements arrive with ratings from only a subset of stakeholders,
the flow merges them in, scores how likely every silent stakeholder is to
have an opinion (via requirement similarity), predicts ratings for the most
likely cells with the latent-factor model, and re-ranks everything on the
augmented matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import factors, selector
from .domain import (
    Provenance,
    RatingCell,
    RatingMatrix,
    RelationMatrix,
    Requirement,
    Role,
    Stakeholder,
    Status,
    build_relation_matrix,
    merge_rating_matrices,
)
from .errors import IntegrityError, NoElicitedData, UnknownStakeholder
from .influence import RankedList, prioritize
from .similarity import Method, similarity_matrix


@dataclass(frozen=True)
class ProjectState:
    roles: tuple[Role, ...]
    stakeholders: tuple[Stakeholder, ...]
    requirements: tuple[Requirement, ...]
    ratings: RatingMatrix
    relation: RelationMatrix
    ranking: RankedList
    revision: int

    def stakeholder_ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.stakeholders)

    def requirement_ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.requirements)

    def new_requirement_ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.requirements if r.status is Status.NEW)


@dataclass(frozen=True)
class IncorporateResult:
    state: ProjectState
    plan: selector.PredictionPlan
    likelihoods: tuple[selector.LikelihoodScore, ...]
    cost_report: factors.CostReport | None
    interactions: int

    @property
    def ranking(self) -> RankedList:
        return self.state.ranking

    @property
    def predicted_count(self) -> int:
        return len(self.plan.cells)


def initial_prioritization(roles: Sequence[Role], stakeholders: Sequence[Stakeholder],
                           requirements: Sequence[Requirement],
                           ratings: RatingMatrix) -> ProjectState:
    """First full ranking of the elicited requirements; revision 1."""
    for req in requirements:
        if req.status is not Status.ELICITED:
            raise IntegrityError(
                f"requirement {req.id} has status {req.status.value!r}; "
                "initial prioritization expects elicited requirements only")
    _check_universe_match(ratings, stakeholders, requirements)
    ranking = prioritize(ratings, roles, stakeholders)
    return ProjectState(tuple(roles), tuple(stakeholders), tuple(requirements),
                        ratings, build_relation_matrix(ratings), ranking, revision=1)


def incorporate_new_requirements(state: ProjectState,
                                 new_reqs: Sequence[Requirement],
                                 partial_ratings: RatingMatrix,
                                 fraction: float,
                                 train_config: factors.TrainConfig,
                                 similarity_method: Method = Method.PEARSON_BINARY,
                                 ) -> IncorporateResult:
    """Merge the new requirements' partial ratings, predict the most likely
    missing cells, and re-prioritize the whole project."""
    new_ids = [r.id for r in new_reqs]
    for req in new_reqs:
        if req.status is not Status.NEW:
            raise IntegrityError(f"requirement {req.id} must have status 'new'")
    if set(partial_ratings.requirement_ids) != set(new_ids):
        raise IntegrityError(
            "partial ratings must cover exactly the new requirements; "
            f"got columns {sorted(partial_ratings.requirement_ids)}")
    known = set(state.stakeholder_ids())
    strangers = [s for s in partial_ratings.stakeholder_ids if s not in known]
    if strangers:
        raise UnknownStakeholder(f"raters outside the project: {sorted(strangers)}")

    merged = merge_rating_matrices(state.ratings, partial_ratings)
    merged_state = ProjectState(state.roles, state.stakeholders,
                                state.requirements + tuple(new_reqs),
                                merged, build_relation_matrix(merged),
                                state.ranking, state.revision)
    return reprioritize_with_predictions(merged_state, fraction, train_config,
                                         similarity_method)


def reprioritize_with_predictions(state: ProjectState, fraction: float,
                                  train_config: factors.TrainConfig,
                                  similarity_method: Method = Method.PEARSON_BINARY,
                                  ) -> IncorporateResult:
    """Prediction and re-ranking over a state whose new requirements (and
    their partial ratings) are already merged in."""
    new_ids = state.new_requirement_ids()
    ratings = state.ratings
    if not ratings.elicited_cells():
        raise NoElicitedData("the merged matrix has no elicited ratings")

    likelihoods = compute_likelihoods(state, new_ids, similarity_method)
    plan = selector.build_prediction_plan(likelihoods, fraction)

    cost_report = None
    if plan.cells:
        augmented, cost_report = _fill_predictions(ratings, plan, train_config)
    else:
        augmented = ratings

    requirements = tuple(r.as_elicited() for r in state.requirements)
    ranking = prioritize(augmented, state.roles, state.stakeholders)
    next_state = ProjectState(state.roles, state.stakeholders, requirements,
                              augmented, build_relation_matrix(augmented),
                              ranking, state.revision + 1)
    return IncorporateResult(next_state, plan, tuple(likelihoods), cost_report,
                             interactions=interaction_count(ratings, new_ids))


def compute_likelihoods(state: ProjectState, new_ids: Sequence[str],
                        similarity_method: Method = Method.PEARSON_BINARY,
                        ) -> list[selector.LikelihoodScore]:
    """Rating likelihood of every missing cell of the given new requirements."""
    if not new_ids:
        return []
    elicited_ids = [r.id for r in state.requirements if r.status is Status.ELICITED]
    sim = similarity_matrix(state.ratings, state.relation, similarity_method)
    return selector.score_missing_cells(new_ids, sim, state.relation, elicited_ids)


def interaction_count(ratings: RatingMatrix, requirement_ids: Iterable[str]) -> int:
    """Distinct stakeholders who gave at least one elicited rating on the
    given requirements."""
    wanted = set(requirement_ids)
    return len({sid for (sid, rid), cell in ratings.cells.items()
                if rid in wanted and cell.provenance is Provenance.ELICITED})


def _fill_predictions(ratings: RatingMatrix, plan: selector.PredictionPlan,
                      config: factors.TrainConfig):
    """Train on the elicited cells only and fill the planned cells with
    clamped predictions; elicited data is never overwritten."""
    elicited_only = RatingMatrix(
        ratings.stakeholder_ids, ratings.requirement_ids,
        {key: RatingCell(value) for key, value in ratings.elicited_cells().items()},
        ratings.scale_min, ratings.scale_max)
    model = factors.init_factors(ratings.stakeholder_ids, ratings.requirement_ids,
                                 config)
    model, report = factors.train(model, elicited_only, config)
    predictions = {cell: factors.predict_rating(model, cell[0], cell[1], ratings.scale)
                   for cell in plan.cells}
    return ratings.with_predicted(predictions), report


def _check_universe_match(ratings: RatingMatrix, stakeholders: Sequence[Stakeholder],
                          requirements: Sequence[Requirement]) -> None:
    if set(ratings.stakeholder_ids) - {s.id for s in stakeholders}:
        raise IntegrityError("rating matrix references stakeholders outside the project")
    if set(ratings.requirement_ids) - {r.id for r in requirements}:
        raise IntegrityError("rating matrix references requirements outside the project")
