"""HTTP API over project storage.

Endpoints (all JSON; every successful response carries ``revision``):

    POST /projects                                create a project
    GET  /projects/{pid}/ranking                  current ranked list
    POST /projects/{pid}/requirements             add new (unranked) requirements
    PUT  /projects/{pid}/ratings                  batch elicited ratings
    GET  /projects/{pid}/requirements/{rid}/likelihoods
    POST /projects/{pid}/incorporate              predict + re-prioritize
    GET  /projects/{pid}/report                   full project snapshot

Mutating endpoints take an optional ``expected_revision``; when it is given
and stale the request fails with 409 and nothing changes. Mutations on one
project are serialized by the store, so concurrent writers commit one at a
time. Errors come back as ``{"error": {"code", "message", "field"}}``.

Ranking entries carry ``rank_delta`` (previous rank minus current rank, so
positive means the requirement moved up) and per-requirement counts of
stakeholder-entered versus model-predicted ratings, so clients can render
movement and provenance without recomputing anything.
"""

from __future__ import annotations

from dataclasses import replace

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .domain import (
    Provenance,
    RatingCell,
    RatingMatrix,
    Requirement,
    Role,
    Stakeholder,
    Status,
    build_relation_matrix,
)
from .errors import (
    Divergence,
    DuplicateRequirement,
    InvalidParams,
    ReqRankError,
    RevisionConflict,
    StorageError,
    UnknownProject,
    UnknownRequirement,
)
from .factors import TrainConfig
from .influence import prioritize
from .pipeline import ProjectState, reprioritize_with_predictions
from .similarity import Method
from .store import ProjectStore

_STATUS_BY_ERROR = [
    (RevisionConflict, 409),
    (UnknownProject, 404),
    (UnknownRequirement, 404),
    (Divergence, 422),
    (StorageError, 500),
]


# --- request bodies ---------------------------------------------------------

class ScaleBody(BaseModel):
    min: float = 0.0
    max: float = 5.0


class RoleBody(BaseModel):
    id: str
    name: str = ""
    rank: int


class StakeholderBody(BaseModel):
    id: str
    name: str = ""
    role_id: str
    within_role_rank: int


class RequirementBody(BaseModel):
    id: str
    title: str = ""
    description: str | None = None


class RatingBody(BaseModel):
    stakeholder_id: str
    requirement_id: str
    rating: float


class CreateProjectBody(BaseModel):
    id: str | None = None
    name: str | None = None
    scale: ScaleBody = ScaleBody()
    roles: list[RoleBody]
    stakeholders: list[StakeholderBody]
    requirements: list[RequirementBody] = []
    ratings: list[RatingBody] = []


class AddRequirementsBody(BaseModel):
    expected_revision: int | None = None
    requirements: list[RequirementBody]


class PutRatingsBody(BaseModel):
    expected_revision: int | None = None
    ratings: list[RatingBody]


class IncorporateBody(BaseModel):
    expected_revision: int | None = None
    fraction: float = 0.25
    similarity_method: str = Method.PEARSON_BINARY.value
    seed: int = 0
    n_features: int = TrainConfig.n_features
    learning_rate: float = TrainConfig.learning_rate
    regularization: float = TrainConfig.regularization
    max_iterations: int = TrainConfig.max_iterations
    convergence_tol: float = TrainConfig.convergence_tol
    init_half_width: float = TrainConfig.init_half_width


# --- payload helpers --------------------------------------------------------

def _provenance_counts(ratings: RatingMatrix) -> dict[str, dict[str, int]]:
    counts = {rid: {"elicited": 0, "predicted": 0}
              for rid in ratings.requirement_ids}
    for (_, rid), cell in ratings.cells.items():
        counts[rid][cell.provenance.value] += 1
    return counts


def _previous_ranks(store: ProjectStore, project_id: str,
                    revision: int) -> dict[str, int]:
    previous: dict[str, int] = {}
    for entry in store.revision_history(project_id):
        if entry["revision"] < revision:
            previous = {row["requirement_id"]: row["rank"]
                        for row in entry["ranking"]}
    return previous


def _ranking_payload(store: ProjectStore, project_id: str,
                     state: ProjectState) -> list[dict]:
    counts = _provenance_counts(state.ratings)
    previous = _previous_ranks(store, project_id, state.revision)
    status = {r.id: r.status.value for r in state.requirements}
    title = {r.id: r.title for r in state.requirements}
    rows = []
    for item in state.ranking.items:
        prev = previous.get(item.requirement_id)
        rows.append({
            "requirement_id": item.requirement_id,
            "title": title.get(item.requirement_id, ""),
            "status": status.get(item.requirement_id, Status.ELICITED.value),
            "importance": float(item.importance),
            "rank": item.rank,
            "rank_delta": None if prev is None else prev - item.rank,
            "elicited_count": counts[item.requirement_id]["elicited"],
            "predicted_count": counts[item.requirement_id]["predicted"],
        })
    return rows


def _check_expected(state: ProjectState, expected: int | None) -> None:
    if expected is not None and expected != state.revision:
        raise RevisionConflict(
            f"expected revision {expected}, project is at {state.revision}",
            field="expected_revision")


def _elicited_ranking(state: ProjectState):
    elicited_ids = tuple(r.id for r in state.requirements
                         if r.status is Status.ELICITED)
    return prioritize(state.ratings.restrict(requirement_ids=elicited_ids),
                      state.roles, state.stakeholders)


# --- app factory ------------------------------------------------------------

def create_app(store: ProjectStore) -> FastAPI:
    app = FastAPI(title="reqrank", docs_url=None, redoc_url=None)

    @app.exception_handler(ReqRankError)
    async def _domain_error(request: Request, exc: ReqRankError):
        status = 400
        for kind, mapped in _STATUS_BY_ERROR:
            if isinstance(exc, kind):
                status = mapped
                break
        body = {"error": {"code": exc.code, "message": exc.message,
                          "field": exc.field}}
        return JSONResponse(status_code=status, content=body)

    @app.exception_handler(RequestValidationError)
    async def _body_error(request: Request, exc: RequestValidationError):
        errors = exc.errors()
        field = ".".join(str(part) for part in errors[0]["loc"]) if errors else None
        message = errors[0]["msg"] if errors else "invalid request body"
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "invalid_body", "message": message,
                               "field": field}})

    @app.post("/projects", status_code=201)
    def create_project(body: CreateProjectBody):
        roles = tuple(Role(r.id, r.name, r.rank) for r in body.roles)
        stakeholders = tuple(
            Stakeholder(s.id, s.name, s.role_id, s.within_role_rank)
            for s in body.stakeholders)
        requirements = tuple(Requirement(r.id, r.title, Status.ELICITED,
                                         r.description)
                             for r in body.requirements)
        ratings = RatingMatrix(
            tuple(s.id for s in stakeholders),
            tuple(r.id for r in requirements),
            {(r.stakeholder_id, r.requirement_id): RatingCell(r.rating)
             for r in body.ratings},
            body.scale.min, body.scale.max)
        project_id, state = store.create(roles, stakeholders, requirements,
                                         ratings, project_id=body.id,
                                         name=body.name)
        return {"project_id": project_id, "revision": state.revision,
                "ranking": _ranking_payload(store, project_id, state)}

    @app.get("/projects/{project_id}/ranking")
    def get_ranking(project_id: str):
        state = store.get(project_id)
        return {"project_id": project_id, "revision": state.revision,
                "ranking": _ranking_payload(store, project_id, state)}

    @app.post("/projects/{project_id}/requirements")
    def add_requirements(project_id: str, body: AddRequirementsBody):
        if not body.requirements:
            raise InvalidParams("requirements must not be empty",
                                field="requirements")

        def apply(state: ProjectState):
            _check_expected(state, body.expected_revision)
            known = {r.id for r in state.requirements}
            added = []
            for item in body.requirements:
                if not item.id:
                    raise InvalidParams("requirement id must not be empty",
                                        field="requirements.id")
                if item.id in known:
                    raise DuplicateRequirement(
                        f"requirement {item.id!r} already exists",
                        field="requirements.id")
                known.add(item.id)
                added.append(Requirement(item.id, item.title, Status.NEW,
                                         item.description))
            requirements = state.requirements + tuple(added)
            ratings = state.ratings.with_requirements(r.id for r in added)
            new_state = ProjectState(
                state.roles, state.stakeholders, requirements, ratings,
                build_relation_matrix(ratings), state.ranking,
                state.revision + 1)
            return new_state, new_state

        state = store.mutate(project_id, "add_requirements", apply)
        return {"project_id": project_id, "revision": state.revision,
                "added": [r.id for r in body.requirements],
                "ranking": _ranking_payload(store, project_id, state)}

    @app.put("/projects/{project_id}/ratings")
    def put_ratings(project_id: str, body: PutRatingsBody):
        if not body.ratings:
            raise InvalidParams("ratings must not be empty", field="ratings")

        def apply(state: ProjectState):
            _check_expected(state, body.expected_revision)
            ratings = state.ratings.with_elicited(
                {(r.stakeholder_id, r.requirement_id): r.rating
                 for r in body.ratings})
            new_state = ProjectState(
                state.roles, state.stakeholders, state.requirements, ratings,
                build_relation_matrix(ratings), state.ranking,
                state.revision + 1)
            new_state = replace(new_state,
                                ranking=_elicited_ranking(new_state))
            return new_state, new_state

        state = store.mutate(project_id, "put_ratings", apply)
        return {"project_id": project_id, "revision": state.revision,
                "updated": len(body.ratings),
                "ranking": _ranking_payload(store, project_id, state)}

    @app.get("/projects/{project_id}/requirements/{requirement_id}/likelihoods")
    def get_likelihoods(project_id: str, requirement_id: str):
        from .pipeline import compute_likelihoods

        state = store.get(project_id)
        known = {r.id for r in state.requirements}
        if requirement_id not in known:
            raise UnknownRequirement(
                f"unknown requirement {requirement_id!r}",
                field="requirement_id")
        scores = compute_likelihoods(state, [requirement_id])
        elicited, predicted = [], []
        for sid in state.ratings.stakeholder_ids:
            if state.ratings.has(sid, requirement_id):
                if (state.ratings.provenance(sid, requirement_id)
                        is Provenance.ELICITED):
                    elicited.append(sid)
                else:
                    predicted.append(sid)
        return {"project_id": project_id, "revision": state.revision,
                "requirement_id": requirement_id,
                "scores": [{"stakeholder_id": s.stakeholder_id,
                            "score": float(s.score)} for s in scores],
                "elicited_stakeholder_ids": elicited,
                "predicted_stakeholder_ids": predicted}

    @app.post("/projects/{project_id}/incorporate")
    def incorporate(project_id: str, body: IncorporateBody):
        try:
            method = Method(body.similarity_method)
        except ValueError:
            raise InvalidParams(
                f"unknown similarity method {body.similarity_method!r}",
                field="similarity_method") from None
        config = TrainConfig(
            n_features=body.n_features, learning_rate=body.learning_rate,
            regularization=body.regularization,
            max_iterations=body.max_iterations,
            convergence_tol=body.convergence_tol,
            init_half_width=body.init_half_width, rng_seed=body.seed)

        def apply(state: ProjectState):
            _check_expected(state, body.expected_revision)
            result = reprioritize_with_predictions(state, body.fraction,
                                                   config, method)
            return result.state, result

        result = store.mutate(project_id, "incorporate", apply)
        training = None
        if result.cost_report is not None:
            training = {"converged": result.cost_report.converged,
                        "iterations": result.cost_report.iterations_used,
                        "final_cost": float(result.cost_report.final_cost)}
        return {"project_id": project_id,
                "revision": result.state.revision,
                "ranking": _ranking_payload(store, project_id, result.state),
                "predicted_count": result.predicted_count,
                "interactions": result.interactions,
                "plan": [{"stakeholder_id": sid, "requirement_id": rid}
                         for sid, rid in result.plan.cells],
                "training": training}

    @app.get("/projects/{project_id}/report")
    def get_report(project_id: str):
        state = store.get(project_id)
        ratings = [{"stakeholder_id": sid, "requirement_id": rid,
                    "rating": float(cell.value),
                    "provenance": cell.provenance.value}
                   for (sid, rid), cell in sorted(state.ratings.cells.items())]
        return {
            "project_id": project_id,
            "name": store.project_name(project_id),
            "revision": state.revision,
            "scale": {"min": state.ratings.scale_min,
                      "max": state.ratings.scale_max},
            "roles": [{"id": r.id, "name": r.display_name, "rank": r.rank}
                      for r in state.roles],
            "stakeholders": [{"id": s.id, "name": s.display_name,
                              "role_id": s.role_id,
                              "within_role_rank": s.within_role_rank}
                             for s in state.stakeholders],
            "requirements": [{"id": r.id, "title": r.title,
                              "status": r.status.value}
                             for r in state.requirements],
            "ratings": ratings,
            "ranking": _ranking_payload(store, project_id, state),
            "revisions": store.revision_history(project_id),
        }

    return app
