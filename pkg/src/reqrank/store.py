"""Directory-backed project storage.

One directory per project under a storage root:

    <root>/<project_id>/
        manifest.yaml           project name, rating scale, current revision
        roles.csv               bundle tables (see bundles module)
        stakeholders.csv
        requirements.csv
        ratings.csv             stakeholder-entered cells
        predicted_ratings.csv   model-filled cells
        revisions.log           append-only YAML stream, one entry per revision

Mutations are serialized per project and write-through: the new state is
persisted before the in-memory reference is swapped, so concurrent readers
always observe the last committed revision. Nothing here consults clocks or
ambient randomness, so persisted bytes are reproducible.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Callable, Sequence, TypeVar

import yaml

from . import bundles
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
from .errors import StorageError, UnknownProject
from .influence import RankedList, prioritize
from .pipeline import ProjectState

REVISIONS_FILE = "revisions.log"

T = TypeVar("T")


def _ranking_rows(ranking: RankedList) -> list[dict]:
    return [{"requirement_id": i.requirement_id,
             "importance": float(i.importance), "rank": i.rank}
            for i in ranking.items]


class ProjectStore:
    """Loads, persists and serializes access to project states."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._master = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}
        self._cache: dict[str, ProjectState] = {}
        self._names: dict[str, str] = {}

    # -- bookkeeping --------------------------------------------------------

    def _lock(self, project_id: str) -> threading.Lock:
        with self._master:
            return self._locks.setdefault(project_id, threading.Lock())

    def _dir(self, project_id: str) -> Path:
        return self.root / project_id

    def list_projects(self) -> list[str]:
        return sorted(p.name for p in self.root.iterdir()
                      if p.is_dir() and (p / bundles.MANIFEST_FILE).is_file())

    def next_project_id(self) -> str:
        existing = set(self.list_projects())
        index = 1
        while f"project-{index:03d}" in existing:
            index += 1
        return f"project-{index:03d}"

    def project_name(self, project_id: str) -> str:
        self.get(project_id)
        return self._names.get(project_id, project_id)

    # -- lifecycle ----------------------------------------------------------

    def create(self, roles: Sequence[Role], stakeholders: Sequence[Stakeholder],
               requirements: Sequence[Requirement], ratings: RatingMatrix,
               project_id: str | None = None,
               name: str | None = None) -> tuple[str, ProjectState]:
        from .pipeline import initial_prioritization

        with self._master:
            if project_id is None:
                existing = set(self.list_projects())
                index = 1
                while f"project-{index:03d}" in existing:
                    index += 1
                project_id = f"project-{index:03d}"
            elif not project_id or "/" in project_id or project_id in (".", ".."):
                raise StorageError(f"invalid project id {project_id!r}",
                                   field="project_id")
            if self._dir(project_id).exists():
                raise StorageError(f"project {project_id!r} already exists",
                                   field="project_id")
            lock = self._locks.setdefault(project_id, threading.Lock())
        with lock:
            state = initial_prioritization(roles, stakeholders, requirements,
                                           ratings)
            self._persist(project_id, state, name or project_id,
                          action="create")
            return project_id, state

    def get(self, project_id: str) -> ProjectState:
        state = self._cache.get(project_id)
        if state is not None:
            return state
        with self._lock(project_id):
            state = self._cache.get(project_id)
            if state is None:
                state = self._load(project_id)
                self._cache[project_id] = state
            return state

    def mutate(self, project_id: str, action: str,
               fn: Callable[[ProjectState], tuple[ProjectState, T]]) -> T:
        """Apply fn under the project lock and commit the state it returns."""
        with self._lock(project_id):
            state = self._cache.get(project_id)
            if state is None:
                state = self._load(project_id)
            new_state, result = fn(state)
            self._persist(project_id, new_state,
                          self._names.get(project_id, project_id), action)
            return result

    def revision_history(self, project_id: str) -> list[dict]:
        path = self._dir(project_id) / REVISIONS_FILE
        if not path.is_file():
            if not self._dir(project_id).is_dir():
                raise UnknownProject(f"no such project {project_id!r}")
            return []
        return [doc for doc in
                yaml.safe_load_all(path.read_text(encoding="utf-8"))
                if doc is not None]

    # -- disk format --------------------------------------------------------

    def _persist(self, project_id: str, state: ProjectState, name: str,
                 action: str) -> None:
        directory = self._dir(project_id)
        directory.mkdir(parents=True, exist_ok=True)
        bundle = bundles.DatasetBundle(state.roles, state.stakeholders,
                                       state.requirements, state.ratings,
                                       name=name)
        bundles.save_dataset(bundle, directory,
                             extra_manifest={"revision": state.revision})
        bundles.save_rating_cells(directory / bundles.PREDICTED_FILE,
                                  state.ratings.predicted_cells())
        entry = {"revision": state.revision, "action": action,
                 "ranking": _ranking_rows(state.ranking)}
        with open(directory / REVISIONS_FILE, "a", encoding="utf-8") as handle:
            handle.write("---\n")
            handle.write(yaml.safe_dump(entry, sort_keys=False))
        self._names[project_id] = name
        self._cache[project_id] = state

    def _load(self, project_id: str) -> ProjectState:
        directory = self._dir(project_id)
        if not directory.is_dir():
            raise UnknownProject(f"no such project {project_id!r}")
        bundle = bundles.load_dataset(directory)
        manifest = bundles.load_manifest(directory)
        revision = int(manifest.get("revision", 1))
        self._names[project_id] = manifest.get("name", project_id)
        cells = dict(bundle.ratings.cells)
        predicted_path = directory / bundles.PREDICTED_FILE
        if predicted_path.is_file():
            for key, value in bundles.load_rating_cells(predicted_path).items():
                cells[key] = RatingCell(value, Provenance.PREDICTED)
        ratings = RatingMatrix(bundle.ratings.stakeholder_ids,
                               bundle.ratings.requirement_ids, cells,
                               bundle.ratings.scale_min,
                               bundle.ratings.scale_max)
        # The ranked list covers elicited-status requirements only; new ones
        # join it at the next re-prioritization.
        elicited_ids = tuple(r.id for r in bundle.requirements
                             if r.status is Status.ELICITED)
        ranking = prioritize(
            ratings.restrict(requirement_ids=elicited_ids),
            bundle.roles, bundle.stakeholders)
        return ProjectState(bundle.roles, bundle.stakeholders,
                            bundle.requirements, ratings,
                            build_relation_matrix(ratings), ranking, revision)
