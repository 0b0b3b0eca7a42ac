"""Core data model: stakeholders, roles, requirements and sparse rating matrices.

All values are immutable after construction; operations that "mutate" return a
new value, so everything here is safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

from .errors import DuplicateRequirement, IntegrityError, ScaleError, ScaleMismatch


class Status(str, Enum):
    """Lifecycle of a requirement: freshly added ones are ``new`` until the
    next re-prioritization folds them into the ranked list."""

    ELICITED = "elicited"
    NEW = "new"


class Provenance(str, Enum):
    """Origin of a rating cell: typed in by a stakeholder, or filled in by the
    factor model."""

    ELICITED = "elicited"
    PREDICTED = "predicted"


@dataclass(frozen=True)
class Role:
    id: str
    display_name: str
    rank: int  # 1 = most influential role


@dataclass(frozen=True)
class Stakeholder:
    id: str
    display_name: str
    role_id: str
    within_role_rank: int  # 1 = most influential in the role


@dataclass(frozen=True)
class Requirement:
    id: str
    title: str
    status: Status = Status.ELICITED
    description: str | None = None

    def as_elicited(self) -> "Requirement":
        return Requirement(self.id, self.title, Status.ELICITED, self.description)


@dataclass(frozen=True)
class RatingCell:
    value: float
    provenance: Provenance = Provenance.ELICITED


Cell = tuple[str, str]  # (stakeholder_id, requirement_id)


@dataclass(frozen=True)
class RatingMatrix:
    """Sparse stakeholder x requirement matrix of ratings.

    Carries its own universes so that column vectors have a well-defined row
    order even for stakeholders who rated nothing.
    """

    stakeholder_ids: tuple[str, ...]
    requirement_ids: tuple[str, ...]
    cells: Mapping[Cell, RatingCell] = field(default_factory=dict)
    scale_min: float = 0.0
    scale_max: float = 5.0

    def __post_init__(self):
        if not self.scale_min < self.scale_max:
            raise ScaleError(
                f"scale_min must be below scale_max, got [{self.scale_min}, {self.scale_max}]")
        _check_unique(self.stakeholder_ids, "stakeholder")
        _check_unique(self.requirement_ids, "requirement")
        s_set, r_set = set(self.stakeholder_ids), set(self.requirement_ids)
        for (sid, rid), cell in self.cells.items():
            if sid not in s_set:
                raise IntegrityError(f"cell ({sid}, {rid}) references unknown stakeholder {sid!r}")
            if rid not in r_set:
                raise IntegrityError(f"cell ({sid}, {rid}) references unknown requirement {rid!r}")
            if not (self.scale_min <= cell.value <= self.scale_max):
                raise ScaleError(
                    f"rating {cell.value} for cell ({sid}, {rid}) outside "
                    f"[{self.scale_min}, {self.scale_max}]")

    # -- queries ------------------------------------------------------------

    def has(self, stakeholder_id: str, requirement_id: str) -> bool:
        return (stakeholder_id, requirement_id) in self.cells

    def value(self, stakeholder_id: str, requirement_id: str) -> float:
        return self.cells[(stakeholder_id, requirement_id)].value

    def provenance(self, stakeholder_id: str, requirement_id: str) -> Provenance:
        return self.cells[(stakeholder_id, requirement_id)].provenance

    @property
    def scale(self) -> tuple[float, float]:
        return (self.scale_min, self.scale_max)

    def elicited_cells(self) -> dict[Cell, float]:
        return {k: c.value for k, c in self.cells.items()
                if c.provenance is Provenance.ELICITED}

    def predicted_cells(self) -> dict[Cell, float]:
        return {k: c.value for k, c in self.cells.items()
                if c.provenance is Provenance.PREDICTED}

    def column(self, requirement_id: str) -> dict[str, float]:
        """Ratings of one requirement, keyed by stakeholder id."""
        return {sid: c.value for (sid, rid), c in self.cells.items()
                if rid == requirement_id}

    def dense(self, missing: float = np.nan) -> np.ndarray:
        """Dense (stakeholders x requirements) array with ``missing`` holes."""
        s_index = {sid: i for i, sid in enumerate(self.stakeholder_ids)}
        r_index = {rid: j for j, rid in enumerate(self.requirement_ids)}
        out = np.full((len(self.stakeholder_ids), len(self.requirement_ids)),
                      missing, dtype=float)
        for (sid, rid), cell in self.cells.items():
            out[s_index[sid], r_index[rid]] = cell.value
        return out

    # -- derivation ---------------------------------------------------------

    def with_elicited(self, ratings: Mapping[Cell, float]) -> "RatingMatrix":
        """Upsert elicited ratings (a human may revise their own rating or
        supersede a prediction)."""
        merged = dict(self.cells)
        for key, value in ratings.items():
            merged[key] = RatingCell(float(value), Provenance.ELICITED)
        return RatingMatrix(self.stakeholder_ids, self.requirement_ids, merged,
                            self.scale_min, self.scale_max)

    def with_predicted(self, ratings: Mapping[Cell, float]) -> "RatingMatrix":
        """Fill missing cells with predictions; refuses to touch existing cells."""
        merged = dict(self.cells)
        for key, value in ratings.items():
            if key in merged:
                raise IntegrityError(
                    f"prediction would overwrite existing cell {key}")
            merged[key] = RatingCell(float(value), Provenance.PREDICTED)
        return RatingMatrix(self.stakeholder_ids, self.requirement_ids, merged,
                            self.scale_min, self.scale_max)

    def with_requirements(self, requirement_ids: Iterable[str]) -> "RatingMatrix":
        """Extend the requirement universe with empty columns."""
        added = tuple(r for r in requirement_ids if r not in set(self.requirement_ids))
        return RatingMatrix(self.stakeholder_ids, self.requirement_ids + added,
                            dict(self.cells), self.scale_min, self.scale_max)

    def restrict(self, stakeholder_ids: Iterable[str] | None = None,
                 requirement_ids: Iterable[str] | None = None) -> "RatingMatrix":
        """Sub-matrix on the given universes (order taken from the arguments)."""
        s_ids = self.stakeholder_ids if stakeholder_ids is None else tuple(stakeholder_ids)
        r_ids = self.requirement_ids if requirement_ids is None else tuple(requirement_ids)
        s_set, r_set = set(s_ids), set(r_ids)
        kept = {k: c for k, c in self.cells.items()
                if k[0] in s_set and k[1] in r_set}
        return RatingMatrix(s_ids, r_ids, kept, self.scale_min, self.scale_max)

    @classmethod
    def empty(cls, scale_min: float = 0.0, scale_max: float = 5.0) -> "RatingMatrix":
        return cls((), (), {}, scale_min, scale_max)


@dataclass(frozen=True)
class RelationMatrix:
    """Binary stakeholder x requirement matrix: 1 iff the stakeholder rated
    the requirement, regardless of the rating's value or provenance."""

    stakeholder_ids: tuple[str, ...]
    requirement_ids: tuple[str, ...]
    pairs: frozenset[Cell] = frozenset()

    def __post_init__(self):
        s_set, r_set = set(self.stakeholder_ids), set(self.requirement_ids)
        for sid, rid in self.pairs:
            if sid not in s_set or rid not in r_set:
                raise IntegrityError(f"relation pair ({sid}, {rid}) outside the universe")

    def has(self, stakeholder_id: str, requirement_id: str) -> bool:
        return (stakeholder_id, requirement_id) in self.pairs

    def column(self, requirement_id: str) -> np.ndarray:
        """0/1 column over the stakeholder universe, in universe order."""
        return np.array([(sid, requirement_id) in self.pairs
                         for sid in self.stakeholder_ids], dtype=float)

    def dense(self) -> np.ndarray:
        s_index = {sid: i for i, sid in enumerate(self.stakeholder_ids)}
        r_index = {rid: j for j, rid in enumerate(self.requirement_ids)}
        out = np.zeros((len(self.stakeholder_ids), len(self.requirement_ids)))
        for sid, rid in self.pairs:
            out[s_index[sid], r_index[rid]] = 1.0
        return out

    def raters_of(self, requirement_id: str) -> set[str]:
        return {sid for sid, rid in self.pairs if rid == requirement_id}


def build_relation_matrix(ratings: RatingMatrix) -> RelationMatrix:
    """Presence indicator of the rating matrix (total function)."""
    return RelationMatrix(ratings.stakeholder_ids, ratings.requirement_ids,
                          frozenset(ratings.cells))


def merge_rating_matrices(old: RatingMatrix, new: RatingMatrix) -> RatingMatrix:
    """Union of cells and universes; the two requirement sets must be disjoint.

    Stakeholder order is old's order followed by new-only stakeholders, so the
    merge is associative for pairwise-disjoint requirement sets and the empty
    matrix is an identity.
    """
    if old.scale != new.scale:
        raise ScaleMismatch(
            f"cannot merge matrices on scales {old.scale} and {new.scale}")
    overlap = set(old.requirement_ids) & set(new.requirement_ids)
    if overlap:
        raise DuplicateRequirement(
            f"requirement ids present in both matrices: {sorted(overlap)}")
    old_s = set(old.stakeholder_ids)
    stakeholders = old.stakeholder_ids + tuple(
        s for s in new.stakeholder_ids if s not in old_s)
    cells: dict[Cell, RatingCell] = dict(old.cells)
    cells.update(new.cells)
    return RatingMatrix(stakeholders, old.requirement_ids + new.requirement_ids,
                        cells, old.scale_min, old.scale_max)


def _check_unique(ids: tuple[str, ...], kind: str) -> None:
    if len(set(ids)) != len(ids):
        seen: set[str] = set()
        dupes = set()
        for i in ids:
            if i in seen:
                dupes.add(i)
            seen.add(i)
        raise IntegrityError(f"duplicate {kind} ids: {sorted(dupes)}")
