"""Influence-weighted requirement ranking.

A role's weight falls linearly with its rank, a stakeholder's weight falls
linearly with their rank inside the role, and a stakeholder's project-wide
weight is the product of the two. A requirement's importance is the
project-influence-weighted sum of the ratings it received; the prioritized
list orders requirements by that score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .domain import RatingMatrix, Role, Stakeholder
from .errors import InvalidRanks, MissingRole, UnknownStakeholder


@dataclass(frozen=True)
class InfluenceTable:
    role_influence: dict[str, float]
    stakeholder_influence: dict[str, float]
    project_influence: dict[str, float]


@dataclass(frozen=True)
class RankedItem:
    requirement_id: str
    importance: float
    rank: int


@dataclass(frozen=True)
class RankedList:
    items: tuple[RankedItem, ...]

    def __post_init__(self):
        for pos, item in enumerate(self.items):
            if item.rank != pos + 1:
                raise InvalidRanks(f"ranks must be contiguous 1..n, got {item.rank} at {pos + 1}")
            if pos and item.importance > self.items[pos - 1].importance:
                raise InvalidRanks("importance must be non-increasing with rank")
            if (pos and item.importance == self.items[pos - 1].importance
                    and item.requirement_id < self.items[pos - 1].requirement_id):
                raise InvalidRanks("ties must be broken by ascending requirement id")

    def order(self) -> list[str]:
        return [i.requirement_id for i in self.items]

    def importances(self) -> dict[str, float]:
        return {i.requirement_id: i.importance for i in self.items}

    def rank_of(self, requirement_id: str) -> int:
        for item in self.items:
            if item.requirement_id == requirement_id:
                return item.rank
        raise KeyError(requirement_id)

    def __len__(self) -> int:
        return len(self.items)


def _check_permutation(ranks: Sequence[int], what: str) -> None:
    n = len(ranks)
    if sorted(ranks) != list(range(1, n + 1)):
        raise InvalidRanks(f"{what} ranks must be a permutation of 1..{n}, got {sorted(ranks)}")


def _linear_weights(ranks: Sequence[int]) -> list[float]:
    # weight of rank r is (max_rank + 1 - r), normalized over all ranks
    top = max(ranks)
    total = sum(top + 1 - r for r in ranks)
    return [(top + 1 - r) / total for r in ranks]


def role_influence(roles: Sequence[Role]) -> dict[str, float]:
    """Normalized per-role weights; rank 1 gets the largest share."""
    if not roles:
        raise InvalidRanks("at least one role is required")
    _check_permutation([r.rank for r in roles], "role")
    weights = _linear_weights([r.rank for r in roles])
    return {role.id: w for role, w in zip(roles, weights)}


def stakeholder_influence(role_members: Sequence[Stakeholder]) -> dict[str, float]:
    """Normalized weights of the stakeholders within one role."""
    if not role_members:
        raise InvalidRanks("a role must have at least one stakeholder")
    roles = {m.role_id for m in role_members}
    if len(roles) > 1:
        raise InvalidRanks(f"stakeholders span multiple roles: {sorted(roles)}")
    _check_permutation([m.within_role_rank for m in role_members], "stakeholder")
    weights = _linear_weights([m.within_role_rank for m in role_members])
    return {member.id: w for member, w in zip(role_members, weights)}


def project_influence(role_weights: Mapping[str, float],
                      stakeholders: Sequence[Stakeholder],
                      stakeholder_weights: Mapping[str, float]) -> dict[str, float]:
    """Pointwise product of role weight and within-role weight.

    Sums to 1 over all stakeholders because each role's members sum to 1.
    """
    out = {}
    for s in stakeholders:
        if s.role_id not in role_weights:
            raise MissingRole(f"stakeholder {s.id} references role {s.role_id!r} "
                              "with no influence entry")
        out[s.id] = role_weights[s.role_id] * stakeholder_weights[s.id]
    return out


def compute_influence_table(roles: Sequence[Role],
                            stakeholders: Sequence[Stakeholder]) -> InfluenceTable:
    """Full influence table for a project.

    Every role must have at least one member, otherwise project influences
    could not sum to 1.
    """
    role_w = role_influence(roles)
    by_role: dict[str, list[Stakeholder]] = {r.id: [] for r in roles}
    for s in stakeholders:
        if s.role_id not in by_role:
            raise MissingRole(f"stakeholder {s.id} references unknown role {s.role_id!r}")
        by_role[s.role_id].append(s)
    stakeholder_w: dict[str, float] = {}
    for role_id, members in by_role.items():
        if not members:
            raise InvalidRanks(f"role {role_id!r} has no stakeholders")
        stakeholder_w.update(stakeholder_influence(members))
    project_w = project_influence(role_w, stakeholders, stakeholder_w)
    return InfluenceTable(role_w, stakeholder_w, project_w)


def requirement_importance(ratings: RatingMatrix,
                           weights: Mapping[str, float]) -> dict[str, float]:
    """Importance of each requirement: sum of project-influence-weighted
    ratings over the stakeholders who rated it. Unrated requirements score 0.

    Summed with math.fsum, so the result is the correctly rounded sum and
    does not depend on the insertion order of the cells.
    """
    terms: dict[str, list[float]] = {rid: [] for rid in ratings.requirement_ids}
    for (sid, rid), cell in ratings.cells.items():
        if sid not in weights:
            raise UnknownStakeholder(f"rater {sid!r} has no project influence")
        terms[rid].append(weights[sid] * cell.value)
    return {rid: math.fsum(values) for rid, values in terms.items()}


def prioritize(ratings: RatingMatrix, roles: Sequence[Role],
               stakeholders: Sequence[Stakeholder]) -> RankedList:
    """Rank all requirements of the matrix by importance, descending; ties are
    broken by ascending requirement id so the output is deterministic."""
    table = compute_influence_table(roles, stakeholders)
    importance = requirement_importance(ratings, table.project_influence)
    ordered = sorted(importance.items(), key=lambda kv: (-kv[1], kv[0]))
    return RankedList(tuple(
        RankedItem(rid, score, pos + 1) for pos, (rid, score) in enumerate(ordered)))
