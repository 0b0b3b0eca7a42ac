"""Choosing which missing ratings to predict.

For every missing (stakeholder, new requirement) cell, the likelihood that
the stakeholder would have rated the requirement is a similarity-weighted
vote over the already-elicited requirements: neighbors are the elicited
requirements with positive similarity to the target, each voting its
similarity if the stakeholder rated it. The prediction plan then keeps the
top fraction of cells by likelihood.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .domain import RelationMatrix
from .errors import AlreadyRated, InvalidParams, UnknownRequirement
from .similarity import SimilarityMatrix


@dataclass(frozen=True)
class LikelihoodScore:
    stakeholder_id: str
    requirement_id: str
    score: float


@dataclass(frozen=True)
class PredictionPlan:
    cells: tuple[tuple[str, str], ...]  # (stakeholder_id, requirement_id)
    fraction: float


def _positive_neighbors(sim: SimilarityMatrix, requirement_id: str,
                        elicited_ids: Sequence[str],
                        k_neighbors: int | None) -> list[tuple[str, float]]:
    if requirement_id not in sim.requirement_ids:
        raise UnknownRequirement(f"{requirement_id!r} not covered by the similarity matrix")
    sims = sim.similarities_to(requirement_id)
    neighbors = [(rid, sims[rid]) for rid in elicited_ids
                 if rid != requirement_id and rid in sims and sims[rid] > 0.0]
    if k_neighbors is not None:
        neighbors.sort(key=lambda ns: (-ns[1], ns[0]))
        neighbors = neighbors[:k_neighbors]
    return neighbors


def rating_likelihood(stakeholder_id: str, requirement_id: str,
                      sim: SimilarityMatrix, relation: RelationMatrix,
                      elicited_ids: Sequence[str],
                      k_neighbors: int | None = None) -> float:
    """Similarity-weighted fraction of the target's neighbors that the
    stakeholder has rated; 0 when there are no positive-similarity neighbors."""
    if relation.has(stakeholder_id, requirement_id):
        raise AlreadyRated(f"{stakeholder_id} already rated {requirement_id}")
    neighbors = _positive_neighbors(sim, requirement_id, elicited_ids, k_neighbors)
    denominator = sum(s for _, s in neighbors)
    if denominator == 0.0:
        return 0.0
    numerator = sum(s for rid, s in neighbors if relation.has(stakeholder_id, rid))
    return numerator / denominator


def score_missing_cells(new_requirement_ids: Iterable[str],
                        sim: SimilarityMatrix, relation: RelationMatrix,
                        elicited_ids: Sequence[str],
                        k_neighbors: int | None = None) -> list[LikelihoodScore]:
    """Likelihood for every missing (stakeholder, new requirement) cell,
    sorted by score descending with (stakeholder, requirement) tie-break."""
    scores = []
    for rid in new_requirement_ids:
        for sid in relation.stakeholder_ids:
            if relation.has(sid, rid):
                continue
            scores.append(LikelihoodScore(
                sid, rid, rating_likelihood(sid, rid, sim, relation,
                                            elicited_ids, k_neighbors)))
    scores.sort(key=lambda ls: (-ls.score, ls.stakeholder_id, ls.requirement_id))
    return scores


def build_prediction_plan(likelihoods: Sequence[LikelihoodScore],
                          fraction: float) -> PredictionPlan:
    """Top ceil(fraction * n) cells by score. Deterministic: ties are broken by
    (stakeholder_id, requirement_id), so a smaller fraction's plan is always a
    prefix of a larger fraction's plan over the same likelihoods."""
    if not 0.0 < fraction <= 1.0:
        raise InvalidParams(f"fraction must be in (0, 1], got {fraction}")
    ordered = sorted(likelihoods,
                     key=lambda ls: (-ls.score, ls.stakeholder_id, ls.requirement_id))
    take = math.ceil(fraction * len(ordered))
    return PredictionPlan(tuple((ls.stakeholder_id, ls.requirement_id)
                                for ls in ordered[:take]), fraction)
