"""Requirement-to-requirement similarity.

The default method correlates the binary rated/not-rated columns of the
relation matrix (the phi coefficient). A rating-valued variant restricts each
pair to its co-rated stakeholders before correlating; cosine and Jaccard over
the binary columns are available for comparison.

Undefined similarities (zero variance, zero norm, fewer than two co-raters)
are mapped to 0: a requirement with an uninformative history should neither
attract nor repel.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .domain import RatingMatrix, RelationMatrix
from .errors import LengthMismatch, TooFewRequirements


class Method(str, Enum):
    PEARSON_BINARY = "pearson_binary"
    PEARSON_RATINGS = "pearson_ratings"
    COSINE = "cosine"
    JACCARD = "jaccard"


@dataclass(frozen=True)
class SimilarityMatrix:
    requirement_ids: tuple[str, ...]
    values: np.ndarray  # symmetric, clipped to the method's range
    method: Method

    def sim(self, req_a: str, req_b: str) -> float:
        idx = self._index()
        return float(self.values[idx[req_a], idx[req_b]])

    def _index(self) -> dict[str, int]:
        return {rid: i for i, rid in enumerate(self.requirement_ids)}

    def similarities_to(self, requirement_id: str) -> dict[str, float]:
        idx = self._index()
        row = self.values[idx[requirement_id]]
        return {rid: float(row[j]) for j, rid in enumerate(self.requirement_ids)}


def pearson_similarity(col_i: np.ndarray, col_j: np.ndarray) -> float:
    """Plain Pearson correlation of two equal-length vectors; 0 when either
    side has zero variance."""
    a = np.asarray(col_i, dtype=float)
    b = np.asarray(col_j, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch(f"vectors must share one length, got {a.shape} and {b.shape}")
    if a.size < 2:
        raise LengthMismatch("need at least two entries to correlate")
    da = a - a.mean()
    db = b - b.mean()
    var_a = float(da @ da)
    var_b = float(db @ db)
    if var_a == 0.0 or var_b == 0.0:
        return 0.0
    r = float(da @ db) / np.sqrt(var_a * var_b)
    return float(np.clip(r, -1.0, 1.0))


def cosine_similarity(col_i: np.ndarray, col_j: np.ndarray) -> float:
    """Cosine of the angle between two vectors; 0 when either norm is zero."""
    a = np.asarray(col_i, dtype=float)
    b = np.asarray(col_j, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch(f"vectors must share one length, got {a.shape} and {b.shape}")
    norm = np.linalg.norm(a) * np.linalg.norm(b)
    if norm == 0.0:
        return 0.0
    return float(np.clip(float(a @ b) / norm, -1.0, 1.0))


def jaccard_similarity(col_i: np.ndarray, col_j: np.ndarray) -> float:
    """Intersection over union of the nonzero patterns; 0 when both are empty."""
    a = np.asarray(col_i) != 0
    b = np.asarray(col_j) != 0
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch(f"vectors must share one length, got {a.shape} and {b.shape}")
    union = int(np.sum(a | b))
    if union == 0:
        return 0.0
    return float(np.sum(a & b)) / union


def _corated_pearson(values: np.ndarray, present: np.ndarray,
                     i: int, j: int) -> float:
    """Pearson over the stakeholders who rated both columns, with column means
    taken over that co-rated set; 0 when fewer than two co-raters."""
    both = present[:, i] & present[:, j]
    if int(both.sum()) < 2:
        return 0.0
    return pearson_similarity(values[both, i], values[both, j])


def similarity_matrix(ratings: RatingMatrix, relation: RelationMatrix,
                      method: Method = Method.PEARSON_BINARY) -> SimilarityMatrix:
    """Pairwise similarity of all requirement columns under the chosen method.

    Symmetric by construction; the diagonal is 1 wherever the method is
    defined for the column against itself, else 0.
    """
    req_ids = relation.requirement_ids
    if len(req_ids) < 2:
        raise TooFewRequirements(f"need at least 2 requirements, got {len(req_ids)}")
    method = Method(method)
    presence = relation.dense().astype(bool)
    n = len(req_ids)
    out = np.zeros((n, n))

    if method is Method.PEARSON_RATINGS:
        values = ratings.restrict(relation.stakeholder_ids, req_ids).dense(missing=0.0)
        for i in range(n):
            for j in range(i, n):
                out[i, j] = out[j, i] = _corated_pearson(values, presence, i, j)
        return SimilarityMatrix(req_ids, out, method)

    cols = presence.astype(float)
    if method is Method.PEARSON_BINARY:
        if len(relation.stakeholder_ids) < 2:
            # one stakeholder: every column is constant, so nothing correlates
            return SimilarityMatrix(req_ids, out, method)
        pair = pearson_similarity
    elif method is Method.COSINE:
        pair = cosine_similarity
    else:
        pair = jaccard_similarity
    for i in range(n):
        for j in range(i, n):
            out[i, j] = out[j, i] = pair(cols[:, i], cols[:, j])
    return SimilarityMatrix(req_ids, out, method)
