"""Data-model behaviour: matrices, merging, relation consistency."""

import pytest

from helpers import make_matrix
from reqrank.domain import (
    Provenance,
    RatingCell,
    RatingMatrix,
    Requirement,
    Status,
    build_relation_matrix,
    merge_rating_matrices,
)
from reqrank.errors import DuplicateRequirement, IntegrityError, ScaleError, ScaleMismatch


def test_relation_of_single_cell():
    ratings = make_matrix(["s1"], ["q1"], {("s1", "q1"): 4})
    assert build_relation_matrix(ratings).pairs == frozenset({("s1", "q1")})


def test_relation_of_empty_matrix():
    ratings = make_matrix(["s1", "s2"], ["q1"], {})
    relation = build_relation_matrix(ratings)
    assert relation.pairs == frozenset()
    assert relation.stakeholder_ids == ("s1", "s2")


def test_relation_matches_cell_scan():
    cells = {("s1", "q1"): 3, ("s1", "q2"): 1, ("s2", "q2"): 5, ("s3", "q1"): 2}
    ratings = make_matrix(["s1", "s2", "s3"], ["q1", "q2"], cells)
    relation = build_relation_matrix(ratings)
    expected = {(sid, rid) for sid in ["s1", "s2", "s3"] for rid in ["q1", "q2"]
                if ratings.has(sid, rid)}
    assert set(relation.pairs) == expected
    assert len(relation.pairs) == 4


def test_relation_ignores_cell_values_and_provenance():
    ratings = make_matrix(["s1", "s2"], ["q1"], {("s1", "q1"): 2})
    revalued = ratings.with_elicited({("s1", "q1"): 5})
    predicted = ratings.with_predicted({("s2", "q1"): 1.5})
    assert build_relation_matrix(revalued).pairs == build_relation_matrix(ratings).pairs
    assert build_relation_matrix(predicted).pairs == frozenset({("s1", "q1"), ("s2", "q1")})


def test_merge_with_empty_is_identity():
    m = make_matrix(["s1", "s2"], ["q1", "q2"], {("s1", "q1"): 4, ("s2", "q2"): 3})
    empty = RatingMatrix.empty()
    for merged in (merge_rating_matrices(m, empty), merge_rating_matrices(empty, m)):
        assert merged.cells == m.cells
        assert set(merged.stakeholder_ids) == set(m.stakeholder_ids)
        assert set(merged.requirement_ids) == set(m.requirement_ids)


def test_merge_unions_requirement_columns():
    old = make_matrix(["s1"], ["a.3.1", "a.3.2"], {("s1", "a.3.1"): 2})
    new = make_matrix(["s1"], ["d.5.1"], {("s1", "d.5.1"): 5})
    merged = merge_rating_matrices(old, new)
    assert set(merged.requirement_ids) == {"a.3.1", "a.3.2", "d.5.1"}


def test_merge_cell_union_oracle():
    old_cells = {("s1", "q1"): 1, ("s1", "q2"): 2, ("s2", "q1"): 3,
                 ("s2", "q2"): 4, ("s3", "q1"): 5}
    new_cells = {("s1", "q3"): 1, ("s2", "q3"): 2, ("s3", "q4"): 3}
    old = make_matrix(["s1", "s2", "s3"], ["q1", "q2"], old_cells)
    new = make_matrix(["s1", "s2", "s3"], ["q3", "q4"], new_cells)
    merged = merge_rating_matrices(old, new)
    expected = {k: float(v) for k, v in {**old_cells, **new_cells}.items()}
    assert {k: c.value for k, c in merged.cells.items()} == expected
    assert len(merged.cells) == 8


def test_merge_is_associative_on_disjoint_requirements():
    a = make_matrix(["s1"], ["q1"], {("s1", "q1"): 1})
    b = make_matrix(["s2"], ["q2"], {("s2", "q2"): 2})
    c = make_matrix(["s1", "s3"], ["q3"], {("s3", "q3"): 3})
    left = merge_rating_matrices(merge_rating_matrices(a, b), c)
    right = merge_rating_matrices(a, merge_rating_matrices(b, c))
    assert left.cells == right.cells
    assert left.stakeholder_ids == right.stakeholder_ids
    assert left.requirement_ids == right.requirement_ids


def test_merge_takes_stakeholder_union():
    old = make_matrix(["s1"], ["q1"], {})
    new = make_matrix(["s2", "s1"], ["q2"], {("s2", "q2"): 1})
    merged = merge_rating_matrices(old, new)
    assert set(merged.stakeholder_ids) == {"s1", "s2"}


def test_merge_preserves_provenance():
    old = make_matrix(["s1"], ["q1"], {}).with_predicted({("s1", "q1"): 2.5})
    new = make_matrix(["s1"], ["q2"], {("s1", "q2"): 4})
    merged = merge_rating_matrices(old, new)
    assert merged.provenance("s1", "q1") is Provenance.PREDICTED
    assert merged.provenance("s1", "q2") is Provenance.ELICITED


def test_merge_rejects_scale_mismatch():
    old = make_matrix(["s1"], ["q1"], {}, scale=(0.0, 5.0))
    new = make_matrix(["s1"], ["q2"], {}, scale=(1.0, 5.0))
    with pytest.raises(ScaleMismatch):
        merge_rating_matrices(old, new)


def test_merge_rejects_duplicate_requirements():
    old = make_matrix(["s1"], ["q1", "q2"], {})
    new = make_matrix(["s1"], ["q2"], {})
    with pytest.raises(DuplicateRequirement):
        merge_rating_matrices(old, new)


def test_out_of_scale_rating_rejected():
    with pytest.raises(ScaleError):
        make_matrix(["s1"], ["q1"], {("s1", "q1"): 7})


def test_inverted_scale_rejected():
    with pytest.raises(ScaleError):
        RatingMatrix(("s1",), ("q1",), {}, scale_min=5.0, scale_max=0.0)


def test_dangling_cell_references_rejected():
    with pytest.raises(IntegrityError):
        make_matrix(["s1"], ["q1"], {("s9", "q1"): 1})
    with pytest.raises(IntegrityError):
        make_matrix(["s1"], ["q1"], {("s1", "q9"): 1})


def test_duplicate_ids_rejected():
    with pytest.raises(IntegrityError):
        RatingMatrix(("s1", "s1"), ("q1",), {})
    with pytest.raises(IntegrityError):
        RatingMatrix(("s1",), ("q1", "q1"), {})


def test_prediction_never_overwrites():
    ratings = make_matrix(["s1"], ["q1"], {("s1", "q1"): 4})
    with pytest.raises(IntegrityError):
        ratings.with_predicted({("s1", "q1"): 2.0})


def test_elicited_upsert_supersedes_prediction():
    ratings = make_matrix(["s1"], ["q1"], {}).with_predicted({("s1", "q1"): 2.0})
    revised = ratings.with_elicited({("s1", "q1"): 3})
    assert revised.value("s1", "q1") == 3.0
    assert revised.provenance("s1", "q1") is Provenance.ELICITED


def test_relation_consistent_after_merge_and_prediction():
    old = make_matrix(["s1", "s2"], ["q1"], {("s1", "q1"): 2})
    new = make_matrix(["s2"], ["q2"], {("s2", "q2"): 1})
    augmented = merge_rating_matrices(old, new).with_predicted({("s1", "q2"): 0.5})
    relation = build_relation_matrix(augmented)
    for sid in augmented.stakeholder_ids:
        for rid in augmented.requirement_ids:
            assert relation.has(sid, rid) == augmented.has(sid, rid)


def test_restrict_filters_cells_and_universe():
    ratings = make_matrix(["s1", "s2"], ["q1", "q2"],
                          {("s1", "q1"): 1, ("s2", "q2"): 2})
    sub = ratings.restrict(["s2"], ["q2"])
    assert sub.stakeholder_ids == ("s2",)
    assert sub.requirement_ids == ("q2",)
    assert dict(sub.cells) == {("s2", "q2"): RatingCell(2.0)}


def test_dense_layout_follows_universe_order():
    ratings = make_matrix(["s1", "s2"], ["q1", "q2"], {("s2", "q1"): 3})
    dense = ratings.dense(missing=0.0)
    assert dense.shape == (2, 2)
    assert dense[1, 0] == 3.0
    assert dense.sum() == 3.0


def test_requirement_status_flip():
    req = Requirement("q1", "Login", Status.NEW)
    assert req.as_elicited().status is Status.ELICITED
    assert req.as_elicited().id == "q1"
