"""Metrics and the repeated random sub-sampling experiment harness.

The harness measures how well a partially-elicited, prediction-augmented
re-prioritization tracks two references: the ranking computed from the
complete rating matrix ("ground truth") and the ranking computed from full
elicitation of the observed data (the no-prediction baseline), alongside the
reduction in stakeholders that had to be queried.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .domain import (
    RatingCell,
    RatingMatrix,
    Requirement,
    Role,
    Stakeholder,
    Status,
    merge_rating_matrices,
)
from .errors import EmptySet, InvalidBaseline, InvalidParams, SetMismatch
from .factors import TrainConfig
from .influence import RankedList, prioritize
from .pipeline import incorporate_new_requirements, initial_prioritization, interaction_count


# --- metrics ----------------------------------------------------------------

def average_ranks(values: np.ndarray) -> np.ndarray:
    """Rank 1 for the largest value; equal values share the average of the
    positions they span (fractional ranks)."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(-values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j < len(values) and values[order[j]] == values[order[i]]:
            j += 1
        ranks[order[i:j]] = (i + j + 1) / 2  # positions i+1 .. j, averaged
        i = j
    return ranks


def spearman(list_a: RankedList, list_b: RankedList) -> float:
    """Spearman rank correlation of two prioritized lists over the same
    requirement set: Pearson correlation of their fractional rank vectors,
    with ties taken from equal importance scores."""
    imp_a = list_a.importances()
    imp_b = list_b.importances()
    if set(imp_a) != set(imp_b):
        raise SetMismatch("rankings cover different requirement sets")
    ids = sorted(imp_a)
    ranks_a = average_ranks(np.array([imp_a[i] for i in ids]))
    ranks_b = average_ranks(np.array([imp_b[i] for i in ids]))
    da = ranks_a - ranks_a.mean()
    db = ranks_b - ranks_b.mean()
    var_a = float(da @ da)
    var_b = float(db @ db)
    if var_a == 0.0 or var_b == 0.0:
        # all-tied ranking(s): correlated iff the rank vectors coincide
        return 1.0 if np.array_equal(ranks_a, ranks_b) else 0.0
    rho = float(da @ db) / math.sqrt(var_a * var_b)
    return max(-1.0, min(1.0, rho))


def rmse(predicted: Mapping, actual: Mapping) -> float:
    """Root mean squared difference over a shared, non-empty cell set."""
    if not predicted and not actual:
        raise EmptySet("no cells to compare")
    if set(predicted) != set(actual):
        raise SetMismatch("predicted and actual cover different cells")
    errors = [predicted[k] - actual[k] for k in predicted]
    return math.sqrt(sum(e * e for e in errors) / len(errors))


def interaction_reduction(baseline_users: int, reduced_users: int) -> float:
    """Percentage of stakeholder queries saved relative to the baseline.

    The caller reports this rounded to one decimal.
    """
    if baseline_users <= 0:
        raise InvalidBaseline(f"baseline user count must be positive, got {baseline_users}")
    if reduced_users < 0 or reduced_users > baseline_users:
        raise InvalidBaseline(
            f"expected 0 <= reduced count <= baseline, got {reduced_users} vs {baseline_users}")
    return 100.0 * (baseline_users - reduced_users) / baseline_users


# --- synthetic data ---------------------------------------------------------

@dataclass(frozen=True)
class SyntheticDataset:
    """A generated project whose complete rating matrix is known.

    ``full`` holds every cell (the ground truth); ``observed`` is the
    density-sampled subset playing the role of what stakeholders actually
    provided.
    """

    roles: tuple[Role, ...]
    stakeholders: tuple[Stakeholder, ...]
    requirements: tuple[Requirement, ...]
    observed: RatingMatrix
    full: RatingMatrix
    planted_rank: int
    noise_std: float
    density: float
    seed: int


def generate_synthetic_dataset(n_stakeholders: int = 62, n_requirements: int = 82,
                               n_roles: int = 5, planted_rank: int = 3,
                               noise_std: float = 0.5, density: float = 0.6,
                               seed: int = 0, scale_min: float = 0.0,
                               scale_max: float = 5.0) -> SyntheticDataset:
    """Deterministic synthetic project built around a planted low-rank matrix.

    Ratings are a product of nonnegative factor matrices rescaled to top out
    at ``scale_max`` (so with ``scale_min`` 0 and no noise the matrix has
    exactly ``planted_rank``; a nonzero ``scale_min`` shifts everything and
    raises the effective rank by one). Gaussian noise is added per cell and
    clamped to the scale, then cells are kept independently with probability
    ``density``. Role and within-role ranks are random permutations.
    """
    if min(n_stakeholders, n_requirements, n_roles, planted_rank) < 1:
        raise InvalidParams("all sizes must be at least 1")
    if n_roles > n_stakeholders:
        raise InvalidParams(f"{n_roles} roles need at least that many stakeholders")
    if not 0.0 < density <= 1.0:
        raise InvalidParams(f"density must be in (0, 1], got {density}")
    if noise_std < 0:
        raise InvalidParams(f"noise_std must be >= 0, got {noise_std}")
    if not scale_min < scale_max:
        raise InvalidParams(f"bad scale [{scale_min}, {scale_max}]")

    rng = np.random.default_rng(seed)

    role_ranks = rng.permutation(n_roles) + 1
    roles = tuple(Role(f"role{k + 1:02d}", f"Role {k + 1}", int(role_ranks[k]))
                  for k in range(n_roles))

    assignment = rng.permutation(n_stakeholders)
    role_of = {f"s{assignment[i] + 1:03d}": roles[i % n_roles].id
               for i in range(n_stakeholders)}
    members: dict[str, list[str]] = {r.id: [] for r in roles}
    stakeholder_ids = tuple(f"s{i + 1:03d}" for i in range(n_stakeholders))
    for sid in stakeholder_ids:
        members[role_of[sid]].append(sid)
    rank_of: dict[str, int] = {}
    for role in roles:
        ranks = rng.permutation(len(members[role.id])) + 1
        for sid, rk in zip(members[role.id], ranks):
            rank_of[sid] = int(rk)
    stakeholders = tuple(Stakeholder(sid, f"Stakeholder {i + 1}", role_of[sid], rank_of[sid])
                         for i, sid in enumerate(stakeholder_ids))

    requirement_ids = tuple(f"q{j + 1:03d}" for j in range(n_requirements))
    requirements = tuple(Requirement(rid, f"Requirement {j + 1}")
                         for j, rid in enumerate(requirement_ids))

    left = rng.uniform(0.0, 1.0, size=(n_stakeholders, planted_rank))
    right = rng.uniform(0.0, 1.0, size=(n_requirements, planted_rank))
    planted = left @ right.T
    # ratio before scaling, so rounding cannot push the top cell past the scale
    planted = np.clip(scale_min + (scale_max - scale_min) * (planted / planted.max()),
                      scale_min, scale_max)
    if noise_std > 0:
        planted = np.clip(planted + rng.normal(0.0, noise_std, size=planted.shape),
                          scale_min, scale_max)
    keep = rng.random(size=planted.shape) < density if density < 1.0 else \
        np.ones_like(planted, dtype=bool)

    full_cells = {}
    observed_cells = {}
    for i, sid in enumerate(stakeholder_ids):
        for j, rid in enumerate(requirement_ids):
            cell = RatingCell(float(planted[i, j]))
            full_cells[(sid, rid)] = cell
            if keep[i, j]:
                observed_cells[(sid, rid)] = cell
    full = RatingMatrix(stakeholder_ids, requirement_ids, full_cells,
                        scale_min, scale_max)
    observed = RatingMatrix(stakeholder_ids, requirement_ids, observed_cells,
                            scale_min, scale_max)
    return SyntheticDataset(roles, stakeholders, requirements, observed, full,
                            planted_rank, noise_std, density, seed)


# --- experiment harness -----------------------------------------------------

@dataclass(frozen=True)
class ExperimentSetting:
    n_train_requirements: int
    n_manual_users: int
    n_new_requirements: int
    prediction_fraction: float = 0.25
    repeats: int = 30
    rng_seed: int = 0
    train: TrainConfig = field(default_factory=TrainConfig)


@dataclass(frozen=True)
class RepeatOutcome:
    correlation: float            # augmented ranking vs ground truth
    baseline_correlation: float   # fully elicited ranking vs ground truth
    rmse: float                   # predicted cells vs ground truth (nan if none)
    predicted_cells: int
    users_queried: int            # manual raters who actually rated
    users_baseline: int           # raters under full elicitation
    reduction: float              # percent, one decimal


@dataclass(frozen=True)
class ExperimentReport:
    setting: ExperimentSetting
    outcomes: tuple[RepeatOutcome, ...]
    mean_correlation: float
    correlation_variance: float
    mean_baseline_correlation: float
    mean_rmse: float
    mean_reduction: float


def run_experiment(dataset: SyntheticDataset, setting: ExperimentSetting) -> ExperimentReport:
    """Repeated random sub-sampling: each repeat draws the training
    requirements, the new requirements and the manual-rater subset afresh,
    runs the incorporate flow, and scores it against ground truth and the
    full-elicitation baseline."""
    n_req = len(dataset.requirements)
    n_stake = len(dataset.stakeholders)
    if setting.n_train_requirements + setting.n_new_requirements > n_req:
        raise InvalidParams("train + new exceeds the dataset's requirement count")
    if setting.n_manual_users > n_stake:
        raise InvalidParams("more manual users than stakeholders")
    if min(setting.n_train_requirements, setting.n_new_requirements,
           setting.n_manual_users) < 1:
        raise InvalidParams("setting sizes must be at least 1")
    if setting.repeats < 1:
        raise InvalidParams("repeats must be at least 1")

    all_req_ids = np.array([r.id for r in dataset.requirements])
    all_sids = np.array([s.id for s in dataset.stakeholders])

    outcomes = []
    for child in np.random.SeedSequence(setting.rng_seed).spawn(setting.repeats):
        rng = np.random.default_rng(child)
        req_perm = rng.permutation(n_req)
        train_ids = tuple(all_req_ids[req_perm[:setting.n_train_requirements]])
        new_ids = tuple(all_req_ids[req_perm[
            setting.n_train_requirements:
            setting.n_train_requirements + setting.n_new_requirements]])
        manual_ids = tuple(all_sids[rng.permutation(n_stake)[:setting.n_manual_users]])
        repeat_seed = int(rng.integers(0, 2**63 - 1))

        outcomes.append(_run_repeat(dataset, setting, train_ids, new_ids,
                                    manual_ids, repeat_seed))

    corr = np.array([o.correlation for o in outcomes])
    base = np.array([o.baseline_correlation for o in outcomes])
    rmses = np.array([o.rmse for o in outcomes])
    reds = np.array([o.reduction for o in outcomes])
    return ExperimentReport(
        setting, tuple(outcomes),
        mean_correlation=float(corr.mean()),
        correlation_variance=float(corr.var(ddof=1)) if len(corr) > 1 else 0.0,
        mean_baseline_correlation=float(base.mean()),
        mean_rmse=float(np.nanmean(rmses)) if not np.all(np.isnan(rmses)) else float("nan"),
        mean_reduction=float(reds.mean()),
    )


def _run_repeat(dataset: SyntheticDataset, setting: ExperimentSetting,
                train_ids, new_ids, manual_ids, repeat_seed: int) -> RepeatOutcome:
    req_by_id = {r.id: r for r in dataset.requirements}
    sids = tuple(s.id for s in dataset.stakeholders)

    train_reqs = [req_by_id[rid] for rid in train_ids]
    state = initial_prioritization(
        dataset.roles, dataset.stakeholders, train_reqs,
        dataset.observed.restrict(sids, train_ids))

    new_reqs = [Requirement(rid, req_by_id[rid].title, Status.NEW) for rid in new_ids]
    partial = dataset.observed.restrict(manual_ids, new_ids)
    config = replace(setting.train, rng_seed=repeat_seed)
    result = incorporate_new_requirements(state, new_reqs, partial,
                                          setting.prediction_fraction, config)

    # no-prediction baseline: everybody who had an opinion is queried
    full_partial = dataset.observed.restrict(sids, new_ids)
    baseline_matrix = merge_rating_matrices(state.ratings, full_partial)
    baseline_ranking = prioritize(baseline_matrix, dataset.roles, dataset.stakeholders)
    users_baseline = interaction_count(full_partial, new_ids)

    ground_truth = prioritize(dataset.full.restrict(sids, train_ids + new_ids),
                              dataset.roles, dataset.stakeholders)

    predicted = result.state.ratings.predicted_cells()
    if predicted:
        actual = {cell: dataset.full.value(*cell) for cell in predicted}
        rmse_val = rmse(predicted, actual)
    else:
        rmse_val = float("nan")

    reduction = interaction_reduction(users_baseline, result.interactions) \
        if users_baseline > 0 else float("nan")
    return RepeatOutcome(
        correlation=spearman(result.ranking, ground_truth),
        baseline_correlation=spearman(baseline_ranking, ground_truth),
        rmse=rmse_val,
        predicted_cells=result.predicted_count,
        users_queried=result.interactions,
        users_baseline=users_baseline,
        reduction=round(reduction, 1),
    )
