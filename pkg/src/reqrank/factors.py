"""Latent-factor rating model.

Each stakeholder gets a parameter vector and each requirement a feature
vector; a rating is approximated by their inner product. Both factor sets are
initialized to small random values and fitted together by full-batch gradient
descent on the squared reconstruction error (optionally ridge-regularized).
Full-batch keeps training deterministic for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .domain import RatingMatrix
from .errors import Divergence, InvalidConfig, InvalidParams, UnknownCell, UntrainedModel


@dataclass(frozen=True)
class TrainConfig:
    n_features: int = 10
    learning_rate: float = 0.005
    regularization: float = 0.02
    max_iterations: int = 5000
    convergence_tol: float = 1e-6  # on relative cost change
    init_half_width: float = 0.05
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_features < 1:
            raise InvalidConfig(f"n_features must be >= 1, got {self.n_features}")
        if self.learning_rate <= 0:
            raise InvalidConfig(f"learning_rate must be positive, got {self.learning_rate}")
        if self.regularization < 0:
            raise InvalidConfig(f"regularization must be >= 0, got {self.regularization}")
        if self.max_iterations < 1:
            raise InvalidConfig(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.convergence_tol < 0:
            raise InvalidConfig(f"convergence_tol must be >= 0, got {self.convergence_tol}")
        if self.init_half_width < 0:
            raise InvalidConfig(f"init_half_width must be >= 0, got {self.init_half_width}")


@dataclass(frozen=True)
class FactorModel:
    stakeholder_ids: tuple[str, ...]
    requirement_ids: tuple[str, ...]
    theta: np.ndarray  # (stakeholders x n_features)
    x: np.ndarray      # (requirements x n_features)
    trained: bool = False

    @property
    def n_features(self) -> int:
        return int(self.theta.shape[1])

    def row_of(self, stakeholder_id: str) -> int:
        try:
            return self.stakeholder_ids.index(stakeholder_id)
        except ValueError:
            raise UnknownCell(f"unknown stakeholder {stakeholder_id!r}") from None

    def col_of(self, requirement_id: str) -> int:
        try:
            return self.requirement_ids.index(requirement_id)
        except ValueError:
            raise UnknownCell(f"unknown requirement {requirement_id!r}") from None


@dataclass(frozen=True)
class CostReport:
    costs: tuple[float, ...]  # costs[0] initial, costs[t] after update t
    converged: bool
    iterations_used: int = field(default=0)

    @property
    def final_cost(self) -> float:
        return self.costs[-1]


def init_factors(stakeholder_ids: Sequence[str], requirement_ids: Sequence[str],
                 config: TrainConfig) -> FactorModel:
    """Seeded uniform init in [-init_half_width, +init_half_width]; the same
    seed always yields bit-identical factors."""
    if not stakeholder_ids or not requirement_ids:
        raise InvalidConfig("need at least one stakeholder and one requirement")
    rng = np.random.default_rng(config.rng_seed)
    hw = config.init_half_width
    theta = rng.uniform(-hw, hw, size=(len(stakeholder_ids), config.n_features))
    x = rng.uniform(-hw, hw, size=(len(requirement_ids), config.n_features))
    return FactorModel(tuple(stakeholder_ids), tuple(requirement_ids), theta, x)


def _observed_arrays(model: FactorModel, observed: RatingMatrix):
    """Observed cells as (rows, cols, values) in canonical (row, col) order,
    so results do not depend on cell insertion history."""
    s_index = {sid: i for i, sid in enumerate(model.stakeholder_ids)}
    r_index = {rid: j for j, rid in enumerate(model.requirement_ids)}
    triples = []
    for (sid, rid), cell in observed.cells.items():
        if sid not in s_index:
            raise UnknownCell(f"observed cell references unknown stakeholder {sid!r}")
        if rid not in r_index:
            raise UnknownCell(f"observed cell references unknown requirement {rid!r}")
        triples.append((s_index[sid], r_index[rid], cell.value))
    triples.sort(key=lambda t: (t[0], t[1]))
    if triples:
        rows, cols, values = zip(*triples)
    else:
        rows, cols, values = (), (), ()
    return (np.array(rows, dtype=np.intp), np.array(cols, dtype=np.intp),
            np.array(values, dtype=float))


def cost(model: FactorModel, observed: RatingMatrix, regularization: float) -> float:
    """Half the squared reconstruction error over the observed cells plus the
    ridge penalty on both factor matrices."""
    rows, cols, values = _observed_arrays(model, observed)
    j, _, _ = _kernels.cost_and_gradients(model.theta, model.x, rows, cols,
                                          values, regularization)
    return j


def gradients(model: FactorModel, observed: RatingMatrix,
              regularization: float) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradients of the cost with respect to theta and x."""
    rows, cols, values = _observed_arrays(model, observed)
    _, grad_theta, grad_x = _kernels.cost_and_gradients(model.theta, model.x, rows,
                                                        cols, values, regularization)
    return grad_theta, grad_x


def train(model: FactorModel, observed: RatingMatrix,
          config: TrainConfig) -> tuple[FactorModel, CostReport]:
    """Gradient-descend both factor matrices until the relative cost change
    drops below ``convergence_tol`` or ``max_iterations`` is reached."""
    rows, cols, values = _observed_arrays(model, observed)
    if len(rows) == 0:
        raise InvalidParams("training needs at least one observed cell")
    theta, x, costs, status = _kernels.run_gd(
        model.theta, model.x, rows, cols, values,
        config.learning_rate, config.regularization,
        config.convergence_tol, config.max_iterations)
    if status == _kernels.STATUS_DIVERGED:
        raise Divergence(
            f"cost became non-finite after {len(costs) - 1} iterations; "
            "lower the learning rate")
    trained = FactorModel(model.stakeholder_ids, model.requirement_ids,
                          theta, x, trained=True)
    report = CostReport(tuple(float(c) for c in costs),
                        converged=status == _kernels.STATUS_CONVERGED,
                        iterations_used=len(costs) - 1)
    return trained, report


def predict_rating(model: FactorModel, stakeholder_id: str, requirement_id: str,
                   scale: tuple[float, float]) -> float:
    """Inner product of the two factor vectors, clamped to the rating scale."""
    if not model.trained:
        raise UntrainedModel("train the model before predicting")
    raw = float(model.theta[model.row_of(stakeholder_id)]
                @ model.x[model.col_of(requirement_id)])
    lo, hi = scale
    return min(max(raw, lo), hi)
