"""Influence-weighted requirements prioritization with collaborative rating
prediction.

The package ranks requirements by stakeholder ratings weighted by a
hierarchy-derived influence measure, estimates which missing ratings are the
most likely to exist, predicts those through a regularized latent-factor
model, and folds the predictions back into the ranking so that new
requirements can be triaged after querying only a slice of the crowd.
"""

from .domain import (
    Cell,
    RatingCell,
    RatingMatrix,
    RelationMatrix,
    Requirement,
    Role,
    Stakeholder,
    Status,
    Provenance,
    build_relation_matrix,
    merge_rating_matrices,
)
from .errors import ReqRankError
from .evaluation import (
    ExperimentReport,
    ExperimentSetting,
    SyntheticDataset,
    generate_synthetic_dataset,
    interaction_reduction,
    rmse,
    run_experiment,
    spearman,
)
from .factors import CostReport, FactorModel, TrainConfig, predict_rating, train
from .influence import (
    InfluenceTable,
    RankedItem,
    RankedList,
    compute_influence_table,
    prioritize,
    requirement_importance,
)
from .pipeline import (
    IncorporateResult,
    ProjectState,
    incorporate_new_requirements,
    initial_prioritization,
    reprioritize_with_predictions,
)
from .selector import (
    LikelihoodScore,
    PredictionPlan,
    build_prediction_plan,
    rating_likelihood,
    score_missing_cells,
)
from .similarity import Method, SimilarityMatrix, similarity_matrix

__version__ = "0.1.0"

__all__ = [
    "Cell",
    "CostReport",
    "ExperimentReport",
    "ExperimentSetting",
    "FactorModel",
    "IncorporateResult",
    "InfluenceTable",
    "LikelihoodScore",
    "Method",
    "PredictionPlan",
    "ProjectState",
    "Provenance",
    "RankedItem",
    "RankedList",
    "RatingCell",
    "RatingMatrix",
    "RelationMatrix",
    "ReqRankError",
    "Requirement",
    "Role",
    "SimilarityMatrix",
    "Stakeholder",
    "Status",
    "SyntheticDataset",
    "TrainConfig",
    "build_prediction_plan",
    "build_relation_matrix",
    "compute_influence_table",
    "generate_synthetic_dataset",
    "incorporate_new_requirements",
    "initial_prioritization",
    "interaction_reduction",
    "merge_rating_matrices",
    "predict_rating",
    "prioritize",
    "rating_likelihood",
    "reprioritize_with_predictions",
    "requirement_importance",
    "rmse",
    "run_experiment",
    "score_missing_cells",
    "similarity_matrix",
    "spearman",
    "train",
    "__version__",
]
