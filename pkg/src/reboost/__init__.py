"""Re-scale gradient boosting toolkit.

Additive-model boosting over weak-learner dictionaries (decision stumps,
small least-squares CART trees, explicit finite dictionaries) with five
training drivers: plain line-search boosting, re-scale boosting, shrunken
steps, interval-truncated line search, and fixed-epsilon steps. Includes
convex losses, synthetic data generators, a tuning/benchmark harness and a
command-line interface.
"""

from reboost.core import (
    Dataset,
    DegenerateDirectionError,
    EnsembleModel,
    InvalidInputError,
    InvalidSpecError,
    Task,
    TrainTrace,
    TraceRecord,
    UnboundedDescentError,
    truncate_predictions,
)
from reboost.losses import LossKind
from reboost.boosters import (
    DictionaryLearner,
    Epsilon,
    Plain,
    Rescale,
    ShrinkageSchedule,
    Shrunk,
    StumpLearner,
    TrainConfig,
    TreeLearner,
    Truncated,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "DegenerateDirectionError",
    "DictionaryLearner",
    "EnsembleModel",
    "Epsilon",
    "InvalidInputError",
    "InvalidSpecError",
    "LossKind",
    "Plain",
    "Rescale",
    "ShrinkageSchedule",
    "Shrunk",
    "StumpLearner",
    "Task",
    "TraceRecord",
    "TrainConfig",
    "TrainTrace",
    "TreeLearner",
    "Truncated",
    "UnboundedDescentError",
    "train",
    "truncate_predictions",
]
