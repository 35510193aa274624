"""Training drivers sharing one skeleton: select a weak learner against the
pseudo-residuals, pick a step size, update the additive model.

Variants: plain line-search boosting; re-scale boosting (the composite
estimator is multiplied by (1 - alpha_k) before each line search); shrunken
steps nu * beta; interval-truncated line search with a shrinking bound; and
fixed-size epsilon steps signed by the descent direction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from reboost.core import (
    Dataset,
    EnsembleModel,
    InvalidInputError,
    InvalidSpecError,
    Task,
    TraceRecord,
    TrainTrace,
    UnboundedDescentError,
)
from reboost.learners import StumpFitter, fit_tree
from reboost.linesearch import LineSearchOptions, line_search
from reboost.losses import LossKind, empirical_risk, neg_gradient_inner, pseudo_residuals


@dataclass(frozen=True)
class ShrinkageSchedule:
    """Per-iteration rescale degree alpha_k = c4 / (c5 * k + c6).

    Construction only pins the shape (non-negative, non-increasing);
    the [0, 1) range is enforced where a degree is actually evaluated,
    so a schedule like 2/(k+1) is usable wherever its first degree is
    never requested and fails loudly where it is.
    """

    c4: float
    c5: float
    c6: float

    def __post_init__(self):
        if self.c4 < 0 or self.c5 < 0 or self.c5 + self.c6 <= 0:
            raise InvalidSpecError("schedule requires c4 >= 0, c5 >= 0, c5 + c6 > 0")

    @classmethod
    def theorem(cls) -> "ShrinkageSchedule":
        """The 3/(k+3) schedule with the proven convergence guarantee."""
        return cls(3.0, 1.0, 3.0)

    @classmethod
    def experimental(cls, u: float) -> "ShrinkageSchedule":
        """The tunable 2/(k+u) family used in the benchmark experiments."""
        return cls(2.0, 1.0, float(u))

    def alpha(self, k: int) -> float:
        if k < 1:
            raise InvalidInputError(f"iteration index must be >= 1, got {k}")
        a = self.c4 / (self.c5 * k + self.c6)
        if not (0.0 <= a < 1.0):
            raise InvalidSpecError(f"alpha_{k} = {a} outside [0, 1)")
        return a


def alpha_at(schedule: ShrinkageSchedule, k: int) -> float:
    return schedule.alpha(k)


@dataclass(frozen=True)
class Plain:
    pass


@dataclass(frozen=True)
class Rescale:
    schedule: ShrinkageSchedule


@dataclass(frozen=True)
class Shrunk:
    nu: float

    def __post_init__(self):
        if not (0.0 < self.nu <= 1.0):
            raise InvalidSpecError(f"nu must be in (0, 1], got {self.nu}")


@dataclass(frozen=True)
class Truncated:
    t0: float
    exponent: float = 2.0 / 3.0

    def __post_init__(self):
        if not self.t0 > 0:
            raise InvalidSpecError(f"t0 must be positive, got {self.t0}")

    def bound_at(self, k: int) -> float:
        return self.t0 * k ** (-self.exponent)


@dataclass(frozen=True)
class Epsilon:
    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise InvalidSpecError(f"eps must be positive, got {self.eps}")


Variant = Plain | Rescale | Shrunk | Truncated | Epsilon


@dataclass(frozen=True)
class StumpLearner:
    pass


@dataclass(frozen=True)
class TreeLearner:
    splits: int

    def __post_init__(self):
        if self.splits < 1:
            raise InvalidSpecError(f"splits must be >= 1, got {self.splits}")


@dataclass(frozen=True)
class DictionaryLearner:
    """Explicit finite dictionary; selection maximizes |negative-gradient
    inner product| over the atoms (the dictionary is treated as closed
    under sign flips, the line search supplies the sign)."""

    atoms: tuple


LearnerSpec = StumpLearner | TreeLearner | DictionaryLearner


@dataclass(frozen=True)
class TrainConfig:
    max_iterations: int
    loss: LossKind
    learner: LearnerSpec
    variant: Variant
    record_trace: bool = True

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InvalidSpecError("max_iterations must be >= 1")


class _FitSelector:
    """Least-squares fit of a stump or tree to the pseudo-residuals."""

    def __init__(self, spec: LearnerSpec, X: np.ndarray):
        self.spec = spec
        self.stumps = StumpFitter(X) if isinstance(spec, StumpLearner) else None

    def select(self, X: np.ndarray, residuals: np.ndarray):
        if self.stumps is not None:
            learner = self.stumps.fit(residuals)
        else:
            learner = fit_tree(X, residuals, self.spec.splits)
        gvals = learner.evaluate(X)
        if not np.any(gvals != 0.0):
            return None, None
        return learner, gvals


class _DictionarySelector:
    """Exact projection of gradient over a finite dictionary."""

    def __init__(self, atoms: tuple, X: np.ndarray):
        self.atoms = atoms
        self.values = np.column_stack([a.evaluate(X) for a in atoms])

    def select(self, X: np.ndarray, residuals: np.ndarray):
        inner = residuals @ self.values
        idx = int(np.argmax(np.abs(inner)))
        if inner[idx] == 0.0:
            return None, None
        return self.atoms[idx], self.values[:, idx]


def train(data: Dataset, config: TrainConfig, seed: int = 0) -> tuple[EnsembleModel, TrainTrace]:
    """Run the configured boosting variant for up to max_iterations.

    Stops early when the selected direction is identically zero (no
    first-order progress possible). An unbounded line search is capped at
    the last bracket edge and noted in the trace. ``seed`` is recorded for
    provenance; every step of the procedure is deterministic.
    """
    if config.loss.is_classification and data.task is not Task.CLASSIFICATION:
        raise InvalidInputError(f"{config.loss.value} loss needs a classification dataset")

    X, y = data.features, data.targets
    model = EnsembleModel(n_features=data.n_features)
    trace = TrainTrace()
    preds = np.full(data.n_samples, model.intercept)

    if isinstance(config.learner, DictionaryLearner):
        selector = _DictionarySelector(config.learner.atoms, X)
    else:
        selector = _FitSelector(config.learner, X)

    variant = config.variant
    opts = LineSearchOptions()

    for k in range(1, config.max_iterations + 1):
        residuals = pseudo_residuals(config.loss, preds, y)
        learner, gvals = selector.select(X, residuals)
        if learner is None:
            trace.stopped_early = f"degenerate direction at iteration {k}"
            break

        alpha = 0.0
        note = ""
        if isinstance(variant, Rescale):
            alpha = variant.schedule.alpha(k)
            base = (1.0 - alpha) * preds if alpha != 0.0 else preds
            beta, note = _searched_step(config.loss, base, gvals, y, opts)
            model.rescale(alpha)
        elif isinstance(variant, Plain):
            base = preds
            beta, note = _searched_step(config.loss, base, gvals, y, opts)
        elif isinstance(variant, Shrunk):
            base = preds
            raw, note = _searched_step(config.loss, base, gvals, y, opts)
            beta = variant.nu * raw
        elif isinstance(variant, Truncated):
            base = preds
            bounded = LineSearchOptions(tolerance=opts.tolerance, bound=variant.bound_at(k))
            beta = line_search(config.loss, base, gvals, y, bounded)
        else:  # Epsilon: fixed step along the descent sign
            base = preds
            direction = np.sign(neg_gradient_inner(config.loss, preds, y, gvals))
            if direction == 0.0:
                trace.stopped_early = f"degenerate direction at iteration {k}"
                break
            beta = variant.eps * direction

        model.add_term(beta, learner)
        preds = base + beta * gvals
        risk = empirical_risk(config.loss, preds, y)
        if config.record_trace:
            trace.append(TraceRecord(k, learner.describe(), float(beta), alpha, risk, note))

    return model, trace


def _searched_step(kind, base, gvals, y, opts):
    """Unbounded line search, capping the step at the last bracket edge
    when the descent never turns (e.g. exponential loss on separable data)."""
    try:
        return line_search(kind, base, gvals, y, opts), ""
    except UnboundedDescentError as err:
        return err.edge, "capped-beta"


def excess_risk_trace(trace: TrainTrace, reference: float) -> np.ndarray:
    """Per-iteration empirical risk minus a reference risk."""
    return trace.risks - reference
