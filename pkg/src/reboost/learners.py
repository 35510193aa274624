"""Weak learner dictionary: decision stumps, small least-squares CART trees,
and piecewise-constant interval atoms for explicit finite dictionaries.

Fitting minimizes the squared error against pseudo-residuals, which is the
practical surrogate for selecting the dictionary element with the largest
normalized negative-gradient inner product (for two-leaf partitions the two
selections coincide; see tests).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from reboost.core import InvalidInputError

# a split must reduce the leaf SSE by more than this relative amount
_MIN_GAIN_REL = 1e-12


@dataclass(frozen=True)
class DecisionStump:
    """Two-leaf axis-aligned rule: left value if x[feature] <= threshold."""

    feature: int
    threshold: float
    left_value: float
    right_value: float
    scale: float = 1.0
    degenerate: bool = False  # no valid split existed (all rows identical)

    def evaluate(self, features) -> np.ndarray:
        X = np.atleast_2d(np.asarray(features, dtype=float))
        if self.feature >= X.shape[1]:
            raise InvalidInputError(
                f"stump uses feature {self.feature}, input has {X.shape[1]}"
            )
        out = np.where(X[:, self.feature] <= self.threshold,
                       self.left_value, self.right_value)
        return self.scale * out

    def evaluate_row(self, x) -> float:
        return float(self.evaluate(np.atleast_2d(x))[0])

    def describe(self) -> str:
        return f"stump[f{self.feature}@{self.threshold:.6g}]"


@dataclass(frozen=True)
class TreeNode:
    """Internal node (feature >= 0) or leaf (feature == -1, carries value)."""

    feature: int = -1
    threshold: float = 0.0
    left: int = -1
    right: int = -1
    value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


@dataclass(frozen=True)
class RegressionTree:
    """Binary regression tree with ``splits`` internal nodes, splits+1 leaves."""

    nodes: tuple[TreeNode, ...]
    splits: int
    scale: float = 1.0
    _max_feature: int = field(init=False, repr=False, compare=False, default=-1)

    def __post_init__(self):
        internal = [n for n in self.nodes if not n.is_leaf]
        object.__setattr__(
            self, "_max_feature",
            max((n.feature for n in internal), default=-1),
        )
        for n in internal:
            if not (0 <= n.left < len(self.nodes) and 0 <= n.right < len(self.nodes)):
                raise InvalidInputError("tree child index out of range")

    def evaluate(self, features) -> np.ndarray:
        X = np.atleast_2d(np.asarray(features, dtype=float))
        if self._max_feature >= X.shape[1]:
            raise InvalidInputError(
                f"tree uses feature {self._max_feature}, input has {X.shape[1]}"
            )
        out = np.empty(X.shape[0])
        stack = [(0, np.arange(X.shape[0]))]
        while stack:
            node_id, rows = stack.pop()
            node = self.nodes[node_id]
            if node.is_leaf:
                out[rows] = node.value
            elif rows.size:
                go_left = X[rows, node.feature] <= node.threshold
                stack.append((node.left, rows[go_left]))
                stack.append((node.right, rows[~go_left]))
        return self.scale * out

    def evaluate_row(self, x) -> float:
        return float(self.evaluate(np.atleast_2d(x))[0])

    def describe(self) -> str:
        return f"tree[J{self.splits}]"


@dataclass(frozen=True)
class IntervalAtom:
    """Indicator of [low, high) on one feature, scaled by ``value``."""

    low: float
    high: float
    value: float
    feature: int = 0

    def evaluate(self, features) -> np.ndarray:
        X = np.atleast_2d(np.asarray(features, dtype=float))
        if self.feature >= X.shape[1]:
            raise InvalidInputError(
                f"atom uses feature {self.feature}, input has {X.shape[1]}"
            )
        col = X[:, self.feature]
        return np.where((col >= self.low) & (col < self.high), self.value, 0.0)

    def evaluate_row(self, x) -> float:
        return float(self.evaluate(np.atleast_2d(x))[0])

    def describe(self) -> str:
        return f"atom[{self.low:.6g},{self.high:.6g})"


def _best_split(X: np.ndarray, r: np.ndarray):
    """Best least-squares split of (X, r) over all feature/midpoint pairs.

    Returns (score, feature, threshold, left_mean, right_mean, left_count)
    where score = S_L^2/n_L + S_R^2/n_R; maximizing the score minimizes the
    split SSE. Returns None when no feature has two distinct values. Ties
    are broken toward the lowest feature index, then the lowest threshold.
    """
    m = X.shape[0]
    total = r.sum()
    counts = np.arange(1, m)
    best = None
    for j in range(X.shape[1]):
        v = X[:, j]
        order = np.argsort(v, kind="stable")
        vs = v[order]
        boundary = vs[:-1] != vs[1:]
        if not boundary.any():
            continue
        left_sums = np.cumsum(r[order])[:-1]
        score = np.where(
            boundary,
            left_sums * left_sums / counts
            + (total - left_sums) ** 2 / (m - counts),
            -np.inf,
        )
        p = int(np.argmax(score))
        if best is None or score[p] > best[0]:
            thr = 0.5 * (vs[p] + vs[p + 1])
            if not (vs[p] <= thr < vs[p + 1]):  # midpoint rounded onto a datum
                thr = vs[p]
            n_left = p + 1
            best = (
                float(score[p]),
                j,
                float(thr),
                float(left_sums[p] / n_left),
                float((total - left_sums[p]) / (m - n_left)),
                n_left,
            )
    return best


def fit_stump(features, residuals) -> DecisionStump:
    """Least-squares optimal stump over all (feature, midpoint) candidates."""
    X = np.atleast_2d(np.asarray(features, dtype=float))
    r = np.asarray(residuals, dtype=float).ravel()
    if X.shape[0] < 2 or X.shape[0] != r.shape[0]:
        raise InvalidInputError("need at least 2 rows and matching residuals")
    found = _best_split(X, r)
    if found is None:
        mu = float(r.mean())
        return DecisionStump(0, float(X[0, 0]), mu, mu, degenerate=True)
    _, j, thr, _, _, _ = found
    left = X[:, j] <= thr
    # leaf means recomputed from the partition masks (not the prefix sums)
    # so they match a direct exhaustive scan bit for bit
    return DecisionStump(j, thr, float(r[left].mean()), float(r[~left].mean()))


class StumpFitter:
    """Repeated stump fitting against one fixed design matrix.

    Boosting refits a stump to fresh residuals every iteration while the
    feature order never changes, so the per-feature sort, the distinct-value
    boundaries and the candidate thresholds are computed once up front.
    Produces the same stump as ``fit_stump`` (same scoring arithmetic, same
    tie-breaking).
    """

    def __init__(self, features):
        X = np.atleast_2d(np.asarray(features, dtype=float))
        if X.shape[0] < 2:
            raise InvalidInputError("need at least 2 rows")
        self.X = X
        m = X.shape[0]
        self._counts = np.arange(1, m)
        self._columns = []  # (feature, order, boundary mask, thresholds)
        for j in range(X.shape[1]):
            order = np.argsort(X[:, j], kind="stable")
            vs = X[order, j]
            boundary = vs[:-1] != vs[1:]
            if not boundary.any():
                continue
            thr = 0.5 * (vs[:-1] + vs[1:])
            rounded = ~((vs[:-1] <= thr) & (thr < vs[1:]))
            thr[rounded] = vs[:-1][rounded]
            self._columns.append((j, order, boundary, thr))

    def fit(self, residuals) -> DecisionStump:
        r = np.asarray(residuals, dtype=float).ravel()
        m = self.X.shape[0]
        if r.shape[0] != m:
            raise InvalidInputError("residual length mismatch")
        if not self._columns:
            mu = float(r.mean())
            return DecisionStump(0, float(self.X[0, 0]), mu, mu, degenerate=True)
        total = r.sum()
        counts = self._counts
        best = None
        for j, order, boundary, thr in self._columns:
            left_sums = np.cumsum(r[order])[:-1]
            score = np.where(
                boundary,
                left_sums * left_sums / counts
                + (total - left_sums) ** 2 / (m - counts),
                -np.inf,
            )
            p = int(np.argmax(score))
            if best is None or score[p] > best[0]:
                best = (float(score[p]), j, float(thr[p]))
        _, j, threshold = best
        left = self.X[:, j] <= threshold
        return DecisionStump(j, threshold,
                             float(r[left].mean()), float(r[~left].mean()))


def fit_tree(features, residuals, splits: int) -> RegressionTree:
    """Greedy best-first CART with ``splits`` internal nodes.

    Each round splits the leaf whose best split yields the largest squared
    error reduction; stops early when no leaf offers a positive reduction.
    Leaves carry residual means.
    """
    if splits < 1:
        raise InvalidInputError(f"splits must be >= 1, got {splits}")
    X = np.atleast_2d(np.asarray(features, dtype=float))
    r = np.asarray(residuals, dtype=float).ravel()
    if X.shape[0] < splits + 1:
        raise InvalidInputError(f"need at least {splits + 1} rows for {splits} splits")

    nodes: list[TreeNode] = [TreeNode(value=float(r.mean()))]
    # per-leaf: node id -> (row indices, best-split tuple or None, sse reduction)
    pending: dict[int, tuple[np.ndarray, tuple | None, float]] = {}

    def leaf_candidate(node_id: int, rows: np.ndarray) -> None:
        sub_r = r[rows]
        found = _best_split(X[rows], sub_r) if rows.size >= 2 else None
        if found is None:
            pending[node_id] = (rows, None, 0.0)
            return
        sse = float(np.sum((sub_r - sub_r.mean()) ** 2))
        reduction = found[0] - sub_r.sum() ** 2 / rows.size
        if reduction <= _MIN_GAIN_REL * sse:
            pending[node_id] = (rows, None, 0.0)
        else:
            pending[node_id] = (rows, found, float(reduction))

    leaf_candidate(0, np.arange(X.shape[0]))
    done = 0
    while done < splits:
        target, target_red = -1, 0.0
        for node_id in pending:  # insertion order: earliest-created leaf wins ties
            _, found, reduction = pending[node_id]
            if found is not None and reduction > target_red:
                target, target_red = node_id, reduction
        if target < 0:
            break
        rows, found, _ = pending.pop(target)
        _, j, thr, left_mean, right_mean, _ = found
        go_left = X[rows, j] <= thr
        left_id, right_id = len(nodes), len(nodes) + 1
        nodes.append(TreeNode(value=left_mean))
        nodes.append(TreeNode(value=right_mean))
        nodes[target] = TreeNode(feature=j, threshold=thr, left=left_id, right=right_id)
        leaf_candidate(left_id, rows[go_left])
        leaf_candidate(right_id, rows[~go_left])
        done += 1

    return RegressionTree(nodes=tuple(nodes), splits=done)


def normalize_dictionary_outputs(gvals_stack) -> np.ndarray:
    """Scale candidate outputs so the per-sample sum of squares is 1.

    ``gvals_stack`` is (n_samples, n_candidates): row s holds every
    candidate's output at sample s. Realizes the unit-bound dictionary
    normalization used by the synthetic convergence experiment.
    """
    G = np.atleast_2d(np.asarray(gvals_stack, dtype=float))
    norms = np.sqrt(np.sum(G * G, axis=1))
    if np.any(norms == 0.0):
        raise InvalidInputError("a sample row has all-zero candidate outputs")
    return G / norms[:, None]
