import numpy as np
import pytest

from reboost.core import InvalidInputError
from reboost.learners import (
    DecisionStump,
    IntervalAtom,
    RegressionTree,
    StumpFitter,
    fit_stump,
    fit_tree,
    normalize_dictionary_outputs,
)


def brute_force_stump(X, r):
    """Independent oracle: try every (feature, midpoint), compute the SSE
    directly from leaf means, return the winning stump and its SSE."""
    m, d = X.shape
    best = None
    for j in range(d):
        vals = np.unique(X[:, j])
        for a, b in zip(vals[:-1], vals[1:]):
            thr = 0.5 * (a + b)
            if not (a <= thr < b):
                thr = a
            left = X[:, j] <= thr
            lm, rm = r[left].mean(), r[~left].mean()
            pred = np.where(left, lm, rm)
            sse = float(np.sum((r - pred) ** 2))
            if best is None or sse < best[0]:
                best = (sse, j, thr, lm, rm)
    return best


def stump_sse(stump, X, r):
    return float(np.sum((r - stump.evaluate(X)) ** 2))


def tree_sse(tree, X, r):
    return float(np.sum((r - tree.evaluate(X)) ** 2))


class TestEvaluate:
    def test_tie_goes_left(self):
        s = DecisionStump(0, 1.5, -1.0, 1.0)
        assert s.evaluate_row([1.5]) == -1.0
        assert s.evaluate_row([2.0]) == 1.0

    def test_feature_out_of_range(self):
        s = DecisionStump(3, 0.0, -1.0, 1.0)
        with pytest.raises(InvalidInputError):
            s.evaluate(np.ones((2, 2)))

    def test_deterministic(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(50, 2))
        t = fit_tree(X, rng.normal(size=50), 3)
        a, b = t.evaluate(X), t.evaluate(X)
        assert np.array_equal(a, b)

    def test_tree_matches_manual_path_trace(self):
        # depth-2 tree: root on feature 0, children on feature 1
        nodes = (
            dict(feature=0, threshold=0.0, left=1, right=2),
            dict(feature=1, threshold=-0.5, left=3, right=4),
            dict(feature=1, threshold=0.5, left=5, right=6),
            dict(value=1.0), dict(value=2.0), dict(value=3.0), dict(value=4.0),
        )
        from reboost.learners import TreeNode
        tree = RegressionTree(nodes=tuple(TreeNode(**n) for n in nodes), splits=3)

        def manual(x):
            if x[0] <= 0.0:
                return 1.0 if x[1] <= -0.5 else 2.0
            return 3.0 if x[1] <= 0.5 else 4.0

        rng = np.random.default_rng(1)
        X = rng.uniform(-1.0, 1.0, size=(10, 2))
        assert np.array_equal(tree.evaluate(X), [manual(x) for x in X])

    def test_scale_multiplies_output(self):
        s = DecisionStump(0, 0.0, -2.0, 2.0, scale=0.5)
        assert s.evaluate_row([1.0]) == 1.0

    def test_interval_atom(self):
        a = IntervalAtom(0.25, 0.5, 2.0)
        X = np.array([[0.2], [0.25], [0.49], [0.5]])
        assert np.array_equal(a.evaluate(X), [0.0, 2.0, 2.0, 0.0])


class TestFitStump:
    def test_clean_separation(self):
        X = np.array([[0.0], [1.0], [2.0], [3.0]])
        r = np.array([1.0, 1.0, -1.0, -1.0])
        s = fit_stump(X, r)
        assert 1.0 < s.threshold < 2.0
        assert s.left_value == pytest.approx(1.0)
        assert s.right_value == pytest.approx(-1.0)

    def test_constant_residuals(self):
        X = np.arange(6.0).reshape(-1, 1)
        s = fit_stump(X, np.full(6, 3.2))
        assert s.left_value == pytest.approx(3.2)
        assert s.right_value == pytest.approx(3.2)
        assert stump_sse(s, X, np.full(6, 3.2)) == pytest.approx(0.0, abs=1e-20)

    def test_degenerate_rows(self):
        X = np.ones((5, 2))
        r = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
        s = fit_stump(X, r)
        assert s.degenerate
        assert s.left_value == s.right_value == pytest.approx(3.0)

    def test_matches_exhaustive_scan(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            m = int(rng.integers(5, 50))
            d = int(rng.integers(1, 5))
            X = rng.normal(size=(m, d))
            r = rng.normal(size=m)
            fitted = fit_stump(X, r)
            oracle_sse = brute_force_stump(X, r)[0]
            assert stump_sse(fitted, X, r) == oracle_sse

    def test_leaf_values_within_residual_range(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(30, 3))
        r = rng.normal(size=30)
        s = fit_stump(X, r)
        assert r.min() <= s.left_value <= r.max()
        assert r.min() <= s.right_value <= r.max()

    def test_selected_split_maximizes_normalized_inner_product(self):
        # the least-squares split also wins the projection-of-gradient
        # criterion <u, g>/|g| over all two-leaf partitions
        rng = np.random.default_rng(4)
        for _ in range(20):
            X = rng.normal(size=(12, 2))
            u = rng.normal(size=12)
            fitted = fit_stump(X, u)
            g = fitted.evaluate(X)
            best_ip = np.dot(u, g) / np.linalg.norm(g)
            for j in range(2):
                for thr in np.unique(X[:, j])[:-1]:
                    left = X[:, j] <= thr
                    cand = np.where(left, u[left].mean(), u[~left].mean())
                    ip = np.dot(u, cand) / np.linalg.norm(cand)
                    assert ip <= best_ip + 1e-9


class TestStumpFitter:
    def test_agrees_with_fit_stump(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            X = rng.normal(size=(25, 3))
            fitter = StumpFitter(X)
            for _ in range(3):
                r = rng.normal(size=25)
                assert fitter.fit(r) == fit_stump(X, r)

    def test_handles_duplicate_feature_values(self):
        rng = np.random.default_rng(6)
        X = rng.integers(0, 3, size=(40, 2)).astype(float)
        r = rng.normal(size=40)
        assert StumpFitter(X).fit(r) == fit_stump(X, r)


class TestFitTree:
    def test_j1_equals_stump(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(30, 3))
        r = rng.normal(size=30)
        tree = fit_tree(X, r, 1)
        stump = fit_stump(X, r)
        root = tree.nodes[0]
        assert (root.feature, root.threshold) == (stump.feature, stump.threshold)
        assert np.allclose(tree.evaluate(X), stump.evaluate(X))

    def test_constant_residuals_single_leaf(self):
        X = np.arange(10.0).reshape(-1, 1)
        r = np.full(10, 1.5)
        tree = fit_tree(X, r, 4)
        assert tree.splits == 0
        assert tree_sse(tree, X, r) == pytest.approx(0.0, abs=1e-20)

    def test_invalid_splits(self):
        with pytest.raises(InvalidInputError):
            fit_tree(np.ones((5, 1)), np.ones(5), 0)

    def test_structure_counts(self):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(64, 2))
        r = rng.normal(size=64)
        tree = fit_tree(X, r, 4)
        internal = [n for n in tree.nodes if not n.is_leaf]
        leaves = [n for n in tree.nodes if n.is_leaf]
        assert len(internal) == 4 and len(leaves) == 5

    def test_checkerboard_beats_stump(self):
        rng = np.random.default_rng(9)
        grid = np.array([(i, j) for i in range(8) for j in range(8)], dtype=float)
        r = ((grid[:, 0] // 4 + grid[:, 1] // 4) % 2 * 2.0 - 1.0)
        tree = fit_tree(grid, r, 4)
        stump = fit_stump(grid, r)
        assert tree_sse(tree, grid, r) <= stump_sse(stump, grid, r)

    def test_sse_nonincreasing_in_splits(self):
        rng = np.random.default_rng(10)
        X = rng.normal(size=(60, 3))
        r = rng.normal(size=60)
        sses = [tree_sse(fit_tree(X, r, j), X, r) for j in range(1, 8)]
        assert all(a >= b - 1e-12 for a, b in zip(sses[:-1], sses[1:]))

    def test_leaf_values_within_residual_range(self):
        rng = np.random.default_rng(11)
        X = rng.normal(size=(40, 2))
        r = rng.normal(size=40)
        tree = fit_tree(X, r, 4)
        for n in tree.nodes:
            if n.is_leaf:
                assert r.min() - 1e-12 <= n.value <= r.max() + 1e-12


class TestNormalizeDictionaryOutputs:
    def test_two_equal_candidates(self):
        out = normalize_dictionary_outputs([[1.0, 1.0]])
        assert out[0] == pytest.approx([1.0 / np.sqrt(2.0)] * 2)

    def test_single_candidate_sign(self):
        assert normalize_dictionary_outputs([[-3.0]])[0, 0] == pytest.approx(-1.0)

    def test_row_sums_of_squares_are_one(self):
        rng = np.random.default_rng(12)
        G = rng.normal(size=(50, 4))
        out = normalize_dictionary_outputs(G)
        assert np.allclose(np.sum(out * out, axis=1), 1.0, atol=1e-12)

    def test_all_zero_row_rejected(self):
        with pytest.raises(InvalidInputError):
            normalize_dictionary_outputs([[1.0, 2.0], [0.0, 0.0]])
