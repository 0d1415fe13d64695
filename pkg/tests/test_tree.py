"""Survival-tree fitting, ordering, serialization and prediction."""

import numpy as np
import pytest

from cgesurv import (
    CopulaSpec,
    Dataset,
    SurvivalTree,
    TreeConfig,
    TreeConfigError,
    enumerate_splits,
    fit_tree,
)


def perfect_split_data():
    """One binary covariate separating early deaths from late deaths."""
    time = np.concatenate([np.arange(1.0, 11.0), np.arange(101.0, 111.0)])
    event = np.ones(20, dtype=bool)
    z = np.concatenate([np.zeros(10), np.ones(10)])
    return Dataset(time, event, z.reshape(-1, 1), ["marker"])


def random_dataset(rng, n=40, p=3):
    time = rng.exponential(1.0, size=n) + 0.01
    event = rng.random(n) < 0.7
    cov = np.round(rng.normal(size=(n, p)), 1)
    return Dataset(time, event, cov)


def default_config(**kw):
    base = dict(
        copula=CopulaSpec.independence(), p_threshold=0.05, n_perm=199, seed=3
    )
    base.update(kw)
    return TreeConfig(**base)


class TestEnumerateSplits:
    def test_binary(self):
        assert np.array_equal(enumerate_splits([0.0, 1.0, 1.0, 0.0]), [0.0])

    def test_constant(self):
        assert enumerate_splits([1.1, 1.1, 1.1]).size == 0

    def test_unique_sorted_minus_max(self):
        assert np.array_equal(enumerate_splits([3.0, 1.0, 2.0]), [1.0, 2.0])


class TestTreeConfig:
    def test_threshold_bounds(self):
        with pytest.raises(TreeConfigError):
            default_config(p_threshold=0.0)
        with pytest.raises(TreeConfigError):
            default_config(p_threshold=1.0)

    def test_min_node_size_floor(self):
        with pytest.raises(TreeConfigError):
            default_config(min_node_size=2)

    def test_granularity_guard(self):
        # 1/(n_perm+1) must be strictly below the threshold
        with pytest.raises(TreeConfigError):
            default_config(p_threshold=0.01, n_perm=99)
        default_config(p_threshold=0.01, n_perm=100)  # boundary passes: 1/101 < 0.01

    def test_logrank_method_skips_perm_guard(self):
        cfg = default_config(p_threshold=0.01, n_perm=1, method="logrank")
        assert cfg.method == "logrank"

    def test_unknown_method(self):
        with pytest.raises(TreeConfigError):
            default_config(method="wilcoxon")


class TestFitPerfectSplit:
    def test_root_splits_with_long_survivors_left(self):
        tree = fit_tree(perfect_split_data(), default_config())
        root = tree.nodes[tree.root_id]
        assert root.split is not None
        assert root.split.covariate_index == 0
        assert root.split.p_value < 0.05
        # z=1 subjects live past 100, so they form the left child
        assert tree.predict_node([1.0]) == 1
        assert tree.predict_node([0.0]) == 2

    def test_terminal_numbers_rank_survival(self):
        tree = fit_tree(perfect_split_data(), default_config())
        leaves = tree.terminal_nodes()
        assert [n.terminal_number for n in leaves] == [1, 2]
        # node 1 must be the longer-surviving one
        assert leaves[0].curve(50.0) > leaves[1].curve(50.0)

    def test_predict_survival_starts_at_one(self):
        tree = fit_tree(perfect_split_data(), default_config())
        assert tree.predict_survival([1.0], 0.0) == 1.0
        assert abs(tree.predict_survival([1.0], 105.0) - 0.5) < 1e-12

    def test_appendix_leaf_curve(self):
        # a pure node reproduces the module-level CGE on its members
        time = np.arange(1.0, 11.0)
        event = np.array([1, 0, 0, 1, 0, 1, 1, 0, 1, 1], dtype=bool)
        data = Dataset(time, event, np.zeros((10, 1)))
        tree = fit_tree(data, default_config())
        assert tree.n_terminal == 1
        assert abs(tree.predict_survival([0.0], 5.0) - 0.7714) < 5e-5


class TestFitGeneral:
    def test_no_split_when_nothing_significant(self, rng):
        data = random_dataset(rng, n=12)
        tree = fit_tree(data, default_config(p_threshold=0.001, n_perm=1999))
        # pure-noise covariates rarely reach p < 0.001; tree stays tiny
        assert tree.n_terminal <= 2

    def test_single_node_prediction(self):
        data = Dataset([1.0, 2.0], [True, True], [[0.0], [1.0]])
        tree = fit_tree(data, default_config())
        assert tree.n_terminal == 1
        assert tree.predict_node([5.0]) == 1

    def test_partition_property(self, rng):
        data = random_dataset(rng)
        tree = fit_tree(data, default_config(p_threshold=0.3))
        members = np.concatenate([n.member_indices for n in tree.terminal_nodes()])
        assert sorted(members) == list(range(len(data)))
        for node in tree.internal_nodes():
            left, right = node.children
            got = np.concatenate(
                [tree.nodes[left].member_indices, tree.nodes[right].member_indices]
            )
            assert sorted(got) == sorted(node.member_indices)

    def test_internal_p_below_threshold(self, rng):
        data = random_dataset(rng)
        tree = fit_tree(data, default_config(p_threshold=0.3))
        for node in tree.internal_nodes():
            assert node.split.p_value < 0.3

    def test_left_child_survives_longer(self, rng):
        from cgesurv.twosample import l1_statistic

        data = random_dataset(rng, n=50)
        tree = fit_tree(data, default_config(p_threshold=0.5))
        for node in tree.internal_nodes():
            li = tree.nodes[node.children[0]].member_indices
            ri = tree.nodes[node.children[1]].member_indices
            _, signed = l1_statistic(
                data.time[li], data.event[li], data.time[ri], data.event[ri],
                tree.config.copula,
            )
            assert signed >= 0.0

    def test_terminal_numbering_depth_first(self, rng):
        data = random_dataset(rng, n=60)
        tree = fit_tree(data, default_config(p_threshold=0.5))
        numbers = [n.terminal_number for n in tree.terminal_nodes()]
        assert numbers == list(range(1, tree.n_terminal + 1))

    def test_refit_determinism(self, rng):
        data = random_dataset(rng)
        a = fit_tree(data, default_config(p_threshold=0.2))
        b = fit_tree(data, default_config(p_threshold=0.2))
        assert a.to_json() == b.to_json()

    def test_monotone_in_threshold(self, rng):
        data = random_dataset(rng, n=50)
        small = fit_tree(data, default_config(p_threshold=0.01, n_perm=999))
        large = fit_tree(data, default_config(p_threshold=0.1, n_perm=999))
        assert small.n_terminal <= large.n_terminal

    def test_min_node_size_respected(self, rng):
        data = random_dataset(rng, n=50)
        tree = fit_tree(data, default_config(p_threshold=0.5, min_node_size=10))
        for node in tree.internal_nodes():
            assert node.member_indices.size >= 10

    def test_logrank_method_fits(self, rng):
        data = random_dataset(rng, n=40)
        tree = fit_tree(data, default_config(method="logrank", p_threshold=0.2))
        assert tree.config.method == "logrank"
        assert tree.n_terminal >= 1

    def test_empty_dataset_rejected(self):
        data = Dataset([1.0], [True], [[0.0]])
        with pytest.raises(ValueError):
            fit_tree(data.subset(np.array([], dtype=int)), default_config())


class TestSerialization:
    def test_json_round_trip(self, rng):
        data = random_dataset(rng)
        tree = fit_tree(data, default_config(p_threshold=0.3))
        back = SurvivalTree.from_json(tree.to_json())
        assert back.to_json() == tree.to_json()
        assert np.array_equal(back.predict_nodes(data.covariates), tree.predict_nodes(data.covariates))

    def test_text_export_mentions_split(self):
        tree = fit_tree(perfect_split_data(), default_config())
        text = tree.to_text()
        assert "marker" in text
        assert "leaf #1" in text and "leaf #2" in text

    def test_dot_export_well_formed(self):
        tree = fit_tree(perfect_split_data(), default_config())
        dot = tree.to_dot()
        assert dot.startswith("digraph")
        assert dot.count("->") == 2
        assert "median" in dot

    def test_missing_covariate_routing_rejected(self):
        tree = fit_tree(perfect_split_data(), default_config())
        with pytest.raises(ValueError):
            tree.predict_node([float("nan")])

    def test_wrong_row_length_rejected(self):
        tree = fit_tree(perfect_split_data(), default_config())
        with pytest.raises(ValueError):
            tree.predict_node([1.0, 2.0])
