import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from splitplan.errors import ValidationError
from splitplan.nsga2 import (
    GaConfig,
    Individual,
    crowding_distance,
    crowding_distances,
    dominates,
    evolve,
    fast_non_dominated_sort,
    non_dominated_sort,
)
from splitplan.oracle import brute_force_fronts, true_pareto_set
from splitplan.problem import ObjectiveVector, SplitCandidate
from splitplan.profile import LayerSpec, ModelProfile, TensorShape

from conftest import make_instance


def as_sets(fronts):
    return [sorted(int(i) for i in f) for f in fronts]


def test_dominates():
    assert dominates((1, 1), (1, 2))
    assert not dominates((1, 2), (1, 2))
    assert not dominates((1, 2), (2, 1))


def test_sort_hand_example():
    objs = np.array([(1, 1), (1, 2), (2, 1), (2, 2)], dtype=float)
    assert as_sets(fast_non_dominated_sort(objs)) == [[0], [1, 2], [3]]


def test_identical_vectors_share_front():
    assert as_sets(fast_non_dominated_sort(np.ones((6, 3)))) == [[0, 1, 2, 3, 4, 5]]


def test_matches_brute_force_random():
    rng = np.random.default_rng(7)
    objs = rng.random((200, 3))
    assert as_sets(fast_non_dominated_sort(objs)) == as_sets(brute_force_fronts(objs.tolist()))


@settings(max_examples=80, deadline=None)
@given(arrays(float, st.tuples(st.integers(1, 40), st.integers(1, 4)), elements=st.integers(0, 4).map(float)))
def test_fronts_are_a_layered_partition(objs):
    fronts = fast_non_dominated_sort(objs)
    seen = np.concatenate(fronts)
    assert sorted(seen.tolist()) == list(range(len(objs)))
    for k, front in enumerate(fronts):
        for i in front:
            assert not any(dominates(objs[j], objs[i]) for j in front)
            if k:
                assert any(dominates(objs[j], objs[i]) for j in fronts[k - 1])


class TestCrowding:
    def test_pair_is_boundary(self):
        assert np.all(np.isinf(crowding_distances(np.array([[0.0, 1.0], [1.0, 0.0]]))))

    def test_three_point_front(self):
        d = crowding_distances(np.array([[0, 2], [1, 1], [2, 0]], dtype=float))
        assert math.isinf(d[0]) and math.isinf(d[2])
        assert d[1] == pytest.approx(2.0)

    def test_constant_column_contributes_nothing(self):
        with_const = crowding_distances(np.array([[0, 2, 5], [1, 1, 5], [2, 0, 5]], dtype=float))
        without = crowding_distances(np.array([[0, 2], [1, 1], [2, 0]], dtype=float))
        assert with_const[1] == without[1]

    def test_individual_wrappers(self):
        pop = [
            Individual(SplitCandidate(i + 1, 9 - i), ObjectiveVector(float(a), float(b), 0))
            for i, (a, b) in enumerate([(0, 2), (1, 1), (2, 0), (2, 2)])
        ]
        fronts = non_dominated_sort(pop)
        assert [[ind.l1 for ind in f] for f in fronts] == [[1, 2, 3], [4]]
        assert [ind.rank for ind in pop] == [0, 0, 0, 1]
        crowding_distance(fronts[0])
        assert [ind.crowding for ind in fronts[0]] == [math.inf, 2.0, math.inf]


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"population_size": 3},
            {"population_size": 7},
            {"generations": 0},
            {"mutation_rate": 1.5},
            {"crossover_rate": -0.1},
            {"seed": -1},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValidationError):
            GaConfig(**kwargs)

    def test_defaults(self):
        assert GaConfig() == GaConfig(40, 50, 0.3, 0.9, 42)


class TestEvolve:
    def test_single_point_space(self):
        model = ModelProfile(
            "toy",
            TensorShape((8,)),
            (LayerSpec("linear", in_features=8, out_features=4), LayerSpec("linear", in_features=4, out_features=2)),
        )
        pareto = evolve(make_instance(model), GaConfig(population_size=4, generations=3))
        assert pareto.l1s == [1]

    def test_alexnet_seed_42_recovers_oracle(self, instances):
        instance = instances["alexnet"]
        assert evolve(instance, GaConfig(seed=42)).l1s == true_pareto_set(instance).l1s

    def test_deterministic(self, instances):
        instance = instances["vgg16"]
        a = evolve(instance, GaConfig(seed=123))
        b = evolve(instance, GaConfig(seed=123))
        assert a == b

    def test_seed_changes_search_path(self, instances):
        instance = instances["vgg16"]
        paths = []
        for seed in (1, 2):
            history = []
            evolve(instance, GaConfig(seed=seed, generations=2), lambda g, l1s, objs: history.append(l1s))
            paths.append(history[0].tolist())
        assert paths[0] != paths[1]

    def test_output_sound(self, bundled_name, instances):
        instance = instances[bundled_name]
        pareto = evolve(instance, GaConfig(seed=5, generations=10))
        l1s = pareto.l1s
        assert l1s == sorted(set(l1s))
        assert all(1 <= l1 < instance.total_layers for l1 in l1s)
        objs = pareto.objective_matrix()
        for i in range(len(objs)):
            for j in range(len(objs)):
                assert not dominates(objs[i], objs[j])
        for m in pareto:
            assert m.rank == 0 and m.candidate.l1 + m.candidate.l2 == instance.total_layers

    @pytest.mark.parametrize("seed", range(5))
    def test_elitism(self, instances, seed):
        best = []
        evolve(
            instances["vgg13"],
            GaConfig(seed=seed, population_size=8, generations=30),
            lambda g, l1s, objs: best.append(objs.min(axis=0)),
        )
        best = np.array(best)
        assert np.all(np.diff(best, axis=0) <= 0)

    def test_infeasible_members_tagged(self, instances):
        model = instances["vgg11"].model
        instance = make_instance(model, memory_cap=model.client_memory(10))
        pareto = evolve(instance, GaConfig(seed=3))
        assert any(not m.feasible for m in pareto)
        assert all(m.feasible == (m.l1 <= 10) for m in pareto)
