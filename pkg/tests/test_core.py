# tests/test_core.py

import numpy as np
import pytest
from hypothesis import given, settings as hsettings
import hypothesis.strategies as st

from src.config import settings
from src.core.dominance import compare_fronts, dominates, nondominated_filter
from src.core.exceptions import DimensionError, NumericOverflowError, ValidationError
from src.core.problem import ProblemHandle, alpha_weights
from src.core.types import CostCounters, ParetoRecord, Stage, as_objective_values, as_param_vector
from src.solvers.simplex import min_norm_alpha


# ============================================
# TYPES
# ============================================

def test_param_vector_checks_length_and_finiteness():
    assert as_param_vector([1, 2, 3], 3).dtype == np.float64
    with pytest.raises(DimensionError):
        as_param_vector([1, 2], 3)
    with pytest.raises(DimensionError):
        as_param_vector([1.0, np.nan])


def test_objective_values_need_two_finite_entries():
    assert as_objective_values([0.5, 0.75]).shape == (2,)
    with pytest.raises(DimensionError):
        as_objective_values([1.0])
    with pytest.raises(DimensionError):
        as_objective_values([1.0, np.inf])
    with pytest.raises(DimensionError):
        as_objective_values([1.0, 2.0, 3.0], m=2)


def test_cost_counters_add_merge_absorb():
    a = CostCounters()
    a.add(n_f=2, n_grad=1)
    a.add(n_hvp=6)
    b = CostCounters(1, 1, 1)

    total = a + b
    assert total.as_dict() == {'n_f': 3, 'n_grad': 2, 'n_hvp': 7}
    # merge ne modifie pas les opérandes
    assert a.as_dict() == {'n_f': 2, 'n_grad': 1, 'n_hvp': 6}

    a.absorb(b)
    assert a.as_dict() == total.as_dict()
    assert CostCounters.from_dict(total.as_dict()) == total


_counters = st.builds(CostCounters, st.integers(0, 10**6), st.integers(0, 10**6), st.integers(0, 10**6))


@given(_counters, _counters, _counters)
@hsettings(max_examples=100, deadline=None)
def test_cost_counters_merge_is_commutative_and_associative(a, b, c):
    assert a.merge(b) == b.merge(a)
    assert (a + b) + c == a + (b + c)
    assert a + CostCounters() == a


def test_pareto_record_is_immutable():
    record = ParetoRecord(id=0, x=[1.0, 2.0], f=[0.5, 0.5])
    assert record.stage is Stage.OPTIMIZED
    assert np.isnan(record.residual)
    with pytest.raises(ValueError):
        record.x[0] = 3.0


def test_pareto_record_drops_large_gradients(monkeypatch):
    monkeypatch.setattr(settings, 'GRAD_STORAGE_CAP', 4)
    small = ParetoRecord(id=0, x=[0.0, 0.0], f=[1.0, 1.0], grads=np.ones((2, 2)))
    large = ParetoRecord(id=1, x=[0.0, 0.0, 0.0], f=[1.0, 1.0], grads=np.ones((2, 3)))
    assert small.grads is not None
    assert large.grads is None


def test_pareto_record_residual_from_alpha():
    alpha = min_norm_alpha(np.array([[1.0, 0.0], [0.0, 1.0]]))
    record = ParetoRecord(id=0, x=[0.0, 0.0], f=[1.0, 1.0], alpha=alpha, stage='seed')
    assert record.stage is Stage.SEED
    assert record.residual == pytest.approx(np.sqrt(2) / 2)


# ============================================
# PROBLEMHANDLE
# ============================================

class _Linear(ProblemHandle):
    name = 'linear'

    def __init__(self, bad=False):
        super().__init__(n=2, m=2)
        self.bad = bad

    def _evaluate(self, x):
        return np.array([x[0], np.inf if self.bad else x[1]])

    def _gradients(self, x):
        return np.eye(2)

    def _hvp(self, x, alpha, v):
        return np.zeros(2)


def test_problem_counts_every_call():
    problem = _Linear()
    problem.evaluate([1.0, 2.0])
    problem.gradients([1.0, 2.0])
    problem.hvp([1.0, 2.0], [0.5, 0.5], [1.0, 0.0])
    assert problem.counters.as_dict() == {'n_f': 1, 'n_grad': 1, 'n_hvp': 2}


def test_problem_metered_redirects_counts():
    problem = _Linear()
    stage = CostCounters()
    with problem.metered(stage):
        problem.evaluate([0.0, 0.0])
    problem.gradients([0.0, 0.0])
    assert stage.as_dict() == {'n_f': 1, 'n_grad': 0, 'n_hvp': 0}
    assert problem.counters.as_dict() == {'n_f': 0, 'n_grad': 1, 'n_hvp': 0}


def test_problem_spawn_has_fresh_counters():
    problem = _Linear()
    problem.evaluate([0.0, 0.0])
    clone = problem.spawn()
    assert clone is not problem
    assert clone.counters.n_f == 0
    assert problem.counters.n_f == 1


def test_problem_validates_inputs():
    problem = _Linear()
    with pytest.raises(DimensionError):
        problem.evaluate([1.0, 2.0, 3.0])
    with pytest.raises(ValidationError):
        problem.hvp([0.0, 0.0], [0.7, 0.7], [1.0, 0.0])
    with pytest.raises(NumericOverflowError):
        _Linear(bad=True).evaluate([0.0, 0.0])


def test_alpha_weights_accepts_alpha_result():
    result = min_norm_alpha(np.array([[1.0, 0.0], [-1.0, 0.0]]))
    assert np.allclose(alpha_weights(result, 2), [0.5, 0.5])


# ============================================
# DOMINANCE
# ============================================

def test_dominates_examples():
    assert dominates([1, 1], [1, 2])
    assert not dominates([1, 2], [2, 1])
    assert not dominates([1, 2], [1, 2])
    with pytest.raises(DimensionError):
        dominates([1, 2], [1, 2, 3])


_objectives = st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4))


@given(_objectives, _objectives, _objectives)
@hsettings(max_examples=100, deadline=None)
def test_dominance_is_irreflexive_and_transitive(a, b, c):
    assert not dominates(a, a)
    assert not (dominates(a, b) and dominates(b, a))
    if dominates(a, b) and dominates(b, c):
        assert dominates(a, c)


def test_nondominated_filter_examples():
    assert nondominated_filter([(1, 2), (2, 1), (2, 2)]) == [0, 1]
    assert nondominated_filter([(0, 0)]) == [0]
    assert nondominated_filter([]) == []


def test_nondominated_filter_matches_brute_force(rng):
    points = rng.uniform(size=(100, 2))
    expected = [i for i in range(100)
                if not any(dominates(points[j], points[i]) for j in range(100) if j != i)]
    assert nondominated_filter(points) == expected


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5)), min_size=1, max_size=30))
@hsettings(max_examples=50, deadline=None)
def test_nondominated_filter_output_is_mutually_nondominated(points):
    kept = [points[i] for i in nondominated_filter(points)]
    assert kept
    for a in kept:
        assert not any(dominates(b, a) for b in kept)
    # tout point retiré est dominé par un point conservé
    for i, p in enumerate(points):
        if p not in kept:
            assert any(dominates(q, p) for q in kept)


def test_compare_fronts_counts():
    baseline = [(1.0, 1.0), (3.0, 3.0)]
    candidate = [(2.0, 2.0), (0.5, 4.0)]
    assert compare_fronts(candidate, baseline) == {'candidate_dominated': 1, 'baseline_dominated': 1}
    assert compare_fronts([], baseline) == {'candidate_dominated': 0, 'baseline_dominated': 0}
