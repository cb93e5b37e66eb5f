# tests/test_metrics.py

import json

import numpy as np
import pytest
from hypothesis import given, settings as hsettings
import hypothesis.strategies as st

from src.core.exceptions import CapabilityError, ConfigurationError, DimensionError
from src.core.types import CostCounters
from src.metrics.cost_report import COLUMNS, cost_report, merge_stage_counters
from src.metrics.hypervolume import (
    EXACT2D, EXACT3D, MONTE_CARLO, HvConfig, default_reference, hv_monte_carlo, hypervolume,
)

UNIT_2D = HvConfig(reference=(1.0, 1.0))


# ============================================
# HYPERVOLUME EXACT
# ============================================

def test_hypervolume_examples():
    assert hypervolume([(0.0, 0.0)], UNIT_2D) == pytest.approx(1.0)
    assert hypervolume([(0.2, 0.8), (0.8, 0.2)], UNIT_2D) == pytest.approx(0.28)
    assert hypervolume([(0.0, 0.0, 0.0)], HvConfig(reference=(1.0, 1.0, 1.0))) == pytest.approx(1.0)


def test_mode_defaults_to_dimension():
    assert UNIT_2D.mode == EXACT2D
    assert HvConfig(reference=(1.0, 1.0, 1.0)).mode == EXACT3D
    assert HvConfig(reference=(1.0,) * 4).mode == MONTE_CARLO


def test_empty_and_clipped_points_have_zero_volume():
    assert hypervolume([], UNIT_2D) == 0.0
    assert hypervolume([(1.0, 1.0)], UNIT_2D) == 0.0
    assert hypervolume([(0.5, 1.2)], UNIT_2D) == 0.0
    assert hv_monte_carlo([(1.0, 0.0)], (1.0, 1.0)).value == 0.0


def test_three_dimensional_staircase():
    points = [(0.0, 0.5, 0.5), (0.5, 0.0, 0.5), (0.5, 0.5, 0.0)]
    # trois boîtes 1×0.5×0.5 autour du cube central 0.5³
    expected = 3 * 0.25 - 3 * 0.125 + 0.125
    assert hypervolume(points, HvConfig(reference=(1.0, 1.0, 1.0))) == pytest.approx(expected)


def test_exact_modes_match_monte_carlo():
    rng = np.random.default_rng(7)
    z_scores = []
    for _ in range(10):
        for m, mode in ((2, EXACT2D), (3, EXACT3D)):
            points = rng.uniform(0.0, 1.0, size=(8, m))
            reference = (1.0,) * m
            exact = hypervolume(points, HvConfig(reference=reference, mode=mode))
            estimate = hv_monte_carlo(points, reference, samples=1_000_000, seed=int(rng.integers(1 << 31)))
            if estimate.std_error == 0.0:
                # boîte entièrement couverte ou vide : l'estimation est exacte
                assert estimate.value == pytest.approx(exact)
                continue
            z_scores.append(abs(estimate.value - exact) / estimate.std_error)
    z_scores = np.array(z_scores)
    assert z_scores.size > 0
    assert np.all(z_scores <= 4.0)
    assert np.sum(z_scores <= 3.0) >= 0.9 * z_scores.size


def test_exact_2d_matches_exact_3d_with_padded_axis(rng):
    for _ in range(10):
        points = rng.uniform(0.0, 1.0, size=(12, 2))
        padded = np.column_stack([points, np.zeros(len(points))])
        area = hypervolume(points, HvConfig(reference=(1.0, 1.0), mode=EXACT2D))
        volume = hypervolume(padded, HvConfig(reference=(1.0, 1.0, 1.0), mode=EXACT3D))
        assert volume == pytest.approx(area, abs=1e-12)


def test_exact_volume_is_permutation_invariant(rng):
    for m, reference in ((2, (1.0, 1.2)), (3, (1.0, 1.2, 1.4))):
        points = rng.uniform(0.0, 1.0, size=(10, m))
        expected = hypervolume(points, HvConfig(reference=reference))
        shuffled = points[rng.permutation(len(points))]
        assert hypervolume(shuffled, HvConfig(reference=reference)) == pytest.approx(expected, abs=1e-12)
        axes = rng.permutation(m)
        swapped = hypervolume(points[:, axes], HvConfig(reference=tuple(np.asarray(reference)[axes])))
        assert swapped == pytest.approx(expected, abs=1e-12)


def test_monte_carlo_is_reproducible():
    points = [(0.2, 0.8), (0.8, 0.2)]
    first = hv_monte_carlo(points, (1.0, 1.0), samples=50_000, seed=3)
    second = hv_monte_carlo(points, (1.0, 1.0), samples=50_000, seed=3)
    assert first == second
    assert first.samples == 50_000
    cfg = HvConfig(reference=(1.0, 1.0), mode=MONTE_CARLO, samples=50_000, seed=3)
    assert hypervolume(points, cfg) == first.value


@given(st.lists(st.tuples(st.floats(0.0, 1.5), st.floats(0.0, 1.5)), max_size=15),
       st.tuples(st.floats(0.0, 1.5), st.floats(0.0, 1.5)))
@hsettings(max_examples=100, deadline=None)
def test_adding_a_point_never_decreases_volume(points, extra):
    before = hypervolume(points, UNIT_2D)
    assert hypervolume(points + [extra], UNIT_2D) >= before - 1e-12


@given(st.lists(st.tuples(st.floats(0.0, 1.0), st.floats(0.0, 1.0)), min_size=1, max_size=15),
       st.tuples(st.floats(0.0, 0.5), st.floats(0.0, 0.5)))
@hsettings(max_examples=100, deadline=None)
def test_dominated_points_do_not_change_volume(points, offset):
    dominated = (points[0][0] + offset[0], points[0][1] + offset[1])
    assert hypervolume(points + [dominated], UNIT_2D) == pytest.approx(hypervolume(points, UNIT_2D), abs=1e-12)


def test_hypervolume_errors():
    with pytest.raises(CapabilityError):
        hypervolume([(0.0, 0.0)], HvConfig(reference=(1.0, 1.0), mode=EXACT3D))
    with pytest.raises(DimensionError):
        hypervolume([(0.0, 0.0, 0.0)], UNIT_2D)
    with pytest.raises(ConfigurationError):
        HvConfig(reference=(1.0,))
    with pytest.raises(ConfigurationError):
        HvConfig(reference=(1.0, float('inf')))
    with pytest.raises(ConfigurationError):
        HvConfig(reference=(1.0, 1.0), mode='wfg')


def test_default_references():
    assert default_reference('zdt2') == (1.1, 11.0)
    assert default_reference('toy-mlp')[0] == pytest.approx(1.1 * np.log(2.0))
    with pytest.raises(ConfigurationError):
        default_reference('dtlz7')


# ============================================
# TABLEAU DES COÛTS
# ============================================

def test_cost_report_rows():
    counters = merge_stage_counters({'expand': CostCounters(0, 50, 300)}, {'optimize': CostCounters(100, 100, 0)})
    report = cost_report(counters)
    assert list(report.table.columns) == COLUMNS
    assert report.table.index.name == 'stage'
    assert report.table.loc['expand'].tolist() == [0, 50, 300]
    assert report.table.loc['optimize'].tolist() == [100, 100, 0]
    assert report.total().as_dict() == {'n_f': 100, 'n_grad': 150, 'n_hvp': 300}


def test_merge_sums_componentwise():
    first = {'optimize': CostCounters(1, 2, 3)}
    second = {'optimize': CostCounters(10, 20, 30), 'expand': CostCounters(0, 1, 4)}
    merged = merge_stage_counters(first, second)
    assert merged['optimize'].as_dict() == {'n_f': 11, 'n_grad': 22, 'n_hvp': 33}
    assert merged['expand'].as_dict() == {'n_f': 0, 'n_grad': 1, 'n_hvp': 4}
    # les entrées ne sont pas modifiées
    assert first['optimize'].as_dict() == {'n_f': 1, 'n_grad': 2, 'n_hvp': 3}


def test_empty_cost_report():
    report = cost_report({})
    assert report.empty
    assert report.to_text() == '(aucune étape)'
    assert report.total().as_dict() == {'n_f': 0, 'n_grad': 0, 'n_hvp': 0}


def test_cost_report_serializes():
    report = cost_report({'optimize': CostCounters(4, 3, 0)})
    assert json.loads(report.to_json()) == {'optimize': {'n_f': 4, 'n_grad': 3, 'n_hvp': 0}}
    assert '#∇f' in report.to_text()
