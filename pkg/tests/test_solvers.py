# tests/test_solvers.py

import itertools

import numpy as np
import pytest
from hypothesis import given, settings as hsettings
import hypothesis.strategies as st
from hypothesis.extra.numpy import arrays

from src.core.exceptions import BreakdownError, ContractError, DimensionError, ValidationError
from src.solvers.minres import minres
from src.solvers.simplex import (
    corrected_alpha, min_norm_alpha, project_simplex, stationarity_residual,
)


def _qp_oracle(grads):
    """Point de norme minimale par énumération des supports (KKT sur chaque face)"""
    gram = grads @ grads.T
    m = grads.shape[0]
    best_value, best_alpha = np.inf, None
    for size in range(1, m + 1):
        for support in itertools.combinations(range(m), size):
            idx = list(support)
            kkt = np.zeros((size + 1, size + 1))
            kkt[:size, :size] = 2.0 * gram[np.ix_(idx, idx)]
            kkt[:size, size] = 1.0
            kkt[size, :size] = 1.0
            rhs = np.zeros(size + 1)
            rhs[size] = 1.0
            solution = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:size]
            if np.any(solution < -1e-12):
                continue
            alpha = np.zeros(m)
            alpha[idx] = np.clip(solution, 0.0, None)
            alpha /= alpha.sum()
            value = alpha @ gram @ alpha
            if value < best_value:
                best_value, best_alpha = value, alpha
    return best_alpha @ grads


# ============================================
# SIMPLEXE
# ============================================

def test_min_norm_opposite_gradients():
    result = min_norm_alpha(np.array([[1.0, 0.0], [-1.0, 0.0]]))
    assert np.allclose(result.alpha, [0.5, 0.5])
    assert result.min_norm_value == pytest.approx(0.0, abs=1e-15)


def test_min_norm_orthogonal_gradients_vs_grid():
    grads = np.array([[1.0, 0.0], [0.0, 1.0]])
    result = min_norm_alpha(grads)
    grid = np.linspace(0.0, 1.0, 1_000_001)
    brute = np.min(np.hypot(grid, 1.0 - grid))
    assert np.allclose(result.alpha, [0.5, 0.5])
    assert result.min_norm_value == pytest.approx(brute, abs=1e-10)
    assert result.min_norm_value == pytest.approx(np.sqrt(2) / 2)


def test_min_norm_identical_gradients_uses_uniform_weights():
    result = min_norm_alpha(np.array([[3.0, 4.0], [3.0, 4.0]]))
    assert np.allclose(result.alpha, [0.5, 0.5])
    assert result.min_norm_value == pytest.approx(5.0)


def test_stationarity_residual_examples():
    assert stationarity_residual(np.array([[1.0, 0.0], [-1.0, 0.0]])) == pytest.approx(0.0, abs=1e-15)
    # direction dominée : toute la masse sur g1
    assert stationarity_residual(np.array([[1.0, 0.0], [2.0, 0.0]])) == pytest.approx(1.0)
    assert stationarity_residual(np.eye(2)) == pytest.approx(np.sqrt(2) / 2)


def test_corrected_alpha_examples():
    assert np.allclose(corrected_alpha(np.eye(2)).c, [0.5, 0.5])
    assert np.allclose(corrected_alpha(np.array([[2.0, -1.0], [-2.0, 1.0]])).c, 0.0)


def test_min_norm_rejects_bad_shapes():
    with pytest.raises(DimensionError):
        min_norm_alpha(np.array([[1.0, 2.0]]))
    with pytest.raises(DimensionError):
        min_norm_alpha(np.array([[1.0, np.nan], [0.0, 1.0]]))


def test_correction_matches_qp_oracle():
    """100 matrices aléatoires : c = ∇fᵀα et accord avec l'oracle QP"""
    rng = np.random.default_rng(2024)
    for trial in range(100):
        m = 2 + trial % 2
        n = 5 if trial % 4 < 2 else 50
        grads = rng.standard_normal((m, n))
        correction = corrected_alpha(grads)
        result = min_norm_alpha(grads)
        assert np.max(np.abs(correction.c - result.alpha @ grads)) <= 1e-10
        assert np.max(np.abs(correction.c - _qp_oracle(grads))) <= 1e-8


def test_corrected_gradients_are_exactly_stationary(rng):
    grads = rng.standard_normal((3, 5))
    correction = corrected_alpha(grads)
    shifted = grads - correction.c
    assert np.linalg.norm(correction.alpha @ shifted) <= 1e-12


@given(arrays(np.float64, (3, 4), elements=st.floats(-10, 10)))
@hsettings(max_examples=60, deadline=None)
def test_min_norm_beats_every_vertex(grads):
    result = min_norm_alpha(grads)
    assert np.all(result.alpha >= 0.0)
    assert result.alpha.sum() == pytest.approx(1.0)
    vertices = np.linalg.norm(grads, axis=1)
    assert result.min_norm_value <= vertices.min() + 1e-9
    assert result.min_norm_value <= np.linalg.norm(grads.mean(axis=0)) + 1e-9


def test_min_norm_with_tiny_and_zero_gradient_rows():
    grads = np.array([[1e-6, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])
    result = min_norm_alpha(grads)
    assert result.min_norm_value <= 1e-12
    assert result.alpha[1] == pytest.approx(1.0)


def test_min_norm_kkt_conditions_on_support(rng):
    for m, n in ((3, 5), (4, 6), (4, 3)):
        for _ in range(10):
            grads = rng.standard_normal((m, n))
            result = min_norm_alpha(grads)
            value = result.min_norm_value ** 2
            g_alpha = grads @ result.combined
            support = result.alpha > 1e-10
            # (Gα)_i = αᵀGα sur le support, >= ailleurs
            assert np.allclose(g_alpha[support], value, atol=1e-8)
            assert np.all(g_alpha[~support] >= value - 1e-8)


def test_min_norm_is_scale_covariant(rng):
    grads = rng.standard_normal((3, 6))
    reference = min_norm_alpha(grads)
    for factor in (1e-3, 7.5, 1e3):
        scaled = min_norm_alpha(factor * grads)
        assert np.allclose(scaled.alpha, reference.alpha, atol=1e-6)
        assert scaled.min_norm_value == pytest.approx(factor * reference.min_norm_value, rel=1e-6)


@given(arrays(np.float64, 5, elements=st.floats(-5, 5)))
@hsettings(max_examples=60, deadline=None)
def test_project_simplex_lands_on_simplex(values):
    projected = project_simplex(values)
    assert np.all(projected >= 0.0)
    assert projected.sum() == pytest.approx(1.0)
    assert np.allclose(project_simplex(projected), projected, atol=1e-12)


# ============================================
# MINRES
# ============================================

def _assert_monotone(report):
    history = np.asarray(report.residual_history)
    assert np.all(np.diff(history) <= 0.0)
    assert report.operator_calls == report.iterations_used + 1


def test_minres_identity():
    report = minres(lambda v: v, np.array([3.0, 4.0]), k=5)
    assert np.allclose(report.solution, [3.0, 4.0])
    assert report.iterations_used == 1
    assert report.residual == pytest.approx(0.0, abs=1e-12)
    _assert_monotone(report)


def test_minres_diagonal():
    A = np.diag([1.0, 2.0, 3.0])
    report = minres(lambda v: A @ v, np.ones(3), k=3)
    assert np.max(np.abs(report.solution - [1.0, 0.5, 1.0 / 3.0])) <= 1e-10
    _assert_monotone(report)


def test_minres_consistent_singular_system():
    A = np.diag([1.0, 0.0])
    report = minres(lambda v: A @ v, np.array([1.0, 0.0]), k=2)
    assert np.allclose(report.solution, [1.0, 0.0])
    assert report.residual == pytest.approx(0.0, abs=1e-12)
    assert report.converged
    _assert_monotone(report)


def test_minres_zero_rhs_returns_immediately():
    report = minres(lambda v: 2.0 * v, np.zeros(4), k=3)
    assert report.iterations_used == 0
    assert report.operator_calls == 1
    assert np.all(report.solution == 0.0)


def test_minres_matches_dense_solve_on_indefinite_systems():
    rng = np.random.default_rng(7)
    for _ in range(20):
        q, _ = np.linalg.qr(rng.standard_normal((50, 50)))
        eigenvalues = rng.uniform(1.0, 10.0, 50) * rng.choice([-1.0, 1.0], 50)
        A = q @ np.diag(eigenvalues) @ q.T
        A = 0.5 * (A + A.T)
        b = rng.standard_normal(50)
        report = minres(lambda v: A @ v, b, k=500, tol=1e-13)
        expected = np.linalg.solve(A, b)
        assert np.linalg.norm(report.solution - expected) <= 1e-8 * np.linalg.norm(expected)
        _assert_monotone(report)


def test_minres_iteration_cap():
    rng = np.random.default_rng(3)
    A = np.diag(np.arange(1.0, 21.0))
    report = minres(lambda v: A @ v, rng.standard_normal(20), k=2)
    assert report.iterations_used == 2
    assert report.operator_calls == 3
    assert not report.converged
    _assert_monotone(report)


def test_minres_beats_best_multiple_of_rhs(rng):
    for k in (1, 2, 5):
        q, _ = np.linalg.qr(rng.standard_normal((30, 30)))
        A = q @ np.diag(rng.uniform(-5.0, 5.0, 30)) @ q.T
        A = 0.5 * (A + A.T)
        b = rng.standard_normal(30)
        Ab = A @ b
        guess = (b @ Ab) / (Ab @ Ab) * b
        report = minres(lambda v: A @ v, b, k=k)
        assert np.linalg.norm(b - A @ report.solution) <= np.linalg.norm(b - A @ guess) + 1e-10


def test_minres_validation_errors():
    with pytest.raises(ValidationError):
        minres(lambda v: v, np.ones(2), k=0)
    with pytest.raises(ValidationError):
        minres(lambda v: v, np.ones(2), k=2, tol=0.0)
    with pytest.raises(ContractError):
        minres(lambda v: np.ones(3), np.ones(2), k=2)


def test_minres_breakdown_on_nan():
    calls = {'n': 0}

    def apply(v):
        calls['n'] += 1
        return v if calls['n'] == 1 else np.full_like(v, np.nan)

    with pytest.raises(BreakdownError) as excinfo:
        minres(apply, np.array([1.0, 2.0]), k=3, x0=np.array([0.5, 0.5]))
    assert excinfo.value.last_iterate is not None
