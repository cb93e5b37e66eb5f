# tests/test_tape.py

import numpy as np
import pytest
import torch
from scipy.optimize import minimize

from src.autodiff.tape import Tape, hvp_forward_over_reverse, tape_forward, tape_gradient, tape_hvp
from src.benchmarks.toy_mlp import toy_mlp_build
from src.core.exceptions import ConfigurationError, DimensionError, NumericOverflowError
from src.solvers.simplex import min_norm_alpha
from tests.helpers import central_gradient, relative_error


def _numpy_forward(tape, x):
    """Passe avant réécrite en numpy, indépendante de torch"""
    params = {slot.name: x[slot.offset:slot.offset + slot.size].reshape(slot.shape) for slot in tape.layout}
    h = tape.features.numpy()
    for i in range(len(tape.widths) - 2):
        h = np.tanh(h @ params[f"trunk.{i}.weight"].T + params[f"trunk.{i}.bias"])
    losses = []
    for t in range(tape.m):
        logits = h @ params[f"head{t}.weight"].T + params[f"head{t}.bias"]
        shifted = logits - logits.max(axis=1, keepdims=True)
        log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
        labels = tape.labels[t].numpy()
        losses.append(-log_probs[np.arange(len(labels)), labels].mean())
    return np.array(losses)


def test_zero_weights_give_log_two(toy_mlp):
    f = tape_forward(toy_mlp.tape, np.zeros(toy_mlp.n))
    assert np.allclose(f, np.log(2.0), atol=1e-12)


def test_forward_is_deterministic_and_cached(tiny_mlp, rng):
    x = tiny_mlp.initial_point(rng)
    tape = tiny_mlp.tape
    before = tape.sweeps['forward']
    first = tape_forward(tape, x)
    second = tape_forward(tape, x)
    assert first.tobytes() == second.tobytes()
    assert tape.sweeps['forward'] == before + 1


def test_forward_matches_numpy_reimplementation(toy_mlp, rng):
    for _ in range(5):
        x = toy_mlp.initial_point(rng)
        assert np.max(np.abs(tape_forward(toy_mlp.tape, x) - _numpy_forward(toy_mlp.tape, x))) <= 1e-12


def test_gradient_matches_finite_differences(tiny_mlp, rng):
    x = tiny_mlp.initial_point(rng)
    for task in range(2):
        fd = central_gradient(lambda y: tiny_mlp.tape.forward(y)[task], x, step=1e-4)
        assert relative_error(tape_gradient(tiny_mlp.tape, x, task), fd) <= 1e-5


def test_gradient_ignores_other_head(toy_mlp, rng):
    x = toy_mlp.initial_point(rng)
    g1 = tape_gradient(toy_mlp.tape, x, 0)
    for slot in toy_mlp.tape.layout:
        if slot.name.startswith('head1'):
            assert np.all(g1[slot.offset:slot.offset + slot.size] == 0.0)
    assert np.allclose(toy_mlp.tape.gradients(x)[0], g1, atol=1e-14)


def test_gradient_vanishes_at_local_minimum():
    # sans couche cachée : régression logistique convexe par tête
    problem = toy_mlp_build(seed=2, widths=[2, 2])
    tape = problem.tape
    alpha = np.array([1.0, 0.0])
    result = minimize(lambda x: tape.forward(x)[0], np.zeros(problem.n),
                      jac=lambda x: tape.gradient(x, 0),
                      hessp=lambda x, v: tape.hvp(x, alpha, v),
                      method='trust-ncg', options={'gtol': 1e-10, 'maxiter': 200})
    assert np.linalg.norm(tape_gradient(tape, result.x, 0)) <= 1e-6


def test_hvp_on_quadratic_surrogate(rng):
    A = rng.normal(size=(6, 6))
    A = torch.as_tensor(A + A.T, dtype=torch.float64)
    x = torch.as_tensor(rng.normal(size=6), dtype=torch.float64)
    v = torch.as_tensor(rng.normal(size=6), dtype=torch.float64)
    hv = hvp_forward_over_reverse(lambda y: 0.5 * y @ A @ y, x, v)
    assert torch.allclose(hv, A @ v, atol=1e-12)


def test_hvp_matches_gradient_differences(toy_mlp):
    rng = np.random.default_rng(11)
    for _ in range(20):
        x = toy_mlp.initial_point(rng)
        v = rng.normal(size=toy_mlp.n)
        alpha = min_norm_alpha(toy_mlp.gradients(x))
        eps = 1e-4
        fd = alpha.alpha @ (toy_mlp.tape.gradients(x + eps * v) - toy_mlp.tape.gradients(x - eps * v)) / (2 * eps)
        assert relative_error(tape_hvp(toy_mlp.tape, x, alpha, v), fd) <= 1e-4


def test_hvp_is_symmetric_and_linear(toy_mlp, rng):
    x = toy_mlp.initial_point(rng)
    alpha = np.array([0.3, 0.7])
    u = rng.normal(size=toy_mlp.n)
    w = rng.normal(size=toy_mlp.n)
    hu = tape_hvp(toy_mlp.tape, x, alpha, u)
    hw = tape_hvp(toy_mlp.tape, x, alpha, w)
    assert abs(w @ hu - u @ hw) <= 1e-8 * max(1.0, abs(w @ hu))
    assert np.max(np.abs(tape_hvp(toy_mlp.tape, x, alpha, u + w) - (hu + hw))) <= 1e-10


def test_layout_and_locate(toy_mlp):
    tape = toy_mlp.tape
    assert tape.n_params == 60
    assert tape.locate(0) == ('trunk.0.weight', 0)
    assert tape.locate(16) == ('trunk.0.bias', 0)
    assert tape.locate(59) == ('head1.bias', 1)
    with pytest.raises(DimensionError):
        tape.locate(60)
    assert [node.kind for node in tape.nodes][:2] == ['affine', 'tanh']


def test_tape_rejects_bad_widths():
    features = np.zeros((4, 2))
    labels = np.zeros((4, 2), dtype=int)
    with pytest.raises(ConfigurationError):
        Tape([2, 1], features, labels)
    with pytest.raises(ConfigurationError):
        Tape([3, 4, 2], features, labels)


def test_tape_checks_dimensions(tiny_mlp):
    with pytest.raises(DimensionError):
        tiny_mlp.tape.forward(np.zeros(tiny_mlp.n + 1))
    with pytest.raises(DimensionError):
        tiny_mlp.tape.gradient(np.zeros(tiny_mlp.n), 2)


def test_non_finite_values_raise():
    with pytest.raises(NumericOverflowError):
        Tape._numpy(torch.tensor([1.0, float('nan')]), 'test')
