import numpy as np
import pytest


def rel_err(analytic, reference, floor=1e-8):
    return abs(analytic - reference) / max(abs(reference), floor)


def central_diff(f, x, h=1e-6):
    return (f(x + h) - f(x - h)) / (2.0 * h)


def grad_fd(loss_fn, theta, h=1e-6):
    """Central-difference gradient of a scalar function of a flat vector."""
    g = np.zeros_like(theta)
    for k in range(theta.size):
        tp = theta.copy()
        tm = theta.copy()
        tp[k] += h
        tm[k] -= h
        g[k] = (loss_fn(tp) - loss_fn(tm)) / (2.0 * h)
    return g


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
