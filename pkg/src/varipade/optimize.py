"""Gradient-based minimization of the discretized functional.

Two algorithms: plain gradient descent and Adam with bias correction.
`train` owns the whole loop: parameter initialization, grid handling,
loss recording, and failure capture (a Pade pole or a domain violation
mid-run produces a failed report instead of an exception).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .boundary import BoundaryExponents, compose_final_many
from .errors import VaripadeError
from .families import init_params, param_count
from .loss import loss_and_grad, sample_grid


@dataclass(frozen=True)
class TrainConfig:
    algorithm: str = "adam"  # adam | sgd
    learning_rate: float = 0.01
    steps: int = 20000
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    grid_n: int = 1000
    grid_mode: str = "midpoint"  # midpoint | random (resampled every step)
    seed: int = 0
    record_every: int = 50
    train_exponents: bool = True
    # trust region for the boundary exponents m_a, m_b; without it descent can
    # shrink an exponent toward 0, hiding the endpoint transition between
    # sample points and optimizing away the boundary condition
    exponent_bounds: tuple = (0.5, 4.0)
    # diagonal preconditioning: shrink the step (and initial weight) of any
    # coordinate whose output sensitivity at initialization exceeds 1; rescues
    # high-order polynomial bases on intervals wider than [-1, 1]
    precondition: bool = False
    early_stop: bool = False
    early_stop_tol: float = 1e-12
    early_stop_window: int = 100

    def __post_init__(self):
        if self.algorithm not in ("adam", "sgd"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.steps < 0:
            raise ValueError("steps must be nonnegative")
        if not (0 < self.adam_beta1 < 1 and 0 < self.adam_beta2 < 1):
            raise ValueError("Adam betas must lie in (0, 1)")
        if self.adam_eps <= 0:
            raise ValueError("adam_eps must be positive")
        if self.grid_n < 1 or self.record_every < 1:
            raise ValueError("grid_n and record_every must be positive")
        lo, hi = self.exponent_bounds
        if not (0 < lo <= 1.0 <= hi):
            raise ValueError("exponent_bounds must bracket the initial m = 1")


@dataclass(frozen=True)
class TrainReport:
    loss_history: list  # [(step, loss)]
    final_params: np.ndarray = field(repr=False)  # family params + (rho_a, rho_b)
    final_loss: float = float("nan")
    j_final: float = float("nan")
    wall_time_ms: float = 0.0
    status: str = "max_steps"  # converged | max_steps | failed
    failure_reason: Optional[str] = None

    @property
    def exponents(self):
        return BoundaryExponents(float(self.final_params[-2]), float(self.final_params[-1]))

    @property
    def family_params(self):
        return self.final_params[:-2]


def sgd_step(params, grad, lr):
    """One descent step w_new = w_old - lr * grad."""
    return params - lr * grad


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros(n), np.zeros(n))


def adam_step(state, params, grad, config):
    """One Adam update with bias correction; returns (new state, new params)."""
    t = state.t + 1
    m = config.adam_beta1 * state.m + (1.0 - config.adam_beta1) * grad
    v = config.adam_beta2 * state.v + (1.0 - config.adam_beta2) * grad * grad
    m_hat = m / (1.0 - config.adam_beta1 ** t)
    v_hat = v / (1.0 - config.adam_beta2 ** t)
    new_params = params - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.adam_eps)
    return AdamState(m, v, t), new_params


def train(problem, spec, config=TrainConfig()):
    """Minimize the discretized functional; never raises, failures go in status."""
    start = time.perf_counter()
    bc = problem.bc
    theta = np.concatenate([init_params(spec, config.seed, domain=(bc.x_a, bc.x_b)), [0.0, 0.0]])
    pf = param_count(spec)
    state = AdamState.zeros(pf + 2) if config.algorithm == "adam" else None
    fixed_grid = sample_grid(bc, config.grid_n, "midpoint") if config.grid_mode == "midpoint" else None
    step_scale = 1.0
    if config.precondition:
        step_scale = _sensitivity_scale(problem, spec, theta, fixed_grid or sample_grid(bc, config.grid_n, "midpoint"))
        theta = theta * step_scale
    history = []
    status = "max_steps"
    reason = None
    loss = float("nan")
    exps = _ExpView(theta)
    steps_done = 0
    try:
        for step in range(config.steps):
            steps_done = step + 1
            grid = fixed_grid if fixed_grid is not None else sample_grid(
                bc, config.grid_n, "random", seed=config.seed * 1_000_003 + step
            )
            loss, grad = loss_and_grad(problem, spec, theta[:pf], exps, grid)
            if step % config.record_every == 0:
                history.append((step, loss))
            if not config.train_exponents:
                grad[pf:] = 0.0
            if config.algorithm == "adam":
                state, new_theta = adam_step(state, theta, grad, config)
            else:
                new_theta = sgd_step(theta, grad, config.learning_rate)
            theta = theta + step_scale * (new_theta - theta)
            lo, hi = config.exponent_bounds
            theta[pf:] = np.clip(theta[pf:], np.log(lo), np.log(hi))
            exps = _ExpView(theta)
            if config.early_stop and _stalled(history, step, config):
                status = "converged"
                break
        final_grid = fixed_grid if fixed_grid is not None else sample_grid(
            bc, config.grid_n, "midpoint"
        )
        loss, _ = loss_and_grad(problem, spec, theta[:pf], exps, final_grid)
        label = steps_done if not history or history[-1][0] < steps_done else history[-1][0] + 1
        history.append((label, loss))
    except VaripadeError as exc:
        status = "failed"
        reason = str(exc)
        if not history:
            history.append((0, loss))
    elapsed = (time.perf_counter() - start) * 1000.0
    return TrainReport(
        loss_history=history,
        final_params=theta,
        final_loss=float(loss),
        j_final=float(loss),
        wall_time_ms=elapsed,
        status=status,
        failure_reason=reason,
    )


def _sensitivity_scale(problem, spec, theta, grid):
    """Per-coordinate step shrink factor 1/max(sensitivity, 1).

    Sensitivity is the RMS over the grid of the model's value and slope
    gradients at initialization; only coordinates steeper than O(1) are
    slowed (and their initial random weights shrunk to match), which tames
    ill-conditioned bases without touching well-scaled parameters.
    """
    pf = param_count(spec)
    _, _, gy, gdy = compose_final_many(
        spec, theta[:pf], theta[pf], theta[pf + 1], problem.bc, grid.points
    )
    rms = np.sqrt(np.mean(gy * gy + gdy * gdy, axis=1))
    scale = 1.0 / np.maximum(rms, 1.0)
    scale[pf:] = 1.0
    return scale


class _ExpView:
    """Exponent view over the tail of the flat parameter vector."""

    __slots__ = ("rho_a", "rho_b")

    def __init__(self, theta):
        self.rho_a = float(theta[-2])
        self.rho_b = float(theta[-1])


def _stalled(history, step, config):
    if len(history) < 2:
        return False
    window = config.early_stop_window
    recent = [l for s, l in history if s >= step - window]
    if len(recent) < 2:
        return False
    return abs(recent[-1] - recent[0]) < config.early_stop_tol
