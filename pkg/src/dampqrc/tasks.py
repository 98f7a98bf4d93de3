"""Benchmark series: NARMA-p, Mackey-Glass next-step prediction, delayed recall."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .learning import SeriesDataset


class IntegratorDivergence(FloatingPointError):
    pass


@dataclass(frozen=True)
class NarmaParams:
    p: int = 2
    alpha: float = 0.3
    beta: float = 0.05
    gamma: float = 1.5
    delta: float = 0.1
    T: float = 200.0
    length: int = 200
    # "paper": the memory sum enters linearly; "standard": it is multiplied by y[t-1]
    variant: str = "paper"

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("NARMA order p must be at least 1")
        if self.T <= 0:
            raise ValueError("input period T must be positive")
        if self.variant not in ("paper", "standard"):
            raise ValueError(f"unknown NARMA variant {self.variant!r}")


@dataclass(frozen=True)
class MackeyGlassParams:
    beta: float = 0.2
    gamma: float = 0.1
    tau: float = 17.0
    n: float = 10.0
    dt: float = 0.01
    sample_period: float = 1.0
    length: int = 2000
    history: float = 1.2

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        for name in ("sample_period", "tau"):
            ratio = getattr(self, name) / self.dt
            if ratio < 0 or abs(ratio - round(ratio)) > 1e-9:
                raise ValueError(f"{name} must be a non-negative integer multiple of dt")
        if self.sample_period <= 0 or self.length < 1:
            raise ValueError("sample_period and length must be positive")


def narma_input(t, T: float = 200.0):
    """Triple-sine drive, bounded by 0.1 in absolute value."""
    t = np.asarray(t, dtype=float)
    w = 2 * np.pi * t / T
    return 0.1 * np.sin(2.11 * w) * np.sin(3.73 * w) * np.sin(4.11 * w)


def narma_target(u: np.ndarray, params: NarmaParams) -> np.ndarray:
    """NARMA-p response to ``u``; ``y[t] = 0`` for ``t < p``.

    The memory term sums the ``p`` most recent past outputs ``y[t-1] .. y[t-p]``.
    """
    u = np.asarray(u, dtype=float)
    p = params.p
    if len(u) < p:
        raise ValueError(f"input length {len(u)} shorter than order {p}")
    y = np.zeros(len(u))
    for t in range(p, len(u)):
        mem = y[t - p : t].sum()
        if params.variant == "standard":
            mem *= y[t - 1]
        y[t] = params.alpha * y[t - 1] + params.beta * mem + params.gamma * u[t - p + 1] * u[t] + params.delta
    return y


def mackey_glass_series(params: MackeyGlassParams = MackeyGlassParams()) -> np.ndarray:
    """Sampled Mackey-Glass trajectory from a constant history.

    Fourth-order Runge-Kutta with step ``dt``; the delayed value at half steps
    is linearly interpolated on the stored grid.
    """
    beta, gamma, n, dt = params.beta, params.gamma, params.n, params.dt
    lag = int(round(params.tau / dt))
    every = int(round(params.sample_period / dt))
    n_steps = (params.length - 1) * every
    # x[k] holds x(k*dt - tau); the first lag+1 entries are the history
    x = np.empty(lag + n_steps + 1)
    x[: lag + 1] = params.history

    def rhs(xt, xd):
        return beta * xd / (1.0 + xd**n) - gamma * xt

    for k in range(lag, lag + n_steps):
        xt = x[k]
        if lag == 0:
            # no delay: plain RK4 on the instantaneous state
            k1 = rhs(xt, xt)
            s2 = xt + 0.5 * dt * k1
            k2 = rhs(s2, s2)
            s3 = xt + 0.5 * dt * k2
            k3 = rhs(s3, s3)
            s4 = xt + dt * k3
            k4 = rhs(s4, s4)
        else:
            d0 = x[k - lag]
            d1 = x[k - lag + 1]
            dm = 0.5 * (d0 + d1)
            k1 = rhs(xt, d0)
            k2 = rhs(xt + 0.5 * dt * k1, dm)
            k3 = rhs(xt + 0.5 * dt * k2, dm)
            k4 = rhs(xt + dt * k3, d1)
        x[k + 1] = xt + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.isfinite(x[k + 1]):
            raise IntegratorDivergence(f"non-finite state at t = {(k + 1 - lag) * dt}")
    return x[lag::every].copy()


def next_step_task(series, washout: int = 20, train: int = 1300, test: int = 500) -> SeriesDataset:
    """Predict ``series[t+1]`` from inputs up to ``series[t]``; the tail beyond the test span is dropped."""
    series = np.asarray(series, dtype=float)
    need = washout + train + test
    if len(series) < 2 or len(series) - 1 < need:
        raise ValueError(f"series of length {len(series)} too short for {need} steps plus one target")
    return SeriesDataset(series[:need], series[1 : need + 1], washout, washout + train)


def delay_task(inputs, tau: int, washout: int | None = None, train: int | None = None) -> SeriesDataset:
    """Recall the input ``tau`` steps back. Targets for ``t < tau`` are invalid."""
    inputs = np.asarray(inputs, dtype=float)
    L = len(inputs)
    if not 0 <= tau < L:
        raise ValueError(f"delay {tau} must lie in [0, {L})")
    targets = np.full(L, np.nan)
    targets[tau:] = inputs[: L - tau]
    valid = np.arange(L) >= tau
    if washout is None:
        washout = 0
    if train is None:
        train = (L - washout) // 2
    return SeriesDataset(inputs, targets, washout, washout + train, valid)
