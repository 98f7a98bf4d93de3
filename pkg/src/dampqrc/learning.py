"""Linear readout training and evaluation metrics."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

DEFAULT_LAMBDA = 1e-8


class RankDeficientError(np.linalg.LinAlgError):
    """Normal equations are singular and no ridge term was given."""


class UndefinedMetricError(ValueError):
    pass


class DegenerateSeriesWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class SeriesDataset:
    """Input/target series with washout, training and test spans.

    Spans are half-open row ranges: washout ``[0, t_washout)``, training
    ``[t_washout, t_train)``, test ``[t_train, len(inputs))``. ``valid`` marks
    target entries that exist (delay targets have none for ``t < tau``).
    """

    inputs: np.ndarray
    targets: np.ndarray
    t_washout: int
    t_train: int
    valid: np.ndarray | None = field(default=None)

    def __post_init__(self):
        n = len(self.inputs)
        if len(self.targets) != n:
            raise ValueError("inputs and targets must have equal length")
        if not 0 <= self.t_washout < self.t_train < n:
            raise ValueError(
                f"need 0 <= t_washout < t_train < length, got {self.t_washout}, {self.t_train}, {n}"
            )
        if self.valid is None:
            object.__setattr__(self, "valid", np.ones(n, dtype=bool))

    @property
    def train_rows(self) -> np.ndarray:
        rows = np.arange(self.t_washout, self.t_train)
        return rows[self.valid[rows]]

    @property
    def test_rows(self) -> np.ndarray:
        rows = np.arange(self.t_train, len(self.inputs))
        return rows[self.valid[rows]]


@dataclass(frozen=True)
class ReadoutWeights:
    w: np.ndarray
    ridge_lambda: float


def train_readout(h: np.ndarray, y: np.ndarray, ridge_lambda: float = DEFAULT_LAMBDA, rcond: float | None = None) -> ReadoutWeights:
    """Least-squares readout ``w = (H^T H + lambda I)^-1 H^T y`` via the SVD of ``H``.

    With ``ridge_lambda == 0`` this is the pseudoinverse fit and requires ``H``
    to have full column rank, unless ``rcond`` is given: then singular values
    below ``rcond * s_max`` are discarded and the minimum-norm solution is
    returned for any shape of ``H``.
    """
    h = np.asarray(h, dtype=float)
    y = np.asarray(y, dtype=float)
    if ridge_lambda < 0:
        raise ValueError("ridge_lambda must be non-negative")
    if h.ndim != 2 or y.shape != (h.shape[0],):
        raise ValueError(f"shape mismatch: H {h.shape}, y {y.shape}")
    u, s, vt = np.linalg.svd(h, full_matrices=False)
    if ridge_lambda == 0 and rcond is not None:
        keep = s > rcond * s.max(initial=0.0)
        filt = np.where(keep, 1.0 / np.where(keep, s, 1.0), 0.0)
    elif ridge_lambda == 0:
        rank_tol = s.max(initial=0.0) * max(h.shape) * np.finfo(float).eps
        if h.shape[0] < h.shape[1] or s.min(initial=np.inf) <= rank_tol:
            raise RankDeficientError("H^T H is singular; use ridge_lambda > 0")
        filt = 1.0 / s
    else:
        filt = s / (s**2 + ridge_lambda)
    w = vt.T @ (filt * (u.T @ y))
    return ReadoutWeights(w=w, ridge_lambda=float(ridge_lambda))


def predict(h: np.ndarray, weights: ReadoutWeights | np.ndarray) -> np.ndarray:
    w = weights.w if isinstance(weights, ReadoutWeights) else np.asarray(weights)
    h = np.asarray(h, dtype=float)
    if h.shape[-1] != w.shape[0]:
        raise ValueError(f"feature dimension {h.shape[-1]} does not match weights {w.shape[0]}")
    return h @ w


def nmse(y_pred: np.ndarray, y_target: np.ndarray) -> float:
    """Residual power over target variance (both summed over the test span)."""
    y_pred = np.asarray(y_pred, dtype=float)
    y_target = np.asarray(y_target, dtype=float)
    if y_pred.shape != y_target.shape or y_pred.size < 2:
        raise ValueError("nmse needs two equal-length series of at least 2 points")
    denom = np.sum((y_target - y_target.mean()) ** 2)
    if denom == 0:
        raise UndefinedMetricError("target series has zero variance")
    return float(np.sum((y_target - y_pred) ** 2) / denom)


def squared_correlation(y: np.ndarray, y_hat: np.ndarray, formula: str = "pearson") -> float:
    """Squared Pearson correlation, clamped to [0, 1].

    ``formula="printed"`` returns ``Cov / (Var Var)`` unclamped instead, for
    comparison with the non-normalised expression.
    """
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    vy = y.var()
    vh = y_hat.var()
    if vy == 0 or vh == 0:
        warnings.warn("zero variance in memory-capacity series", DegenerateSeriesWarning, stacklevel=3)
        return 0.0
    cov = np.mean((y - y.mean()) * (y_hat - y_hat.mean()))
    if formula == "printed":
        return float(cov / (vy * vh))
    if formula != "pearson":
        raise ValueError(f"unknown formula {formula!r}")
    return float(min(1.0, max(0.0, cov**2 / (vy * vh))))


def fit_and_evaluate(h: np.ndarray, data: SeriesDataset, ridge_lambda: float = DEFAULT_LAMBDA):
    """Train on the training span and return ``(weights, test_pred, test_target)``."""
    tr = data.train_rows
    te = data.test_rows
    w = train_readout(h[tr], data.targets[tr], ridge_lambda)
    return w, predict(h[te], w), data.targets[te]


def memory_capacity_tau(
    h: np.ndarray,
    inputs: np.ndarray,
    tau: int,
    split: tuple[int, int],
    ridge_lambda: float = DEFAULT_LAMBDA,
    formula: str = "pearson",
) -> float:
    """Squared correlation between the delayed input and a readout trained to recall it."""
    t_washout, t_train = split
    if tau < 0 or tau >= t_train - t_washout:
        raise ValueError(f"delay {tau} must lie in [0, {t_train - t_washout})")
    from .tasks import delay_task

    data = delay_task(inputs, tau, washout=t_washout, train=t_train - t_washout)
    _, pred, target = fit_and_evaluate(h, data, ridge_lambda)
    return squared_correlation(target, pred, formula)


def memory_capacity_curve(h, inputs, tau_max: int, split, ridge_lambda: float = DEFAULT_LAMBDA, formula: str = "pearson") -> np.ndarray:
    return np.array([memory_capacity_tau(h, inputs, tau, split, ridge_lambda, formula) for tau in range(tau_max + 1)])


def memory_capacity(h, inputs, tau_max: int, split, ridge_lambda: float = DEFAULT_LAMBDA, formula: str = "pearson") -> float:
    """``sum(MC_tau for tau in 0..tau_max) / tau_max``.

    The normalisation is by ``tau_max`` although the sum has ``tau_max + 1``
    terms, so a perfect memory scores ``(tau_max + 1) / tau_max``.
    """
    if tau_max < 1:
        raise ValueError("tau_max must be at least 1")
    return float(memory_capacity_curve(h, inputs, tau_max, split, ridge_lambda, formula).sum() / tau_max)
