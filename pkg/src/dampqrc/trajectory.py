"""Shot-based (quantum trajectory) simulation of the damped reservoir.

Between steps every shot sits in a computational basis state: the measurement
collapses it and the damping is sampled as a classical bit flip ``1 -> 0`` with
probability ``sin(theta/2)**2`` per qubit. Sampling a step therefore needs only
the columns of ``U(x)`` for the basis states currently occupied.

Each shot draws from its own Philox stream keyed by ``(seed, shot_index)``, so
results do not depend on how shots are grouped into batches or workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .reservoir import ReservoirConfig, _gates, apply_gates, parity_matrix


@dataclass(frozen=True)
class ShotPlan:
    shots: int = 50_000
    batches: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.shots < 1 or self.batches < 1:
            raise ValueError("shots and batches must be positive")
        if self.shots % self.batches:
            raise ValueError(f"{self.shots} shots do not split evenly into {self.batches} batches")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def batch_size(self) -> int:
        return self.shots // self.batches

    def batch_slices(self) -> list[slice]:
        b = self.batch_size
        return [slice(i * b, (i + 1) * b) for i in range(self.batches)]


def shot_rng(seed: int, shot: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed, shot]))


def _draws(rng: np.random.Generator, n_steps: int, n_qubits: int) -> np.ndarray:
    # column 0 picks the measurement outcome, column 1 + q decides the damping of qubit q
    return rng.random((n_steps, 1 + n_qubits))


def _advance(states, uniforms, x, cfg: ReservoirConfig):
    """One step for a vector of shots. Returns ``(outcomes, damped_states)``."""
    n = cfg.n_qubits
    d = 1 << n
    occupied, inverse = np.unique(states, return_inverse=True)
    basis = np.zeros((d, occupied.size), dtype=complex)
    basis[occupied, np.arange(occupied.size)] = 1.0
    a = cfg.ansatz
    cols = apply_gates(basis, _gates(a.family, n, a.topology), n, a.angle(x))
    cdf = np.cumsum(np.abs(cols) ** 2, axis=0)
    outcomes = (cdf[:, inverse] <= uniforms[:, 0] * cdf[-1, inverse]).sum(axis=0)
    outcomes = np.minimum(outcomes, d - 1)
    damped = outcomes.copy()
    gamma = cfg.gamma
    for q in range(n):
        bit = 1 << (n - 1 - q)
        flip = ((damped & bit) != 0) & (uniforms[:, 1 + q] < gamma)
        damped[flip] ^= bit
    return outcomes, damped


def _run_shots(inputs, cfg: ReservoirConfig, uniforms: np.ndarray) -> np.ndarray:
    """``uniforms`` has shape ``(shots, steps, 1 + n)``; returns ``(shots, steps)`` outcomes."""
    shots, steps = uniforms.shape[:2]
    states = np.zeros(shots, dtype=np.int64)
    out = np.empty((shots, steps), dtype=np.int64)
    for t, x in enumerate(inputs):
        out[:, t], states = _advance(states, uniforms[:, t], float(x), cfg)
    return out


def sample_trajectory(inputs, cfg: ReservoirConfig, rng: np.random.Generator) -> np.ndarray:
    """Measured bitstrings (as basis indices) of a single shot starting from ``|0...0>``."""
    inputs = np.asarray(inputs, dtype=float)
    u = _draws(rng, len(inputs), cfg.n_qubits)
    return _run_shots(inputs, cfg, u[None])[0]


def sample_trajectories(inputs, cfg: ReservoirConfig, plan: ShotPlan, workers: int = 1, chunk: int = 10_000) -> np.ndarray:
    """All shots of ``plan`` as a ``(shots, steps)`` array of measured basis indices."""
    inputs = np.asarray(inputs, dtype=float)
    n = cfg.n_qubits
    pieces = []
    for sl in plan.batch_slices():
        for start in range(sl.start, sl.stop, chunk):
            pieces.append(range(start, min(start + chunk, sl.stop)))

    def work(shots: range) -> np.ndarray:
        u = np.stack([_draws(shot_rng(plan.seed, s), len(inputs), n) for s in shots])
        return _run_shots(inputs, cfg, u)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(work, pieces))
    else:
        results = [work(p) for p in pieces]
    return np.concatenate(results, axis=0)


def estimate_features(trajectories: np.ndarray, n_qubits: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Shot means of Z-correlator parities and their standard errors.

    Returns two ``(steps, n_features)`` arrays. The standard error uses the
    sample standard deviation (``ddof=1``) of the ``+-1`` parities.
    """
    traj = np.asarray(trajectories)
    if traj.ndim == 1:
        traj = traj[None]
    shots = traj.shape[0]
    if shots < 2:
        raise ValueError("need at least two trajectories to estimate standard errors")
    d = 1 << n_qubits
    counts = np.stack([np.bincount(traj[:, t], minlength=d) for t in range(traj.shape[1])])
    mean = (counts / shots) @ parity_matrix(n_qubits, order).T
    var = np.clip(1.0 - mean**2, 0.0, None) * shots / (shots - 1)
    return mean, np.sqrt(var / shots)


def trajectory_features(inputs, cfg: ReservoirConfig, plan: ShotPlan, workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Finite-shot estimate of the feature matrix, bias column appended per ``cfg``."""
    traj = sample_trajectories(inputs, cfg, plan, workers=workers)
    mean, se = estimate_features(traj, cfg.n_qubits, cfg.observable_order)
    if cfg.include_bias:
        mean = np.hstack([mean, np.ones((mean.shape[0], 1))])
        se = np.hstack([se, np.zeros((se.shape[0], 1))])
    return mean, se


def empirical_populations(trajectories: np.ndarray, n_qubits: int) -> np.ndarray:
    """Per-step histogram of measured basis states, ``(steps, 2**n)``."""
    traj = np.atleast_2d(trajectories)
    d = 1 << n_qubits
    return np.stack([np.bincount(traj[:, t], minlength=d) for t in range(traj.shape[1])]) / traj.shape[0]
