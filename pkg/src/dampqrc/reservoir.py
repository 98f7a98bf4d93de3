"""Gate-based echo state network with induced damping, ensemble (population) mode.

One step of the reservoir on the diagonal ensemble state ``p``:

1. encode the input ``x`` with ``U(x)`` and measure every qubit in the Z basis,
   which on a diagonal state is the stochastic map ``p' = |U|**2 @ p``;
2. read out the Z-correlator features from ``p'``;
3. damp every qubit towards ``|0>`` with ``gamma = sin(theta/2)**2``.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass
from functools import lru_cache
from math import comb, pi

import numpy as np

from . import qsim

FAMILIES = ("cx", "ccx")
TOPOLOGIES = ("ring", "open")


@dataclass(frozen=True)
class AnsatzConfig:
    """Encoding circuit. The rotation angle is ``input_scale * x + input_offset``."""

    n_qubits: int
    family: str = "cx"
    topology: str = "ring"
    input_scale: float = pi / 4
    input_offset: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"topology must be one of {TOPOLOGIES}, got {self.topology!r}")
        min_n = 2 if self.family == "cx" else 3
        if self.n_qubits < min_n:
            raise ValueError(f"{self.family} ansatz needs at least {min_n} qubits, got {self.n_qubits}")
        if self.input_scale == 0:
            raise ValueError("input_scale must be non-zero")

    def angle(self, x: float) -> float:
        return self.input_scale * x + self.input_offset


@dataclass(frozen=True)
class ReservoirConfig:
    ansatz: AnsatzConfig
    damping_theta: float = 0.8
    observable_order: int = 1
    include_bias: bool = True

    def __post_init__(self):
        if not 0.0 <= self.damping_theta <= pi:
            raise ValueError(f"damping_theta must lie in [0, pi], got {self.damping_theta!r}")
        if not 1 <= self.observable_order <= self.ansatz.n_qubits:
            raise ValueError(
                f"observable_order must lie in [1, {self.ansatz.n_qubits}], got {self.observable_order}"
            )

    @property
    def n_qubits(self) -> int:
        return self.ansatz.n_qubits

    @property
    def gamma(self) -> float:
        return float(np.sin(self.damping_theta / 2) ** 2)

    @property
    def n_features(self) -> int:
        return n_features(self.n_qubits, self.observable_order, self.include_bias)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ReservoirConfig":
        d = dict(d)
        return cls(ansatz=AnsatzConfig(**d.pop("ansatz")), **d)


def make_config(n_qubits: int, family: str = "cx", damping_theta: float = 0.8, observable_order: int = 1, **kw) -> ReservoirConfig:
    """Shorthand for building a flat config."""
    ansatz_keys = {"topology", "input_scale", "input_offset"}
    ansatz = AnsatzConfig(n_qubits=n_qubits, family=family, **{k: v for k, v in kw.items() if k in ansatz_keys})
    rest = {k: v for k, v in kw.items() if k not in ansatz_keys}
    return ReservoirConfig(ansatz, damping_theta=damping_theta, observable_order=observable_order, **rest)


# -- encoding circuit ------------------------------------------------------------


def encoding_gates(family: str, n_qubits: int, topology: str = "ring") -> list[tuple]:
    """Gate list of ``U(x)`` in application order.

    Entries are ``("rx", q)`` or ``("x", controls, target)``. Block ``i``
    rotates qubit ``i`` and then applies the entangler controlled by ``i``
    (and ``i+1`` for Toffoli). Ring topology wraps indices modulo ``n``;
    open topology drops entanglers that would leave the register.
    """
    n = n_qubits
    gates: list[tuple] = []
    width = 1 if family == "cx" else 2
    n_blocks = n if family == "cx" else max(n - 1, 1)
    for i in range(n_blocks):
        gates.append(("rx", i))
        span = [i + j for j in range(width + 1)]
        if topology == "open" and span[-1] >= n:
            continue
        span = [q % n for q in span]
        if len(set(span)) < len(span):
            continue
        gates.append(("x", tuple(span[:-1]), span[-1]))
    return gates


def apply_gates(mat: np.ndarray, gates: list[tuple], n: int, angle: float) -> np.ndarray:
    """Left-multiply a ``(2**n, m)`` array by the circuit ``gates``."""
    rx = qsim.rx_gate(angle)
    for g in gates:
        if g[0] == "rx":
            mat = qsim.apply_1q(mat, rx, g[1], n)
        else:
            mat = qsim.apply_x_controlled(mat, g[1], g[2], n)
    return mat


def build_encoding_unitary(cfg: AnsatzConfig, x: float) -> np.ndarray:
    if not np.isfinite(x):
        raise ValueError(f"input must be finite, got {x!r}")
    n = cfg.n_qubits
    gates = _gates(cfg.family, n, cfg.topology)
    return apply_gates(np.eye(1 << n, dtype=complex), gates, n, cfg.angle(x))


@lru_cache(maxsize=64)
def _gates(family: str, n: int, topology: str) -> tuple:
    return tuple(encoding_gates(family, n, topology))


# -- observables -----------------------------------------------------------------


def n_features(n_qubits: int, order: int, include_bias: bool = False) -> int:
    return sum(comb(n_qubits, j) for j in range(1, order + 1)) + int(include_bias)


def correlator_subsets(n_qubits: int, order: int) -> list[tuple[int, ...]]:
    """Qubit subsets of size 1..order, by size then lexicographically."""
    return [s for j in range(1, order + 1) for s in itertools.combinations(range(n_qubits), j)]


def subset_mask(subset, n_qubits: int) -> int:
    return sum(1 << (n_qubits - 1 - q) for q in subset)


@lru_cache(maxsize=32)
def parity_matrix(n_qubits: int, order: int) -> np.ndarray:
    """Rows are ``(-1)**popcount(j & mask(S))`` over basis index ``j``."""
    masks = np.array([subset_mask(s, n_qubits) for s in correlator_subsets(n_qubits, order)], dtype=np.int64)
    idx = np.arange(1 << n_qubits, dtype=np.int64)
    parity = np.bitwise_count(masks[:, None] & idx[None, :]) & 1
    out = 1.0 - 2.0 * parity
    out.setflags(write=False)
    return out


def features(p: np.ndarray, order: int, include_bias: bool = True) -> np.ndarray:
    """Z-correlator expectation values of the diagonal state ``p``."""
    p = np.asarray(p, dtype=float)
    n = p.shape[-1].bit_length() - 1
    if not 1 <= order <= n:
        raise ValueError(f"observable order must lie in [1, {n}], got {order}")
    z = p @ parity_matrix(n, order).T
    if include_bias:
        z = np.concatenate([z, np.ones(z.shape[:-1] + (1,))], axis=-1)
    return z


# -- dynamics --------------------------------------------------------------------


def transition_matrix(cfg: AnsatzConfig, x: float) -> np.ndarray:
    return qsim.to_stochastic(build_encoding_unitary(cfg, x), check=False)


def step(p: np.ndarray, x: float, cfg: ReservoirConfig) -> tuple[np.ndarray, np.ndarray]:
    """Advance the ensemble state by one input. Returns ``(damped_state, features)``."""
    measured = transition_matrix(cfg.ansatz, x) @ p
    z = features(measured, cfg.observable_order, cfg.include_bias)
    return qsim.damp_populations(measured, cfg.gamma), z


def _evolve(inputs, cfg: ReservoirConfig, p0):
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 1 or inputs.size == 0:
        raise ValueError("inputs must be a non-empty 1-D sequence")
    p = qsim.basis_population(cfg.n_qubits) if p0 is None else qsim.check_population(p0)
    for x in inputs:
        p, z = step(p, x, cfg)
        yield p, z


def run_sequence(inputs, cfg: ReservoirConfig, p0: np.ndarray | None = None) -> np.ndarray:
    """Feature matrix ``H``: row ``t`` holds the features read at step ``t``."""
    return np.array([z for _, z in _evolve(inputs, cfg, p0)])


def run_with_states(inputs, cfg: ReservoirConfig, p0: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Like ``run_sequence`` but also returns the post-damping states."""
    states, feats = zip(*_evolve(inputs, cfg, p0))
    return np.array(feats), np.array(states)


def diagnostics_trace_distance(cfg: ReservoirConfig, inputs, p0: np.ndarray | None = None) -> np.ndarray:
    """Trace distance to the maximally mixed state after every step."""
    _, states = run_with_states(inputs, cfg, p0)
    d = states.shape[1]
    return 0.5 * np.abs(states - 1.0 / d).sum(axis=1)
