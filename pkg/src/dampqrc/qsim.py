"""Dense quantum primitives: gates, density matrices, population vectors, channels.

Convention used everywhere in the package: qubit 0 is the most significant bit
of the computational-basis index, so ``|q0 q1 ... q_{n-1}>`` has index
``sum(q_i << (n - 1 - i))``.

Density matrices and population vectors are plain numpy arrays. The ``check_*``
helpers enforce their invariants where a caller wants it.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_FLOOR = -1e-10
UNITARY_TOL = 1e-12

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


def _n_from_dim(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def bit_of(index, qubit: int, n_qubits: int):
    """Value of ``qubit`` in basis index ``index`` (works on arrays)."""
    return (index >> (n_qubits - 1 - qubit)) & 1


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.allclose(u @ u.conj().T, np.eye(u.shape[0]), rtol=0.0, atol=tol))


def check_density_matrix(rho: np.ndarray) -> np.ndarray:
    """Validate a density matrix and return it as a complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    _n_from_dim(rho.shape[0])
    if not np.allclose(rho, rho.conj().T, rtol=0.0, atol=HERMITIAN_TOL):
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > TRACE_TOL:
        raise ValueError(f"density matrix trace is {np.trace(rho).real!r}, expected 1")
    if np.linalg.eigvalsh(rho).min() < PSD_FLOOR:
        raise ValueError("density matrix has a negative eigenvalue")
    return rho


def check_population(p: np.ndarray) -> np.ndarray:
    """Validate a population vector over ``2**n`` basis states."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ValueError(f"population vector must be 1-D, got shape {p.shape}")
    _n_from_dim(p.shape[0])
    if p.min() < -1e-12 or p.max() > 1 + 1e-12:
        raise ValueError("population entries must lie in [0, 1]")
    if abs(p.sum() - 1.0) > 1e-12:
        raise ValueError(f"populations sum to {p.sum()!r}, expected 1")
    return p


def basis_population(n_qubits: int, index: int = 0) -> np.ndarray:
    p = np.zeros(1 << n_qubits)
    p[index] = 1.0
    return p


def embed_population(p: np.ndarray) -> np.ndarray:
    """The density matrix ``diag(p)``."""
    return np.diag(np.asarray(p, dtype=float)).astype(complex)


def maximally_mixed(n_qubits: int) -> np.ndarray:
    d = 1 << n_qubits
    return np.eye(d, dtype=complex) / d


# -- gates -------------------------------------------------------------------


def rx_gate(angle: float) -> np.ndarray:
    """Single-qubit rotation about X: ``exp(-i angle X / 2)``."""
    if not np.isfinite(angle):
        raise ValueError(f"rotation angle must be finite, got {angle!r}")
    c = np.cos(angle / 2)
    s = np.sin(angle / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _check_indices(indices: Sequence[int], n: int) -> None:
    if n < 1:
        raise ValueError(f"qubit count must be positive, got {n}")
    for q in indices:
        if not 0 <= q < n:
            raise IndexError(f"qubit index {q} out of range for {n} qubits")
    if len(set(indices)) != len(indices):
        raise ValueError(f"qubit indices must be distinct, got {tuple(indices)}")


def single_qubit_gate(base: np.ndarray, target: int, n: int) -> np.ndarray:
    """Embed a 2x2 gate acting on ``target`` into the ``n``-qubit space."""
    _check_indices([target], n)
    out = np.eye(1, dtype=complex)
    for q in range(n):
        out = np.kron(out, base if q == target else IDENTITY_2)
    return out


def multi_controlled_gate(base: np.ndarray, controls: Sequence[int], target: int, n: int) -> np.ndarray:
    """``base`` on ``target`` when every control bit is 1, identity otherwise."""
    base = np.asarray(base, dtype=complex)
    if base.shape != (2, 2):
        raise ValueError("base gate must be 2x2")
    _check_indices([*controls, target], n)
    d = 1 << n
    idx = np.arange(d)
    active = np.ones(d, dtype=bool)
    for c in controls:
        active &= bit_of(idx, c, n) == 1
    tbit = bit_of(idx, target, n)
    flip = 1 << (n - 1 - target)
    u = np.zeros((d, d), dtype=complex)
    u[idx[~active], idx[~active]] = 1.0
    cols = idx[active]
    tb = tbit[active]
    # column j maps to rows j (same target bit) and j ^ flip (flipped target bit)
    u[cols, cols] = base[tb, tb]
    u[cols ^ flip, cols] = base[1 - tb, tb]
    return u


def controlled_gate(base: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    return multi_controlled_gate(base, [control], target, n)


def cnot_gate(control: int, target: int, n: int) -> np.ndarray:
    return multi_controlled_gate(PAULI_X, [control], target, n)


def toffoli_gate(c1: int, c2: int, target: int, n: int) -> np.ndarray:
    return multi_controlled_gate(PAULI_X, [c1, c2], target, n)


# -- in-place gate application (fast path) ---------------------------------------
#
# These act on the row index of a (2**n, m) array, i.e. they left-multiply by the
# gate without ever forming the 2**n x 2**n gate matrix.


def apply_1q(mat: np.ndarray, gate: np.ndarray, q: int, n: int) -> np.ndarray:
    m = mat.shape[1]
    t = mat.reshape(1 << q, 2, (1 << (n - 1 - q)) * m)
    return np.einsum("ab,ibj->iaj", gate, t).reshape(1 << n, m)


def apply_x_controlled(mat: np.ndarray, controls: Sequence[int], target: int, n: int) -> np.ndarray:
    """Left-multiply by a (multi-)controlled X: a row permutation."""
    idx = np.arange(1 << n)
    active = np.ones(1 << n, dtype=bool)
    for c in controls:
        active &= bit_of(idx, c, n) == 1
    perm = np.where(active, idx ^ (1 << (n - 1 - target)), idx)
    return mat[perm]


# -- state maps ----------------------------------------------------------------


def apply_unitary(rho: np.ndarray, u: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho)
    u = np.asarray(u)
    if u.shape != rho.shape:
        raise ValueError(f"unitary shape {u.shape} does not match state shape {rho.shape}")
    return u @ rho @ u.conj().T


def dephase(rho: np.ndarray) -> np.ndarray:
    """Unrecorded computational-basis measurement: returns the populations."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("expected a square density matrix")
    return np.clip(np.real(np.diagonal(rho)).copy(), 0.0, None)


def partial_trace_last(rho: np.ndarray, n_keep: int) -> np.ndarray:
    """Trace out every qubit after the first ``n_keep``."""
    d_keep = 1 << n_keep
    d_rest = rho.shape[0] // d_keep
    return np.einsum("iaja->ij", rho.reshape(d_keep, d_rest, d_keep, d_rest))


def damping_kraus(gamma: float) -> list[np.ndarray]:
    """Kraus operators of single-qubit amplitude damping with decay rate ``gamma``."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"decay rate must lie in [0, 1], got {gamma!r}")
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return [k0, k1]


def is_trace_preserving(ops: Sequence[np.ndarray], tol: float = 1e-12) -> bool:
    total = sum(k.conj().T @ k for k in ops)
    return bool(np.allclose(total, np.eye(total.shape[0]), rtol=0.0, atol=tol))


def apply_channel(rho: np.ndarray, ops: Sequence[np.ndarray], qubit: int) -> np.ndarray:
    """Apply a single-qubit Kraus channel to ``qubit`` of an n-qubit state."""
    n = _n_from_dim(np.asarray(rho).shape[0])
    out = np.zeros_like(rho, dtype=complex)
    for k in ops:
        full = single_qubit_gate(k, qubit, n)
        out += full @ rho @ full.conj().T
    return out


ANCILLA_CIRCUITS = ("recording", "literal")


def ancilla_circuit(qubit: int, theta: float, n: int, circuit: str = "recording") -> np.ndarray:
    """Unitary on ``n`` system qubits plus one ancilla (index ``n``).

    ``"recording"``: CR_X(theta) from the qubit onto the ancilla, then a CNOT
    from the ancilla back onto the qubit. The ancilla ends in ``|1>`` exactly
    when the qubit decayed, so tracing it out is amplitude damping.

    ``"literal"``: CNOT from the qubit onto the ancilla, then CR_X(theta)
    controlled by the ancilla on the qubit. The ancilla keeps no record of the
    rotation, so the qubit comes out in a superposition: populations match
    amplitude damping but a coherence ``-i sin(theta/2) cos(theta/2) p_1`` appears.
    """
    anc = n
    if circuit == "recording":
        return cnot_gate(anc, qubit, n + 1) @ controlled_gate(rx_gate(theta), qubit, anc, n + 1)
    if circuit == "literal":
        return controlled_gate(rx_gate(theta), anc, qubit, n + 1) @ cnot_gate(qubit, anc, n + 1)
    raise ValueError(f"circuit must be one of {ANCILLA_CIRCUITS}, got {circuit!r}")


def ancilla_damp(rho: np.ndarray, qubit: int, theta: float, circuit: str = "recording") -> np.ndarray:
    """Induced damping of ``qubit`` through a fresh ancilla.

    The ancilla is appended in ``|0>`` as the last qubit, the two-gate
    ``ancilla_circuit`` is applied and the ancilla is traced out. With the
    default circuit this equals amplitude damping with
    ``gamma = sin(theta/2)**2`` on every state.
    """
    rho = np.asarray(rho, dtype=complex)
    n = _n_from_dim(rho.shape[0])
    _check_indices([qubit], n)
    ext = np.kron(rho, np.array([[1, 0], [0, 0]], dtype=complex))
    u = ancilla_circuit(qubit, theta, n, circuit)
    ext = u @ ext @ u.conj().T
    return partial_trace_last(ext, n)


def damp_populations(p: np.ndarray, gamma: float, qubits: Sequence[int] | None = None) -> np.ndarray:
    """Amplitude damping of each listed qubit on a population vector."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"decay rate must lie in [0, 1], got {gamma!r}")
    p = np.array(p, dtype=float)
    n = _n_from_dim(p.shape[0])
    if qubits is None:
        qubits = range(n)
    for q in qubits:
        t = p.reshape(1 << q, 2, 1 << (n - 1 - q))
        moved = gamma * t[:, 1, :]
        t[:, 0, :] += moved
        t[:, 1, :] -= moved
    return p


def to_stochastic(u: np.ndarray, check: bool = True) -> np.ndarray:
    """Transition matrix ``M[j, i] = |U[j, i]|**2`` of encode-then-measure."""
    u = np.asarray(u)
    if check and not is_unitary(u, tol=1e-10):
        raise ValueError("to_stochastic requires a unitary matrix")
    return np.abs(u) ** 2


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Half the trace norm of ``a - b``.

    1-D inputs are treated as population vectors (diagonal states).
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.ndim == 1:
        return 0.5 * float(np.abs(a - b).sum())
    return 0.5 * float(np.linalg.svd(a - b, compute_uv=False).sum())
