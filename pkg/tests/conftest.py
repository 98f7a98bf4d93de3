"""Shared fixtures, an independent density-matrix oracle, and the acceptance report."""

from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dampqrc import qsim

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- oracle ---------------------------------------------------------------------
# Written out gate by gate with dense Kronecker products. It shares no code
# path with the population pipeline except the primitive gate constructors.


def oracle_circuit(family: str, n: int, angle: float) -> np.ndarray:
    """Dense ``U`` for the ring-topology encoding, one block per rotated qubit."""
    rx = qsim.rx_gate(angle)
    u = np.eye(2**n, dtype=complex)
    if family == "cx":
        for i in range(n):
            u = qsim.single_qubit_gate(rx, i, n) @ u
            u = qsim.cnot_gate(i, (i + 1) % n, n) @ u
    else:
        for i in range(n - 1):
            u = qsim.single_qubit_gate(rx, i, n) @ u
            u = qsim.toffoli_gate(i, (i + 1) % n, (i + 2) % n, n) @ u
    return u


def z_string(subset, n: int) -> np.ndarray:
    ops = [qsim.PAULI_Z if q in subset else np.eye(2) for q in range(n)]
    out = np.eye(1)
    for op in ops:
        out = np.kron(out, op)
    return out


def oracle_features(family: str, n: int, order: int, theta: float, angles) -> np.ndarray:
    """Full density-matrix pipeline: encode, dephase, read, ancilla damping."""
    rho = np.zeros((2**n, 2**n), dtype=complex)
    rho[0, 0] = 1.0
    subsets = [s for j in range(1, order + 1) for s in itertools.combinations(range(n), j)]
    zs = [z_string(s, n) for s in subsets]
    rows = []
    for a in angles:
        u = oracle_circuit(family, n, a)
        rho = u @ rho @ u.conj().T
        rho = np.diag(np.diag(rho))
        rows.append([np.trace(z @ rho).real for z in zs])
        for q in range(n):
            rho = qsim.ancilla_damp(rho, q, theta)
    return np.array(rows)
