import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dampqrc import qsim

angles = st.floats(-4 * np.pi, 4 * np.pi, allow_nan=False)
thetas = st.floats(0.0, np.pi)


def random_density(rng, n):
    a = rng.normal(size=(2**n, 2**n)) + 1j * rng.normal(size=(2**n, 2**n))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_population(rng, n):
    p = rng.random(2**n)
    return p / p.sum()


def test_rx_pi_is_minus_i_x():
    np.testing.assert_allclose(qsim.rx_gate(np.pi), -1j * qsim.PAULI_X, atol=1e-15)


def test_rx_rejects_nan():
    with pytest.raises(ValueError):
        qsim.rx_gate(float("nan"))


@given(angles)
def test_rx_unitary(a):
    assert qsim.is_unitary(qsim.rx_gate(a))


def test_qubit_zero_is_most_significant():
    # X on qubit 0 of |00> lands on index 2 = 0b10
    u = qsim.single_qubit_gate(qsim.PAULI_X, 0, 2)
    assert u[2, 0] == 1
    assert qsim.bit_of(2, 0, 2) == 1 and qsim.bit_of(2, 1, 2) == 0


def test_cnot_truth_table():
    u = qsim.cnot_gate(0, 1, 2)
    perm = {0: 0, 1: 1, 2: 3, 3: 2}
    for i, j in perm.items():
        assert u[j, i] == 1


def test_toffoli_flips_only_when_both_controls_set():
    u = qsim.toffoli_gate(0, 1, 2, 3)
    out = [int(np.argmax(u[:, i])) for i in range(8)]
    assert out == [0, 1, 2, 3, 4, 5, 7, 6]


def test_gate_index_validation():
    with pytest.raises(IndexError):
        qsim.single_qubit_gate(qsim.PAULI_X, 3, 3)
    with pytest.raises(ValueError):
        qsim.cnot_gate(1, 1, 3)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_fast_single_qubit_matches_kron(rng, n):
    gate = qsim.rx_gate(rng.uniform(0, 2 * np.pi))
    mat = rng.normal(size=(2**n, 3)) + 0j
    for q in range(n):
        np.testing.assert_allclose(qsim.apply_1q(mat, gate, q, n), qsim.single_qubit_gate(gate, q, n) @ mat, atol=1e-14)


@pytest.mark.parametrize("controls,target", [((0,), 1), ((2,), 0), ((0, 1), 2), ((2, 0), 1), ((3, 1), 0)])
def test_fast_controlled_x_matches_dense(rng, controls, target):
    n = 4
    mat = rng.normal(size=(2**n, 2**n))
    dense = qsim.multi_controlled_gate(qsim.PAULI_X, controls, target, n)
    np.testing.assert_allclose(qsim.apply_x_controlled(mat, controls, target, n), dense @ mat)


def test_apply_unitary_shape_mismatch():
    with pytest.raises(ValueError):
        qsim.apply_unitary(np.eye(4), np.eye(2))


def test_partial_trace_of_product(rng):
    a = random_density(rng, 2)
    b = random_density(rng, 1)
    np.testing.assert_allclose(qsim.partial_trace_last(np.kron(a, b), 2), a, atol=1e-14)


def test_damping_kraus_complete():
    for g in np.linspace(0, 1, 11):
        assert qsim.is_trace_preserving(qsim.damping_kraus(g))
    with pytest.raises(ValueError):
        qsim.damping_kraus(1.5)


def test_ancilla_damp_half_rotation():
    # theta = pi/2 moves half of |1> to |0>
    rho = np.diag([0.0, 1.0]).astype(complex)
    np.testing.assert_allclose(qsim.ancilla_damp(rho, 0, np.pi / 2), np.diag([0.5, 0.5]), atol=1e-15)


def test_literal_circuit_leaves_coherence():
    # CNOT then ancilla-controlled RX keeps the qubit pure: for diag(a, b) the
    # output is [[a + b s^2, -i b s c], [i b s c, b c^2]] with s, c of theta/2
    a, b, theta = 0.3, 0.7, 1.1
    s, c = np.sin(theta / 2), np.cos(theta / 2)
    out = qsim.ancilla_damp(np.diag([a, b]).astype(complex), 0, theta, circuit="literal")
    expected = np.array([[a + b * s**2, -1j * b * s * c], [1j * b * s * c, b * c**2]])
    np.testing.assert_allclose(out, expected, atol=1e-15)
    # its populations still agree with amplitude damping
    np.testing.assert_allclose(qsim.dephase(out), qsim.damp_populations([a, b], s**2), atol=1e-15)


def test_unknown_ancilla_circuit():
    with pytest.raises(ValueError):
        qsim.ancilla_damp(np.diag([1.0, 0.0]), 0, 0.5, circuit="other")


def test_ancilla_damp_full_reset(rng):
    rho = random_density(rng, 2)
    out = qsim.ancilla_damp(qsim.ancilla_damp(rho, 0, np.pi), 1, np.pi)
    np.testing.assert_allclose(out, np.diag([1, 0, 0, 0]), atol=1e-14)


@given(thetas, st.integers(0, 2), st.integers(0, 2**31))
def test_ancilla_matches_kraus_on_diagonal_states(theta, q, seed):
    rng = np.random.default_rng(seed)
    p = random_population(rng, 3)
    rho = qsim.embed_population(p)
    gamma = np.sin(theta / 2) ** 2
    via_anc = qsim.ancilla_damp(rho, q, theta)
    via_kraus = qsim.apply_channel(rho, qsim.damping_kraus(gamma), q)
    np.testing.assert_allclose(via_anc, via_kraus, atol=1e-12)
    np.testing.assert_allclose(qsim.dephase(via_kraus), qsim.damp_populations(p, gamma, [q]), atol=1e-12)


@given(thetas, st.integers(0, 1), st.integers(0, 2**31))
def test_ancilla_damp_is_amplitude_damping_on_any_state(theta, q, seed):
    rho = random_density(np.random.default_rng(seed), 2)
    out = qsim.ancilla_damp(rho, q, theta)
    qsim.check_density_matrix(out)
    np.testing.assert_allclose(out, qsim.apply_channel(rho, qsim.damping_kraus(np.sin(theta / 2) ** 2), q), atol=1e-12)


@given(thetas)
def test_ancilla_circuits_unitary(theta):
    for circuit in qsim.ANCILLA_CIRCUITS:
        assert qsim.is_unitary(qsim.ancilla_circuit(1, theta, 2, circuit))


@given(st.floats(0, 1), st.integers(0, 2**31))
def test_damp_populations_stochastic(gamma, seed):
    p = random_population(np.random.default_rng(seed), 3)
    out = qsim.damp_populations(p, gamma)
    assert out.min() >= 0
    assert abs(out.sum() - 1) < 1e-12
    # damping never increases the weight of any |1> bit
    for q in range(3):
        ones = qsim.bit_of(np.arange(8), q, 3) == 1
        assert out[ones].sum() <= p[ones].sum() + 1e-15


@given(angles, st.integers(0, 2**31))
def test_stochastic_matrix_is_doubly_stochastic(a, seed):
    u = qsim.toffoli_gate(0, 1, 2, 3) @ qsim.single_qubit_gate(qsim.rx_gate(a), 1, 3)
    m = qsim.to_stochastic(u)
    np.testing.assert_allclose(m.sum(axis=0), 1, atol=1e-12)
    np.testing.assert_allclose(m.sum(axis=1), 1, atol=1e-12)
    # encode-then-dephase on a diagonal state equals the stochastic map
    p = random_population(np.random.default_rng(seed), 3)
    np.testing.assert_allclose(qsim.dephase(qsim.apply_unitary(qsim.embed_population(p), u)), m @ p, atol=1e-12)


def test_to_stochastic_rejects_non_unitary():
    with pytest.raises(ValueError):
        qsim.to_stochastic(np.ones((2, 2)))


def test_trace_distance_vector_and_matrix_agree(rng):
    p, q = random_population(rng, 2), random_population(rng, 2)
    d_vec = qsim.trace_distance(p, q)
    d_mat = qsim.trace_distance(qsim.embed_population(p), qsim.embed_population(q))
    assert d_vec == pytest.approx(d_mat, abs=1e-14)
    assert qsim.trace_distance(qsim.basis_population(2), qsim.maximally_mixed(2).diagonal().real) == pytest.approx(0.75)


def test_validators():
    with pytest.raises(ValueError):
        qsim.check_population(np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        qsim.check_population(np.ones(3) / 3)
    with pytest.raises(ValueError):
        qsim.check_density_matrix(np.diag([1.2, -0.2]))
    qsim.check_density_matrix(qsim.maximally_mixed(2))


def test_rx_zero_and_half_turn():
    np.testing.assert_allclose(qsim.rx_gate(0.0), np.eye(2), atol=1e-15)
    r = 1 / np.sqrt(2)
    np.testing.assert_allclose(qsim.rx_gate(np.pi / 2), [[r, -1j * r], [-1j * r, r]], atol=1e-15)


def test_controlled_x_on_two_qubits_is_cnot():
    expected = np.eye(4)[[0, 1, 3, 2]]
    np.testing.assert_allclose(qsim.controlled_gate(qsim.PAULI_X, 0, 1, 2), expected)


def test_controlled_rotation_acts_only_in_control_sector():
    # control is qubit 1 (least significant); the |x1> sector receives RX
    theta = 0.9
    u = qsim.controlled_gate(qsim.rx_gate(theta), 1, 0, 2)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    out = u @ np.array([0, 1, 0, 0], dtype=complex)
    np.testing.assert_allclose(out, [0, c, 0, -1j * s], atol=1e-15)
    np.testing.assert_allclose(u @ np.eye(4)[0], np.eye(4)[0])


def test_toffoli_is_involution_and_permutation():
    t = qsim.toffoli_gate(0, 1, 2, 3)
    np.testing.assert_allclose(t @ t, np.eye(8))
    m = qsim.to_stochastic(t)
    assert set(np.unique(m)) == {0.0, 1.0}
    np.testing.assert_allclose(m.sum(axis=0), 1)


def test_unital_channel_keeps_uniform_population(rng):
    u = qsim.cnot_gate(0, 2, 3) @ qsim.single_qubit_gate(qsim.rx_gate(1.3), 1, 3)
    uniform = np.full(8, 1 / 8)
    np.testing.assert_allclose(qsim.to_stochastic(u) @ uniform, uniform, atol=1e-15)


def test_trace_distance_unitarily_invariant(rng):
    a = random_density(rng, 2)
    b = random_density(rng, 2)
    u = qsim.cnot_gate(0, 1, 2) @ qsim.single_qubit_gate(qsim.rx_gate(0.7), 0, 2)
    assert qsim.trace_distance(qsim.apply_unitary(a, u), qsim.apply_unitary(b, u)) == pytest.approx(qsim.trace_distance(a, b), abs=1e-12)


def test_dephase_plus_and_bell_states():
    plus = np.full((2, 2), 0.5, dtype=complex)
    np.testing.assert_allclose(qsim.dephase(plus), [0.5, 0.5])
    bell = np.zeros((4, 4), dtype=complex)
    bell[np.ix_([0, 3], [0, 3])] = 0.5
    np.testing.assert_allclose(qsim.dephase(bell), [0.5, 0, 0, 0.5])


def test_kraus_limits():
    e0, e1 = qsim.damping_kraus(0.0)
    np.testing.assert_allclose(e0, np.eye(2))
    np.testing.assert_allclose(e1, 0)
    one = np.diag([0, 1]).astype(complex)
    np.testing.assert_allclose(qsim.apply_channel(one, qsim.damping_kraus(1.0), 0), np.diag([1, 0]))
    g = 0.3
    rho = np.array([[0.4, 0.1 + 0.2j], [0.1 - 0.2j, 0.6]])
    out = qsim.apply_channel(rho, qsim.damping_kraus(g), 0)
    np.testing.assert_allclose(out, [[0.4 + g * 0.6, np.sqrt(1 - g) * (0.1 + 0.2j)], [np.sqrt(1 - g) * (0.1 - 0.2j), (1 - g) * 0.6]])


def test_ancilla_zero_angle_is_identity(rng):
    rho = random_density(rng, 2)
    np.testing.assert_allclose(qsim.ancilla_damp(rho, 1, 0.0), rho, atol=1e-14)


def test_stochastic_matrix_of_rotation():
    a = 1.1
    np.testing.assert_allclose(
        qsim.to_stochastic(qsim.rx_gate(a)),
        [[np.cos(a / 2) ** 2, np.sin(a / 2) ** 2], [np.sin(a / 2) ** 2, np.cos(a / 2) ** 2]],
        atol=1e-15,
    )


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_basis_state_distance_to_uniform(n):
    assert qsim.trace_distance(qsim.basis_population(n), np.full(2**n, 2.0**-n)) == pytest.approx(1 - 2.0**-n)
