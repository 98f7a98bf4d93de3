"""
Why a measured reservoir needs damping
======================================

Measuring every qubit after each input turns the encoding unitary into a
doubly stochastic map on the basis populations. Doubly stochastic maps only
ever move a distribution towards uniform, so without damping the reservoir
forgets everything, including the inputs it is meant to remember.
"""

import numpy as np

from dampqrc import qsim, reservoir
from dampqrc.reservoir import make_config

rng = np.random.default_rng(0)
inputs = [rng.uniform(0, 1, 40) for _ in range(10)]

# %%
# Trace distance to the maximally mixed state, averaged over ten random
# input sequences. With theta = 0 it decays to zero; with induced damping
# the state settles at a finite distance and stays input dependent.

for theta in (0.0, 0.4, 0.8):
    cfg = make_config(3, "cx", theta)
    d = np.mean([reservoir.diagnostics_trace_distance(cfg, x) for x in inputs], axis=0)
    print(f"theta={theta:.1f}  step 1: {d[0]:.3f}  step 10: {d[9]:.3f}  step 40: {d[-1]:.3f}")

# %%
# The damping circuit. An ancilla starts in |0>, a controlled X rotation
# kicks it when the qubit is excited, and a CNOT sends the qubit home if the
# ancilla fired. Tracing out the ancilla leaves amplitude damping with
# gamma = sin(theta/2)**2.

theta = 0.8
rho = np.array([[0.3, 0.2], [0.2, 0.7]], dtype=complex)
via_ancilla = qsim.ancilla_damp(rho, 0, theta)
via_kraus = qsim.apply_channel(rho, qsim.damping_kraus(np.sin(theta / 2) ** 2), 0)
print("\nancilla circuit vs Kraus channel, max deviation:", np.abs(via_ancilla - via_kraus).max())

# Swapping the gate order (CNOT first, then the rotation controlled by the
# ancilla) moves the same population but leaves the qubit in a superposition.
literal = qsim.ancilla_damp(np.diag([0.3, 0.7]).astype(complex), 0, theta, circuit="literal")
print("reversed order on diag(0.3, 0.7):\n", np.round(literal, 4))
