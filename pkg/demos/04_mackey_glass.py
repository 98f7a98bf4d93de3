"""
Next-step prediction of a chaotic series
========================================

The Mackey-Glass delay equation with tau = 17 is chaotic. A reservoir
readout trained on 1300 steps predicts the next sample over 500 test steps.
"""

import numpy as np

from dampqrc import harness, tasks

series = tasks.mackey_glass_series()
print(f"{len(series)} samples, range [{series.min():.3f}, {series.max():.3f}]")

# %%
# Persistence (predict x[t+1] = x[t]) is the baseline to beat.

data = tasks.next_step_task(series)
te = data.test_rows
persistence = np.sum((data.targets[te] - data.inputs[te]) ** 2) / np.sum((data.targets[te] - data.targets[te].mean()) ** 2)
print(f"persistence NMSE {persistence:.4f}")

for k in (1, 2):
    cfg = harness.parse_config(
        {"task": "mackey-glass", "reservoir": {"ansatz": {"n_qubits": 7}, "damping_theta": 0.8, "observable_order": k}}
    )
    print(f"reservoir k={k} NMSE {harness.run_experiment(cfg)['aggregate']['nmse']['mean']:.4f}")
