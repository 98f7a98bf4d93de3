"""
Finite shots
============

On hardware each shot is one measurement record. Sampling individual
trajectories reproduces the ensemble features within their standard errors,
and the shot noise costs some memory capacity.
"""

import numpy as np

from dampqrc import reservoir, trajectory
from dampqrc.reservoir import make_config

cfg = make_config(3, "cx", 0.8, 3, include_bias=False)
x = np.random.default_rng(1).uniform(0, 1, 40)
exact = reservoir.run_sequence(x, cfg)

for shots in (1_000, 10_000, 50_000):
    mean, se = trajectory.trajectory_features(x, cfg, trajectory.ShotPlan(shots, seed=0))
    z = np.abs(mean - exact) / se
    print(f"{shots:6d} shots: max |error| {np.abs(mean - exact).max():.4f}, max z {z.max():.2f}, within 3 SE {np.mean(z <= 3):.1%}")

# %%
# Individual records: a measured bitstring per step for the first few shots.

traj = trajectory.sample_trajectories(x[:8], cfg, trajectory.ShotPlan(4, seed=2))
for row in traj:
    print(" ".join(format(int(b), "03b") for b in row))
