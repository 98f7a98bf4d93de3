"""
Interpolation threshold of the readout
======================================

With 130 training rows and an unregularised minimum-norm readout, test
memory capacity collapses when the number of observables approaches 130
and recovers once the system is clearly underdetermined.
"""

from dampqrc import harness

n_obs = [60, 100, 125, 130, 135, 200, 300]
cfg = harness.parse_config({"task": "overfitting", "task_params": {"n_obs": n_obs}, "repetitions": 3})
agg = harness.run_experiment(cfg)["aggregate"]
for m in n_obs:
    bar = "#" * int(60 * agg[f"mc_nobs{m}"]["mean"])
    print(f"N_obs={m:4d}  MC {agg[f'mc_nobs{m}']['mean']:.3f} {bar}")
