"""A rate-1/4 polar code on BEC(0.5) and a BSC, simulated with SC decoding.

The simulated frame error rate sits below the sum of the active
bit-channel Bhattacharyya parameters.  Runs use four worker processes and
give the same counts as a single process would.

    python3 demos/04_polar_code_simulation.py
"""

from polarlab import SimConfig, bec, bsc, design, run_sim, sweep
from polarlab.sim import rows_to_csv

W = bec(0.5)
code = design(W, 10, 256)
r = run_sim(SimConfig(code, W, trials=4000, master_seed=1, workers=4))
print(f"BEC(0.5) N=1024 K=256: fer {r.fer:.2e}  95% CI {r.fer_ci}  bound {r.union_bound:.2e}")
print(f"wall time {r.wall_time:.2f}s")

print("\nrate-1/2 code, N = 256, over a BSC sweep")
points = [SimConfig(design(bsc(p), 8, 128), bsc(p), trials=2000, master_seed=2,
                    channel_name="bsc", channel_param=p) for p in (0.01, 0.03, 0.05)]
print(rows_to_csv(sweep(points)))
