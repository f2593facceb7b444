"""Watching bit-channels polarize.

Exact synthesis for a BSC at small N, then the erasure recursion for a BEC
up to N = 2^20.  The average cutoff rate creeps up toward the symmetric
capacity while most indices head to Z = 0 or Z = 1.

    python3 demos/03_polarization.py
"""

from polarlab import bec_polarize, bsc, normalized_cutoff, polarization_stats, synthesize_all
from polarlab.channel import symmetric_capacity

W = bsc(0.11)
print(f"BSC(0.11) C_sym = {symmetric_capacity(W):.4f}")
for s in synthesize_all(W, 3):
    print(f"  i={s.index}  {s.branch}  C = {s.symmetric_capacity:.4f}  Z = {s.bhattacharyya:.4f}")

print("\nBEC(0.5)")
print(" n   avg R0   good    bad    middling  (delta = 1e-3)")
for n in range(0, 21, 2):
    prof = bec_polarize(0.5, n)
    g = polarization_stats(prof, 1e-3)
    print(f"{n:2d}  {normalized_cutoff(prof):.4f}  {g.good_fraction:.4f} "
          f"{g.bad_fraction:.4f}  {g.middling_fraction:.4f}")
