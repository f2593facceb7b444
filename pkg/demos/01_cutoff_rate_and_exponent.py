"""Capacity, cutoff rate and the random-coding exponent of a few channels.

The cutoff rate R0 is where the straight-line part of Er(R) meets the axis
at R = 0; between R0 and C the exponent is still positive but small.

    python3 demos/01_cutoff_rate_and_exponent.py
"""

import numpy as np

from polarlab import bec, bsc, capacity, critical_rate, cutoff_rate, qec, random_coding_exponent

for name, W in [("BSC(0.11)", bsc(0.11)), ("BEC(0.5)", bec(0.5)), ("QEC(0.25)", qec(0.25))]:
    C, R0 = capacity(W), cutoff_rate(W)
    print(f"{name:10s} C = {C:.4f}  R0 = {R0:.4f}  R0/C = {R0 / C:.3f}")

W = bsc(0.11)
print("\nEr(R) for BSC(0.11), uniform input")
print(f"critical rate ~ {critical_rate(W):.4f}")
for R in np.linspace(0, capacity(W), 9):
    er, rho = random_coding_exponent(W, None, R, return_rho=True)
    print(f"  R = {R:.3f}  Er = {er:.4f}  rho* = {rho:.3f}")
