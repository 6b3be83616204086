"""
Diversity-multiplexing tradeoff
===============================

The outage exponent traded against rate growth.  For each multiplexing gain
r the transmit rate scales as R = r log2(gamma); the diversity is the
high-SNR slope of log(outage) against log(gamma).  Cooperative relaying buys
the primary a full extra order per relay: M-1 with a direct link, M-2
without one.
"""
import numpy as np

from cogrelay import SystemConfig, analytic_dmt, empirical_diversity

grid = np.logspace(3, 5, 5)   # closed-form evaluation up to gamma = 1e5

for case in ("direct", "nodirect"):
    cfg = SystemConfig(M=4, gamma_p=50.0, gamma_s=30.0, R=0.5, case=case, zeta=0.5)
    curve = analytic_dmt(cfg, num_points=5)
    print(f"\n=== case: {case}, M=4 ===")
    print(f"{'r':>6} {'d analytic':>11} {'d fitted':>9}")
    for r, d in curve.points:
        if r >= curve.points[-1][0]:
            print(f"{r:6.3f} {d:11.3f} {'-':>9}   (endpoint: zero diversity)")
            continue
        d_hat = empirical_diversity(cfg, r, grid)
        print(f"{r:6.3f} {d:11.3f} {d_hat:9.3f}")

print("\nAt r=0 the fit lands on the full diversity order; as r grows the")
print("finite-SNR slope lags the asymptotic line, tightening as gamma -> inf.")
