"""
QoS-feasible TDMA allocation
============================

Users 2..M demand fixed throughputs; user 1 takes whatever service headroom
the frame has left.  The maximum it can be promised is f(R) minus the other
demands, where f is the secondary success probability -- so it falls as the
rate target R rises, and as more demanding users join.

For the no-direct-link topology the slot split zeta is a free knob: the
search trades the broadcast phase (relay decoding, hence primary outage)
against the forwarding phase (secondary success).
"""
import numpy as np

from cogrelay import SystemConfig, max_lambda_k, search_zeta, solve_assignment

TARGETS = (0.1, 0.2, 0.1, 0.15, 0.1)   # demands of users 2..6


def preset(M, R, case="direct", zeta=0.5):
    return SystemConfig(M=M, gamma_p=50.0, gamma_s=30.0, R=R, case=case,
                        zeta=zeta, lambda_p=0.1, lambda_s=(0.0,) + TARGETS[:M - 1])


print("maximum supportable lambda_1 vs R (direct link):")
print(f"{'R':>5} {'M=4':>8} {'M=5':>8} {'M=6':>8}")
for R in np.linspace(0.0, 1.5, 7):
    row = [max_lambda_k(preset(M, float(R)), 0) for M in (4, 5, 6)]
    print(f"{R:5.2f} {row[0]:8.4f} {row[1]:8.4f} {row[2]:8.4f}")

print("\nthe R=0 endpoints are exactly 1 minus the competing demands:")
print("  0.60 / 0.45 / 0.35 for M = 4 / 5 / 6")

# one concrete assignment, spelled out
cfg = preset(5, 0.5)
sol = solve_assignment(cfg, 0)
print(f"\nassignment at M=5, R=0.5: omega = {np.round(sol.omega, 4)}")
print(f"  slack = {sol.slack:.4f}, lambda_1_max = {sol.lambda_k_max:.4f}")

# no direct link: the slot split matters
print("\nbest slot split without a direct link (M=5):")
print(f"{'R':>5} {'zeta*':>7} {'lambda_1_max':>13} {'vs zeta=1/2':>12}")
for R in (0.25, 0.5, 0.75, 1.0):
    best = search_zeta(preset(5, R, case="nodirect"), 0, grid_size=199)
    half = max_lambda_k(preset(5, R, case="nodirect", zeta=0.5), 0)
    print(f"{R:5.2f} {best.zeta:7.3f} {best.lambda_k_max:13.4f} {half:12.4f}")
