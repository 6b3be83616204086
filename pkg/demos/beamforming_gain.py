"""
Zero-forcing beamforming gain
=============================
"""
import numpy as np
from scipy import stats

from cogrelay import effective_gain, optimal_weights, substream

# Draw K-relay channel pairs, beamform each, and look at the gain law.
# The weights null the secondary destination completely, and the gain that
# survives toward the primary destination is Gamma(K-1, 1) distributed:
# one complex dimension is spent on the null.

rng = substream(2718, 0)


def draw(shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(0.5)


# a single instance, spelled out
h_pd = draw(4)
h_sd = draw(4)
res = optimal_weights(h_pd, h_sd)
print("one K=4 instance:")
print("  |g| =", np.linalg.norm(res.g))
print("  leakage toward sd =", res.leakage)
print("  gain toward pd    =", res.alpha)
print("  direct |h_pd|^2   =", float(np.sum(np.abs(h_pd) ** 2)))

# now 200k instances per K, vectorized
print(f"\n{'K':>2} {'mean(alpha)':>12} {'K-1':>4} {'KS vs Gamma':>12}")
for K in (2, 3, 5, 8):
    n = 200_000
    alpha = effective_gain(draw((n, K)), draw((n, K)), np.ones((n, K), dtype=bool))
    ks = stats.kstest(alpha, "gamma", args=(K - 1,)).statistic
    print(f"{K:2d} {alpha.mean():12.4f} {K - 1:4d} {ks:12.5f}")

print("\nmean tracks K-1 and the KS distance stays at the 1/sqrt(n) noise")
print("floor: beamforming across K relays buys a Gamma(K-1,1) combined gain.")
