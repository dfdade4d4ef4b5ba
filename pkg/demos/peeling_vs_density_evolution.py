"""Erasure decoding on sampled graphs against the density-evolution curve."""
import numpy as np

from nbldpc_cc import density_evolution as de
from nbldpc_cc.peeling import peel

J, K, p = 2, 4, 2
eps_star = de.threshold_uncoupled(J, K, p)
print(f"DE threshold {eps_star:.6f}")

print("  eps     sim residual  DE residual")
for eps in np.arange(0.39, 0.431, 0.01):
    sim = peel(50_000, J, K, p, eps, rng=1).residual
    t = de.run_uncoupled(eps, J, K, p)
    # a symbol sees all J check messages plus its channel
    full = de.variable_node(de.channel_distribution(eps, p), de.check_node(t.state, K, p), J + 1, p)
    print(f"  {eps:.3f}   {sim:.5f}       {de.undetermined_mass(full):.5f}")
