"""BEC thresholds of block and coupled GL(GF(2), p) ensembles.

Coupling lifts the (2,4) threshold well above the block value and pulls the
(3,6) values towards capacity 1/2.  Takes a couple of minutes.
"""
from nbldpc_cc.density_evolution import threshold_coupled, threshold_uncoupled

print(" J K p      BC        CC")
for J, K in ((2, 4), (3, 6)):
    for p in (1, 2, 3, 4):
        bc = threshold_uncoupled(J, K, p, tol=1e-5)
        cc = threshold_coupled(J, K, p, L=32, tol=1e-4)
        print(f" {J} {K} {p}  {bc:.5f}  {cc:.5f}")
