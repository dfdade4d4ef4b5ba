"""Short BER sweep of one mother code at several rates (a few minutes)."""
from dataclasses import replace
from fractions import Fraction

from nbldpc_cc.channel import shannon_limit_biawgn
from nbldpc_cc.simulation import ExperimentConfig, run_ber_sweep

base = ExperimentConfig(m_s=26, p=4, N=1000, min_frame_errors=10, max_frames=20)
grids = {"1/4": (0.5, 1.0, 1.5), "1/2": (1.5, 2.0, 2.5), "3/4": (2.5, 3.0, 3.5), "7/8": (4.0, 4.5, 5.0)}

for r, grid in grids.items():
    limit = shannon_limit_biawgn(float(Fraction(r)))
    recs = run_ber_sweep(replace(base, rate=r, ebn0_db=grid))
    row = "  ".join(f"{x.ebn0_db:.1f} dB: {x.ber:.1e}" for x in recs)
    print(f"rate {r} (limit {limit:+.2f} dB)  {row}")
