"""
Stop-and-wait retransmission over a noisy line
==============================================

Data goes out in frames of D bits, one of them a parity bit.  A frame the
receiver rejects is sent again.  Longer frames waste less on parity but
fail more often, so there is a best frame length.
"""
from stattrials.arq_channel import ArqConfig, bsc_capacity, capacity_curve, simulate, sweep_frame_length

# throughput for D = 8 at a few bit error rates
for p in (0.0, 0.001, 0.01, 0.02, 0.05):
    r = simulate(ArqConfig(frame_len=8, bit_error_p=p, n_frames=100_000))
    print(f"p={p:<6} v={r.throughput:.4f}  retransmissions={r.retransmissions}")

# best frame length at p = 0.05
pts = sweep_frame_length(0.05, 2, 16, n_frames=100_000)
best = max(pts, key=lambda pt: pt.v_sim)
print(f"best D at p=0.05: {best.frame_len} (v={best.v_sim:.4f})")

# the empirical capacity next to the binary symmetric channel formula
for row in capacity_curve([0.0, 0.05, 0.1, 0.2], d_max=64, n_frames=20_000):
    print(f"p={row.p:<5} C_emp={row.c_emp:.4f} C_bsc={bsc_capacity(row.p):.4f} D_opt={row.d_opt}")
