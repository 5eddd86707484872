"""
Diffusion of a one-dimensional random walk
==========================================

Each walker takes N unit steps left or right with equal odds.  The mean
square displacement grows linearly with N, which is the signature of
diffusion.
"""
import numpy as np

from stattrials.random_walk import final_positions, fit_line, msd_curve

# a single ensemble: 10^5 walkers of 100 steps
z = final_positions(100, 100_000, seed=1)
print("walkers:", z.size, " mean z:", z.mean(), " mean z^2:", (z.astype(float) ** 2).mean())

# every final position has the parity of N and never exceeds N
assert np.all((z - 100) % 2 == 0) and np.abs(z).max() <= 100

# <z^2> against N, each point on its own block of substreams
rows = msd_curve([50, 100, 200, 400], trials=100_000)
for n, msd, se in rows:
    print(f"N={n:4d}  msd={msd:8.2f} +/- {se:.2f}")

slope, intercept = fit_line([r[0] for r in rows], [r[1] for r in rows])
print(f"least-squares fit: msd = {slope:.4f} N + {intercept:.3f}")
