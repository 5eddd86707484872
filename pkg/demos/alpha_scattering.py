"""
Alpha particles deflected by two repulsive atoms
================================================

Particles arrive from the far left with random impact parameters and are
pushed away by two fixed point charges stacked vertically.  We tally the
deflection angles.
"""
import math

from stattrials.scattering import (
    ScatteringConfig, analytic_single_center_angle, integrate_trajectory, sweep,
)

# sanity check first: one centre reproduces the Rutherford angle
one = ScatteringConfig(centers=[((0.0, 0.0), 1.0)], start_x=-1000.0, stop_x=1000.0, max_steps=10**7)
for b in (0.5, 1.0, 2.0):
    out = integrate_trajectory(b, one)
    print(f"b={b}: simulated {out.alpha:.5f}  analytic {analytic_single_center_angle(b):.5f}")

# now the two-atom target with 5000 particles
cfg = ScatteringConfig(particles=5000)
hist, outcomes = sweep(cfg, bins=24)
print("failed trajectories:", sum(not o.ok for o in outcomes))
print("worst relative energy drift:", max(o.energy_drift for o in outcomes))

for lo, count in zip(hist.edges[:-1], hist.counts):
    print(f"{math.degrees(lo):7.1f} deg  {count:5d}")
