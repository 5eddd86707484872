"""
Pendulum pushed by a gusty air stream
=====================================

The wind blows in one direction but its speed is redrawn every half second.
The pendulum therefore swings about a tilted mean position.
"""
import math

from stattrials.pendulum import PendulumParams, angle_distribution, simulate

params = PendulumParams()          # u0 = 2 m/s, du = 1 m/s, c = 0.05, m = 0.1 kg
traj = simulate(params)
print("samples recorded:", len(traj))

hist, st = angle_distribution(traj, params, bins=20)
print(f"mean angle {st.mean:.4f} rad, standard deviation {st.std:.4f} rad")

# crude text histogram of the angle distribution
peak = hist.counts.max()
for lo, count in zip(hist.edges[:-1], hist.counts):
    print(f"{lo:+.3f} {'#' * int(40 * count / peak)}")

# for comparison: the tilt a steady wind of the mean speed would produce
F = params.drag_coeff * params.wind_mean**2
print("steady-wind tilt:", math.atan(F / (params.mass * params.g)))
