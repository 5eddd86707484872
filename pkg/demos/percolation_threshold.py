"""
When does a random metal mesh conduct?
======================================

Cells of an M x M grid are occupied with probability p.  Current flows
from the top electrode to the bottom one when a cluster of 4-connected
occupied cells touches both.
"""
from stattrials.percolation import crossing_point, generate_grid, label_clusters, sweep_P
from stattrials.rng import new

# one small sample grid and its clusters
grid = generate_grid(12, 0.6, new(3))
lab = label_clusters(grid)
print(grid.dump())
print("clusters:", lab.cluster_count)

# P(p) for a 64 x 64 grid
curve = sweep_P(64, [0.50 + 0.02 * k for k in range(11)], trials=500)
for p, P, se, n in curve.points:
    print(f"p={p:.2f}  P={P:.3f} +/- {se:.3f}")

print("P crosses 1/2 at p =", round(crossing_point(curve), 4))
