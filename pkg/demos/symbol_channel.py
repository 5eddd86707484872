"""
Error rate of a three-letter channel
====================================

The source emits a1, a2, a3 with fixed probabilities.  A stochastic matrix
says what comes out for each letter, including an erasure symbol b.
"""
import numpy as np

from stattrials.symbol_channel import (
    DEFAULT_MATRIX, DEFAULT_SOURCE, analytic_error_rate, estimate_error_rate,
)

st = estimate_error_rate(DEFAULT_SOURCE, DEFAULT_MATRIX, trials=100_000)
print("simulated error rate:", st.error_rate)
print("expected error rate: ", analytic_error_rate(DEFAULT_SOURCE, DEFAULT_MATRIX))
print("running estimate first stable at n =", st.first_stable_n)

# how the running estimate settles down
for n in (100, 300, 1000, 3000, 10_000, 100_000):
    print(f"n={n:6d}  n_err/n = {st.running[n - 1]:.4f}")

np.set_printoptions(linewidth=100)
print("confusion counts (rows a1..a3, columns a1 a2 a3 b):")
print(st.confusion)
