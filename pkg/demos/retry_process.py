"""
A process whose failed steps are repeated
=========================================

Five operations run in sequence.  Each one fails with some probability and
is simply run again until it succeeds.  How long does the whole process
take on average, and how much does that time scatter?
"""
from stattrials.process_sim import ProcessSpec, analytic_moments, estimate

spec = ProcessSpec(durations=(1.6, 2.7, 1.4, 3.8, 2.6),
                   success_probs=(0.6, 0.7, 0.4, 0.8, 0.6))

for trials in (1_000, 10_000, 100_000):
    st = estimate(spec, trials)
    print(f"{trials:7d} trials: mean {st.mean:.4f} +/- {st.stderr:.4f}, variance {st.variance:.3f}")

mean, var = analytic_moments(spec)
print(f"geometric-retry formulas: mean {mean:.4f}, variance {var:.4f}")
