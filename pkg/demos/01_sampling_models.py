"""
Two ways of watching a population
=================================

A population is split into communities.  Each epoch one individual is
drawn uniformly with replacement.  Without identities we only learn the
community label; with identities we also learn whether the individual
was seen before.
"""

import numpy as np

from mode_quest import make_instance
from mode_quest.sampler import generate_trace, running_counts, trial_rng

inst = make_instance([20, 16, 6, 4, 4], "I2")
print(inst.K, "communities,", inst.N, "individuals, true mode", inst.mode + 1)

# one trace serves both models: identityless rules just ignore `fresh`
comm, fresh = generate_trace(inst, trial_rng(seed=0), 400)
counts, distinct = running_counts(comm, fresh, inst.K)

for t in (10, 50, 100, 200, 400):
    print(f"t={t:4d}  N(t)={counts[t - 1]}  S(t)={distinct[t - 1]}")

# label frequencies approach the community proportions
print("empirical", np.round(counts[-1] / 400, 3), "true", inst.p)

# distinct counts saturate at the community sizes (coupon collecting)
expect = inst.N * (1 - (1 - 1 / inst.N) ** np.arange(1, 401))
print("distinct seen at t=100:", distinct[99].sum(), "expected", round(expect[99], 1))
