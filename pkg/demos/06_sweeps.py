"""
How stopping times move with delta and with population size
===========================================================

Mean stopping time is close to affine in log(1/delta).  Scaling every
community by omega leaves identityless rules unchanged (only proportions
matter) but slows the identity-based rules, which need collisions.
"""

import math

from mode_quest import bench as B

algos = B.standard_algorithms()
rows = B.scan_delta(B.get_instance("I2"), [0.1, 0.01, 0.001], algos, runs=20, seed=2)
for label in dict.fromkeys(r["algorithm"] for r in rows):
    sub = [r for r in rows if r["algorithm"] == label]
    slope, icpt, r2 = B.affine_fit([math.log(1 / r["delta"]) for r in sub],
                                   [r["mean_tau"] for r in sub])
    print(f"{label:26s} slope {slope:8.1f}  R2 {r2:.3f}")

rows = B.scan_scale(B.get_instance("I3"), [1, 3, 6], algos[:1] + algos[2:3], runs=20, seed=2)
print(B.rows_to_csv(rows, B.SCALE_COLUMNS))
