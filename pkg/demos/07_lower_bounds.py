"""
Lower bounds
============

Any correct rule needs, on average, at least log(1/(2.4 delta)) divided
by an information rate.  Identities raise the rate, often by a lot.
"""

from mode_quest import bound_ratio_check, make_instance

for sizes in ([20, 12, 8, 5, 5], [20, 16, 6, 4, 4], [101, 100, 3]):
    rep = bound_ratio_check(make_instance(sizes), delta=0.1)
    print(sizes)
    print(f"  identityless >= {rep.lb_identityless:9.1f}   identity-based >= "
          f"{rep.lb_identity_based:7.1f}")
    print(f"  rate ratio {rep.ratio:7.2f} > {rep.ratio_lower:6.2f}   chain holds: {rep.holds}")
