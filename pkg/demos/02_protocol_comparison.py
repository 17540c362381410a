"""
FIMAX against the recurrence baselines
======================================

Each protocol is iterated until the fidelity crosses 1/d, the state turns
PPT, or nothing changes any more. The baselines twirl or rotate in a fixed
way, so they only ever work on the Bell state that already dominates.
"""

import numpy as np

from distillery import classify_distillability
from distillery.weyl import bell_diagonal_state

states = {
    "werner F=0.75": (2, [0.75, 1 / 12, 1 / 12, 1 / 12]),
    "dominant phase error": (2, [0.1, 0.6, 0.2, 0.1]),
    "dominant bit flip": (2, [0.1, 0.1, 0.7, 0.1]),
    "qutrit, mass on Omega_21": (3, [1 / 18] * 5 + [5 / 9] + [1 / 18] * 3),
}

for name, (d, p) in states.items():
    rho = bell_diagonal_state(d, np.array(p))
    print(name)
    protocols = ["fimax", "adgj", "p1p2", "bbpssw"] + (["dejmps"] if d == 2 else [])
    for proto in protocols:
        v = classify_distillability(rho, proto, max_iters=10)
        trace = " ".join(f"{f:.3f}" for f in v.trace)
        print(f"  {proto:7s} {str(v.distillable):5s} {v.reason:27s} {trace}")
