"""
One FIMAX round on a low-fidelity qutrit state
==============================================

The input has fidelity 1/18 with |Omega_00> but a large overlap (5/9) with
|Omega_21>. No twirled recurrence protocol can help here, yet a single
stabilizer round lifts the fidelity to about 0.63.
"""

import numpy as np

from distillery import BellSpectrum, fimax_select, fimax_step, two_copy_error_distribution
from distillery.weyl import bell_pos

d = 3
p = np.full(d * d, 1 / 18)
p[bell_pos(2, 1, d)] = 5 / 9
spec = BellSpectrum(d, p)
rho = spec.to_state()

# Bell spectrum laid out as a grid: rows are shifts l, columns are phases k
print(np.round(p.reshape(d, d), 3))

# the two-copy error distribution is just the outer product of the spectrum
dist = two_copy_error_distribution(spec)
print("largest pair probability", dist.max())  # 25/81

choice = fimax_select(dist, d)
print("generator", choice.generator, "class", choice.s_max)
print("P(eps) =", round(choice.success_prob, 4), " P(C) =", round(choice.coset_prob, 4))
print("coset", choice.coset.elements)

res = fimax_step(rho)
print("correction W_%d,%d^dagger" % tuple(res.correction))
print(np.round(res.spectrum.p.reshape(d, d), 4))
print("fidelity", round(res.fidelity, 4), "success probability", res.success_prob)

# the dense two-copy simulation gives the same answer
dense = fimax_step(rho, method="dense")
print("max deviation dense vs fast", np.abs(dense.spectrum.p - res.spectrum.p).max())
