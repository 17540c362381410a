"""
Why strict low-fidelity qubit states are out of reach
=====================================================

With every Bell overlap at most 1/2, a two-qubit Bell-diagonal state is
PPT. Uniform Bell-diagonal sampling therefore never produces a candidate,
and pure or generalized-basis states that do pass are PPT after the
Bell-diagonal projection every protocol starts with.
"""

import numpy as np

from distillery import FilterExhausted, SampleConfig
from distillery.densmat import min_pt_eigenvalue
from distillery.sampling import sample_family
from distillery.weyl import bell_diagonal_matrix, bell_overlaps

try:
    sample_family(SampleConfig("bds_uniform", 2, "strict", target_count=10, max_attempts=20000))
except FilterExhausted as exc:
    print("bds_uniform:", exc)

res = sample_family(SampleConfig("pure_haar", 2, "strict", target_count=200, seed=3))
ov = bell_overlaps(res.states, 2)
print("pure states accepted:", res.accepted, "acceptance rate", round(res.acceptance_rate, 3))
print("min PT eigenvalue of raw states      ", min_pt_eigenvalue(res.states, (2, 2)).max())
print("min PT eigenvalue after projection   ", min_pt_eigenvalue(bell_diagonal_matrix(2, ov), (2, 2)).min())
