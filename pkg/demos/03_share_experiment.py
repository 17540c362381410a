"""
Share of distillable low-fidelity states
========================================

Sample NPT states whose fidelity is at most 1/d and count how many each
protocol can distill. Small sample sizes keep this quick; the CLI runs
the same experiment at any size:

    python -m distillery share --family bds --d 3 --n 1000 --protocols fimax,adgj
"""

import sys

from distillery import SampleConfig, emit_report, run_share_experiment

for family in ("pure_haar", "bds_uniform", "gbds"):
    for d in (2, 3):
        cfg = SampleConfig(family, d, "normal", target_count=200, seed=1,
                           gbds_bases=10, gbds_states_per_basis=20)
        protocols = ["fimax", "adgj", "bbpssw"] + (["dejmps"] if d == 2 else [])
        rep = run_share_experiment(cfg, protocols)
        shares = "  ".join(f"{p}={rep.share(p):.2f}" for p in protocols)
        print(f"{family:12s} d={d}  acceptance={rep.acceptance_rate:.2f}  {shares}")

# reports serialize to JSON or CSV; runtime is left out so reruns compare equal
sys.stdout.write(emit_report(rep, "csv").decode())
