"""Interference from a neighbouring cell.

The interferer uses another logical root, so its preamble does not line up
with any signature window of the target's root; it raises the correlator
output everywhere by roughly its power divided by 839. Compare a weak and
a strong interferer on logical roots 0 and 4.
"""

import sys
from dataclasses import replace

from prachsim import make_inter_cell
from prachsim.harness import emit_results, parse_config, run_cdr_sweep

n = int(sys.argv[1]) if len(sys.argv) > 1 else 100
base = parse_config("sweep.snr_db: [-26, -22, -18, -14]")
s = base.scenario
parts = {"channel": s.target.channel, "geometry": s.geometry, "detector": s.detector}
points = []
for root in (0, 4):
    sc = make_inter_cell(s.target.identity, [root], 3, -24.0, parts)
    spec = replace(base, scenario=sc, interferer_snr_db=(-24.0, -9.0), n_subframes=n, interferer_param=f"root={root}")
    points += run_cdr_sweep(spec)
for p in points:
    print(f"{p.interferer_param:7s} I={p.interferer_snr_db:5g} dB  T={p.snr_db:5g} dB  CDR {p.cdr:.3f}")
emit_results(points, "demo_out", name="inter_cell")
