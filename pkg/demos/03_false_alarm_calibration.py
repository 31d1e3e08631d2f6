"""Calibrating the detection threshold on noise.

Under noise only, each PDP sample is a scaled chi-square variable with
2N degrees of freedom (N receive antennas). The threshold relative to the
noise floor is chosen so a search window of L samples false-alarms with
the target probability. Here we measure that rate through the full
receive chain, including the estimated noise floor.
"""

import sys

from prachsim import DetectorConfig, threshold_from_pfa
from prachsim.harness import run_pfa_calibration

n_subframes = int(sys.argv[1]) if len(sys.argv) > 1 else 3000

for p_fa in (0.01, 0.001):
    cfg = DetectorConfig(p_fa_target=p_fa)
    print(f"p_fa {p_fa:g}: T_r = {threshold_from_pfa(p_fa, 2, cfg.window_length(13)):.3f} (N=2, L=15)")
    r = run_pfa_calibration(cfg, n_subframes)
    lo, hi = r.per_window_ci_95
    print(f"  measured {r.per_window_rate:.2e} per window [{lo:.2e}, {hi:.2e}] over {r.n_windows} windows")
    print(f"  {r.per_subframe_rate:.3f} of subframes raise at least one false alarm")
