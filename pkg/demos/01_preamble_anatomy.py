"""Anatomy of a PRACH preamble.

Walks from a logical root index to the transmitted subframe: which physical
Zadoff-Chu root the cell uses, how preamble indices become cyclic shifts,
why shifted copies of one root are orthogonal while different roots are
only weakly correlated, and how the SEQ/CP/GP layout looks in samples.
"""

import numpy as np

from prachsim import (
    PreambleIdentity,
    derive_geometry,
    generate_root_sequence,
    logical_to_physical_root,
    ncs_from_config,
    resolve_preamble,
    synthesize_preamble,
)
from prachsim.zc import cyclic_shift

target = PreambleIdentity(logical_root_index=22, preamble_index=32, cyclic_shift_idx=1)
u, plan = resolve_preamble(target)
print(f"logical root 22 -> physical root u={u}")
print(f"N_CS for cyclic shift index 1: {ncs_from_config(1)} samples, {839 // plan.n_cs} shifts per root")
print(f"preamble 32 -> v={plan.v}, C_v={plan.c_v}, root hop {plan.root_hop}")

x = generate_root_sequence(u)
print(f"\n|x_u(n)| ranges over [{np.abs(x.samples).min():.12f}, {np.abs(x.samples).max():.12f}]")

# periodic correlation against shifted copies of the same root
for c in (0, 13, 416):
    r = abs(np.vdot(x.samples, cyclic_shift(x, c)))
    print(f"same root, shift {c:3d}: |<x, x_shifted>| = {r:10.4f}")

# and against other cells' roots
for logical in (0, 1, 4):
    y = generate_root_sequence(logical_to_physical_root(logical)).samples
    peak = np.abs(np.fft.ifft(np.fft.fft(x.samples) * np.conj(np.fft.fft(y)))).max()
    print(f"root {u} vs logical root {logical}: peak cross-correlation {peak:.3f} (sqrt(839) = {np.sqrt(839):.3f})")

g = derive_geometry(6, 0)
w = synthesize_preamble(target, g).samples
print(f"\nsubframe: {g.subframe_samples} samples at {g.sample_rate / 1e6:.2f} MS/s")
print(f"  CP  {g.cp_samples:4d} samples ({g.cp_samples / g.sample_rate * 1e6:6.1f} us)")
print(f"  SEQ {g.seq_samples:4d} samples ({g.seq_duration * 1e6:6.1f} us, {g.prach_scs:.0f} Hz bins)")
print(f"  GP  {g.gp_samples:4d} samples ({g.gp_samples / g.sample_rate * 1e6:6.1f} us)")
print(f"  mean SEQ power {np.mean(np.abs(w[g.seq_slice]) ** 2):.6f}, GP energy {np.sum(np.abs(w[-g.gp_samples:]) ** 2):.1f}")
print(f"  CP equals SEQ tail: {np.array_equal(w[:g.cp_samples], w[g.seq_slice][-g.cp_samples:])}")
